//! Random XOR constraints and an incremental GF(2) Gauss-Jordan propagator.
//!
//! Constraints range over atom variables only. The matrix keeps its rows in
//! reduced row-echelon form relative to the currently-unassigned columns, so
//! a partial assignment with no satisfying extension always shows up as a
//! `0 = 1` row, and columns forced to a single value show up as unit rows.
//! Backtracking restores full per-level snapshots; systems are desk-scale.

use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};

use rand::Rng;

use crate::program::AtomId;
use crate::semantics::Interpretation;

/// A parity constraint `x_{i1} ⊕ ... ⊕ x_{ik} = rhs` over atom ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XorConstraint {
    pub vars: BTreeSet<AtomId>,
    pub rhs: bool,
}

impl XorConstraint {
    pub fn satisfied_by(&self, m: &Interpretation) -> bool {
        let ones = self.vars.iter().filter(|&&a| m.contains(a)).count();
        (ones % 2 == 1) == self.rhs
    }
}

/// Samples `m` constraints: each atom included independently with probability
/// 1/2, right-hand side uniform. The rng fully determines the output; per
/// constraint, inclusion bits are drawn in ascending atom order, then the rhs.
pub fn sample_xor_set(n_atoms: u32, m: usize, rng: &mut impl Rng) -> Vec<XorConstraint> {
    (0..m)
        .map(|_| {
            let vars = (0..n_atoms).filter(|_| rng.gen_bool(0.5)).collect();
            let rhs = rng.gen_bool(0.5);
            XorConstraint { vars, rhs }
        })
        .collect()
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct Row {
    bits: Vec<u64>,
    rhs: bool,
}

impl Row {
    fn zero(words: usize) -> Row {
        Row {
            bits: vec![0; words],
            rhs: false,
        }
    }

    fn get(&self, col: u32) -> bool {
        self.bits[(col / 64) as usize] >> (col % 64) & 1 == 1
    }

    fn set(&mut self, col: u32) {
        self.bits[(col / 64) as usize] |= 1 << (col % 64);
    }

    fn clear(&mut self, col: u32) {
        self.bits[(col / 64) as usize] &= !(1 << (col % 64));
    }

    fn xor_in(&mut self, other: &Row) {
        for (w, o) in self.bits.iter_mut().zip(&other.bits) {
            *w ^= o;
        }
        self.rhs ^= other.rhs;
    }

    fn lowest_set(&self) -> Option<u32> {
        self.bits
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i as u32 * 64 + w.trailing_zeros())
    }

    fn count_ones(&self) -> u32 {
        self.bits.iter().map(|w| w.count_ones()).sum()
    }

    fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }
}

/// Forced assignments and conflict status reported by the propagator.
#[derive(Debug, Clone, Default)]
pub struct GjeOutcome {
    pub forced: Vec<(AtomId, bool)>,
    pub conflict: bool,
}

#[derive(Clone)]
struct State {
    rows: Vec<Row>,
    pivot: Vec<Option<u32>>,
    assigned: Vec<Option<bool>>,
}

/// Incremental Gauss-Jordan matrix over GF(2).
#[derive(Clone)]
pub struct Gf2Matrix {
    ncols: u32,
    rows: Vec<Row>,
    /// Pivot column per row; None once the row has been emptied.
    pivot: Vec<Option<u32>>,
    assigned: Vec<Option<bool>>,
    /// Snapshots taken on the first assignment of each decision level.
    snapshots: Vec<(usize, State)>,
}

/// Builds the matrix, reducing the constraints to RREF. Contradictory
/// constraints surface as an immediate conflict; singleton rows as forced
/// literals.
pub fn gje_init(constraints: &[XorConstraint], ncols: u32) -> (Gf2Matrix, GjeOutcome) {
    let words = (ncols as usize + 63) / 64 + usize::from(ncols == 0);
    let mut mat = Gf2Matrix {
        ncols,
        rows: Vec::new(),
        pivot: Vec::new(),
        assigned: vec![None; ncols as usize],
        snapshots: Vec::new(),
    };
    let mut outcome = GjeOutcome::default();
    for c in constraints {
        let mut row = Row::zero(words);
        for &a in &c.vars {
            debug_assert!(a < ncols);
            row.set(a);
        }
        row.rhs = c.rhs;
        // reduce against existing pivots
        for (i, p) in mat.pivot.iter().enumerate() {
            if let Some(p) = p {
                if row.get(*p) {
                    let other = mat.rows[i].clone();
                    row.xor_in(&other);
                }
            }
        }
        match row.lowest_set() {
            None => {
                if row.rhs {
                    outcome.conflict = true;
                }
                // zero rows carry no information, drop them
            }
            Some(p) => {
                // eliminate the new pivot from all existing rows
                for (i, r) in mat.rows.iter_mut().enumerate() {
                    if r.get(p) {
                        r.xor_in(&row);
                        debug_assert!(mat.pivot[i] != Some(p));
                    }
                }
                mat.rows.push(row);
                mat.pivot.push(Some(p));
            }
        }
    }
    mat.collect_forced(&mut outcome);
    (mat, outcome)
}

impl Gf2Matrix {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> u32 {
        self.ncols
    }

    fn collect_forced(&self, outcome: &mut GjeOutcome) {
        for row in &self.rows {
            if row.is_zero() {
                if row.rhs {
                    outcome.conflict = true;
                }
            } else if row.count_ones() == 1 {
                let col = row.lowest_set().unwrap();
                if self.assigned[col as usize].is_none() {
                    outcome.forced.push((col, row.rhs));
                }
            }
        }
    }

    /// Substitutes a value for a column and re-normalizes to RREF. `level` is
    /// the search decision level; the state before the first assignment at
    /// each level is snapshotted for [`Gf2Matrix::backtrack`].
    pub fn assign(&mut self, col: AtomId, value: bool, level: usize) -> GjeOutcome {
        let mut outcome = GjeOutcome::default();
        match self.assigned[col as usize] {
            Some(v) => {
                if v != value {
                    outcome.conflict = true;
                }
                return outcome;
            }
            None => {}
        }
        if self
            .snapshots
            .last()
            .map(|&(l, _)| l < level)
            .unwrap_or(true)
            && level > 0
        {
            self.snapshots.push((
                level,
                State {
                    rows: self.rows.clone(),
                    pivot: self.pivot.clone(),
                    assigned: self.assigned.clone(),
                },
            ));
        }
        self.assigned[col as usize] = Some(value);

        let mut lost_pivot = Vec::new();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if row.get(col) {
                row.clear(col);
                row.rhs ^= value;
                if self.pivot[i] == Some(col) {
                    lost_pivot.push(i);
                }
            }
        }
        for i in lost_pivot {
            match self.rows[i].lowest_set() {
                None => {
                    self.pivot[i] = None;
                }
                Some(p) => {
                    self.pivot[i] = Some(p);
                    let pivot_row = self.rows[i].clone();
                    for (j, row) in self.rows.iter_mut().enumerate() {
                        if j != i && row.get(p) {
                            row.xor_in(&pivot_row);
                        }
                    }
                }
            }
        }
        self.collect_forced(&mut outcome);
        outcome
    }

    /// Restores the matrix to the state just before the first assignment at
    /// `level`, dropping all deeper levels. No-op if nothing was assigned at
    /// or below that level.
    pub fn backtrack(&mut self, level: usize) {
        let mut restore = None;
        while let Some(&(l, _)) = self.snapshots.last() {
            if l >= level {
                restore = self.snapshots.pop().map(|(_, s)| s);
            } else {
                break;
            }
        }
        if let Some(s) = restore {
            self.rows = s.rows;
            self.pivot = s.pivot;
            self.assigned = s.assigned;
        }
    }

    /// Hash of the matrix view (rows, pivots, assignment); used to verify
    /// that backtracking restores state exactly.
    pub fn state_hash(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.rows.hash(&mut h);
        self.pivot.hash(&mut h);
        self.assigned.hash(&mut h);
        h.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn xc(vars: &[AtomId], rhs: bool) -> XorConstraint {
        XorConstraint {
            vars: vars.iter().copied().collect(),
            rhs,
        }
    }

    #[test]
    fn sample_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(sample_xor_set(5, 0, &mut rng).is_empty());
    }

    #[test]
    fn sample_golden_seed_42() {
        // frozen after the first run of the seeded sampler
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let xs = sample_xor_set(3, 1, &mut rng);
        assert_eq!(xs, vec![xc(&[2], false)]);
    }

    #[test]
    fn sample_inclusion_frequency() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut hits = [0u32; 8];
        let n = 10_000;
        for _ in 0..n {
            for c in sample_xor_set(8, 1, &mut rng) {
                for &v in &c.vars {
                    hits[v as usize] += 1;
                }
            }
        }
        for (v, &h) in hits.iter().enumerate() {
            let freq = h as f64 / n as f64;
            assert!((0.47..=0.53).contains(&freq), "var {v} frequency {freq}");
        }
    }

    #[test]
    fn init_detects_contradiction() {
        let (_, out) = gje_init(&[xc(&[0, 1], false), xc(&[0, 1], true)], 2);
        assert!(out.conflict);
    }

    #[test]
    fn init_reports_singleton() {
        let (_, out) = gje_init(&[xc(&[0], true)], 1);
        assert!(!out.conflict);
        assert_eq!(out.forced, vec![(0, true)]);
    }

    #[test]
    fn init_independent_rows() {
        let (mat, out) = gje_init(&[xc(&[0, 1], false), xc(&[1, 2], false)], 3);
        assert!(!out.conflict);
        assert!(out.forced.is_empty());
        assert_eq!(mat.num_rows(), 2);
    }

    #[test]
    fn assign_forces_partner() {
        let (mut mat, _) = gje_init(&[xc(&[0, 1], true)], 2);
        let out = mat.assign(0, true, 1);
        assert!(!out.conflict);
        assert_eq!(out.forced, vec![(1, false)]);
    }

    #[test]
    fn assign_conflicts_on_violation() {
        let (mut mat, _) = gje_init(&[xc(&[0, 1], false)], 2);
        let out = mat.assign(0, true, 1);
        assert!(!out.conflict);
        let out = mat.assign(1, false, 2);
        assert!(out.conflict);
    }

    #[test]
    fn assign_no_forcing_with_two_free() {
        let (mut mat, _) = gje_init(&[xc(&[0, 1, 2], true)], 3);
        let out = mat.assign(0, false, 1);
        assert!(!out.conflict);
        assert!(out.forced.is_empty());
    }

    #[test]
    fn cross_row_elimination_detects_dead_end() {
        // x0⊕x2⊕x3=0 and x1⊕x2⊕x3=1: assigning x0=0, x1=0 leaves the
        // contradictory pair x2⊕x3=0 and x2⊕x3=1
        let (mut mat, out) = gje_init(&[xc(&[0, 2, 3], false), xc(&[1, 2, 3], true)], 4);
        assert!(!out.conflict);
        let out = mat.assign(0, false, 1);
        assert!(!out.conflict);
        let out = mat.assign(1, false, 2);
        assert!(out.conflict, "propagator must detect the unextendable prefix");
    }

    #[test]
    fn backtrack_restores_hashes() {
        let (mut mat, _) = gje_init(&[xc(&[0, 1, 2], true), xc(&[1, 3], false)], 4);
        let h0 = mat.state_hash();
        mat.assign(0, true, 1);
        let h1 = mat.state_hash();
        mat.assign(1, false, 2);
        mat.assign(3, false, 2);
        mat.backtrack(2);
        assert_eq!(mat.state_hash(), h1);
        mat.backtrack(1);
        assert_eq!(mat.state_hash(), h0);
        // empty log: no-op
        mat.backtrack(1);
        assert_eq!(mat.state_hash(), h0);
    }

    #[test]
    fn nested_levels_unwind_lifo() {
        let (mut mat, _) = gje_init(&[xc(&[0, 1, 2, 3], false)], 4);
        let mut hashes = vec![mat.state_hash()];
        for (lvl, col) in [(1, 0), (2, 1), (3, 2)] {
            mat.assign(col, lvl % 2 == 0, lvl);
            hashes.push(mat.state_hash());
        }
        for lvl in (1..=3).rev() {
            mat.backtrack(lvl);
            assert_eq!(mat.state_hash(), hashes[lvl - 1]);
        }
    }

    #[test]
    fn determinism_same_seed_same_constraints() {
        let sample = || {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            sample_xor_set(12, 6, &mut rng)
        };
        assert_eq!(sample(), sample());
    }

    /// Brute-force solutions of a system over n vars.
    fn brute_solutions(cs: &[XorConstraint], n: u32) -> Vec<u64> {
        (0u64..1 << n)
            .filter(|&m| {
                cs.iter().all(|c| {
                    let ones = c.vars.iter().filter(|&&v| m >> v & 1 == 1).count();
                    (ones % 2 == 1) == c.rhs
                })
            })
            .collect()
    }

    /// Drives the propagator through all 2^n assignments with backtracking and
    /// collects accepted full assignments. Also asserts completeness: a
    /// conflict-free node always has a satisfying extension.
    fn propagator_accepted(cs: &[XorConstraint], n: u32) -> Vec<u64> {
        let (mat0, out) = gje_init(cs, n);
        let mut accepted = Vec::new();
        if out.conflict {
            return accepted;
        }
        fn extension_exists(cs: &[XorConstraint], n: u32, partial: &[Option<bool>]) -> bool {
            (0u64..1 << n).any(|m| {
                partial
                    .iter()
                    .enumerate()
                    .all(|(i, v)| v.map(|v| (m >> i & 1 == 1) == v).unwrap_or(true))
                    && cs.iter().all(|c| {
                        let ones = c.vars.iter().filter(|&&v| m >> v & 1 == 1).count();
                        (ones % 2 == 1) == c.rhs
                    })
            })
        }
        fn rec(
            mat: &mut Gf2Matrix,
            cs: &[XorConstraint],
            n: u32,
            var: u32,
            cur: u64,
            partial: &mut Vec<Option<bool>>,
            accepted: &mut Vec<u64>,
        ) {
            if var == n {
                accepted.push(cur);
                return;
            }
            for val in [false, true] {
                let level = var as usize + 1;
                let pre = mat.state_hash();
                let out = mat.assign(var, val, level);
                partial[var as usize] = Some(val);
                if !out.conflict {
                    assert!(
                        extension_exists(cs, n, partial),
                        "propagator missed a dead end"
                    );
                    rec(
                        mat,
                        cs,
                        n,
                        var + 1,
                        cur | (u64::from(val) << var),
                        partial,
                        accepted,
                    );
                }
                partial[var as usize] = None;
                mat.backtrack(level);
                assert_eq!(mat.state_hash(), pre);
            }
        }
        let mut mat = mat0;
        let mut partial = vec![None; n as usize];
        rec(&mut mat, cs, n, 0, 0, &mut partial, &mut accepted);
        accepted
    }

    #[test]
    fn solution_preservation_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.gen_range(1..=7);
            let m = rng.gen_range(0..=4);
            let cs = sample_xor_set(n, m, &mut rng);
            let mut got = propagator_accepted(&cs, n);
            got.sort_unstable();
            assert_eq!(got, brute_solutions(&cs, n));
        }
    }
}
