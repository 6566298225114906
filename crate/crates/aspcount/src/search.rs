//! Exact answer set counting: DPLL over the Clark completion with the
//! copy-formula acceptance test at total assignments.
//!
//! Decisions range over atom variables only; body auxiliaries are forced by
//! unit propagation once their body atoms are assigned, so a leaf of the
//! search is reached as soon as every atom variable has a value. A leaf is a
//! completion model by construction, and it is counted iff the copy check
//! passes. Optional XOR constraints are enforced during search by the GF(2)
//! propagator, which is what the bounded cell counter of the approximate
//! counter uses.

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::cnf::{clark_completion, CnfFormula, Lit, Var, VarClass};
use crate::copyf::{build_copy_formula, copy_check, CopyFormula};
use crate::deps::loop_atoms;
use crate::gf2::{gje_init, Gf2Matrix, XorConstraint};
use crate::program::{AtomId, Program};
use crate::result::{CountMode, CountResult, SearchStats};
use crate::semantics::{enumerate_answer_sets, Interpretation, SemanticsError, DEFAULT_ATOM_CAP};

#[derive(Debug, Clone, Default)]
pub enum DecisionOrder {
    #[default]
    AscendingId,
    DescendingId,
    Custom(Vec<AtomId>),
}

#[derive(Debug, Clone, Default)]
pub struct SearchConfig {
    /// Abort with [`CountError::Incomplete`] after this many decisions.
    pub decision_budget: Option<u64>,
    pub order: DecisionOrder,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CountError {
    #[error("exact counting supports normal programs only")]
    DisjunctiveNotSupported,
    #[error("decision budget exhausted after {decisions} decisions")]
    Incomplete { decisions: u64 },
    #[error(transparent)]
    Oracle(#[from] SemanticsError),
}

enum Abort {
    Budget,
    Thresh,
}

struct Engine<'a> {
    clauses: &'a [Vec<Lit>],
    cnf: &'a CnfFormula,
    copy: &'a CopyFormula,
    order: Vec<AtomId>,
    assign: Vec<Option<bool>>,
    trail: Vec<Var>,
    xor: Option<Gf2Matrix>,
    thresh: Option<u64>,
    budget: Option<u64>,
    count: BigUint,
    stats: SearchStats,
}

impl<'a> Engine<'a> {
    fn new(
        cnf: &'a CnfFormula,
        copy: &'a CopyFormula,
        cfg: &SearchConfig,
        xor: Option<Gf2Matrix>,
        thresh: Option<u64>,
    ) -> Self {
        let n = cnf.var_map.num_atom_vars();
        let order = match &cfg.order {
            DecisionOrder::AscendingId => (0..n).collect(),
            DecisionOrder::DescendingId => (0..n).rev().collect(),
            DecisionOrder::Custom(o) => {
                assert_eq!(o.len() as u32, n, "custom order must cover every atom");
                o.clone()
            }
        };
        Engine {
            clauses: &cnf.clauses,
            cnf,
            copy,
            order,
            assign: vec![None; cnf.num_completion_vars() as usize],
            trail: Vec::new(),
            xor,
            thresh,
            budget: cfg.decision_budget,
            count: BigUint::zero(),
            stats: SearchStats::default(),
        }
    }

    /// Applies pending assignments and runs unit propagation (clauses and XOR
    /// rows) to fixpoint. Returns false on conflict.
    fn propagate(&mut self, level: usize, mut pending: Vec<(Var, bool)>) -> bool {
        loop {
            while let Some((v, val)) = pending.pop() {
                match self.assign[v.slot()] {
                    Some(x) if x == val => continue,
                    Some(_) => return false,
                    None => {}
                }
                self.assign[v.slot()] = Some(val);
                self.trail.push(v);
                self.stats.propagations += 1;
                if self.cnf.var_map.class(v) == VarClass::Atom {
                    if let Some(mat) = &mut self.xor {
                        let out = mat.assign(v.0 - 1, val, level);
                        if out.conflict {
                            return false;
                        }
                        for (col, forced) in out.forced {
                            pending.push((Var(col + 1), forced));
                        }
                    }
                }
            }
            // scan for unit and empty clauses
            for cl in self.clauses {
                let mut satisfied = false;
                let mut unit = None;
                let mut open = 0u32;
                for &l in cl {
                    match self.assign[l.var().slot()] {
                        Some(v) if l.eval(v) => {
                            satisfied = true;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            open += 1;
                            unit = Some(l);
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match open {
                    0 => return false,
                    1 => {
                        let l = unit.unwrap();
                        pending.push((l.var(), l.is_positive()));
                    }
                    _ => {}
                }
            }
            if pending.is_empty() {
                return true;
            }
        }
    }

    fn next_decision(&self) -> Option<Var> {
        self.order
            .iter()
            .map(|&a| self.cnf.var_map.atom_var(a))
            .find(|v| self.assign[v.slot()].is_none())
    }

    fn at_leaf(&mut self) -> Result<(), Abort> {
        debug_assert!(
            self.assign.iter().all(|a| a.is_some()),
            "aux variables must be forced at atom totality"
        );
        let m = Interpretation(
            (0..self.cnf.var_map.num_atom_vars())
                .filter(|&a| self.assign[self.cnf.var_map.atom_var(a).slot()] == Some(true))
                .collect(),
        );
        if copy_check(&m, self.copy, &self.cnf.var_map) {
            self.count += 1u32;
            if let Some(t) = self.thresh {
                if self.count >= BigUint::from(t) {
                    return Err(Abort::Thresh);
                }
            }
        } else {
            self.stats.copy_rejections += 1;
        }
        Ok(())
    }

    fn search(&mut self, level: usize, pending: Vec<(Var, bool)>) -> Result<(), Abort> {
        let mark = self.trail.len();
        let ok = self.propagate(level, pending);
        let result = if ok { self.branch(level) } else { Ok(()) };
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            self.assign[v.slot()] = None;
        }
        if let Some(mat) = &mut self.xor {
            mat.backtrack(level);
        }
        result
    }

    fn branch(&mut self, level: usize) -> Result<(), Abort> {
        let Some(v) = self.next_decision() else {
            return self.at_leaf();
        };
        for val in [false, true] {
            if let Some(b) = self.budget {
                if self.stats.decisions >= b {
                    return Err(Abort::Budget);
                }
            }
            self.stats.decisions += 1;
            self.search(level + 1, vec![(v, val)])?;
        }
        Ok(())
    }

    fn run(mut self, root_pending: Vec<(Var, bool)>) -> Result<(BigUint, SearchStats), CountError> {
        match self.search(0, root_pending) {
            Ok(()) | Err(Abort::Thresh) => Ok((self.count, self.stats)),
            Err(Abort::Budget) => Err(CountError::Incomplete {
                decisions: self.stats.decisions,
            }),
        }
    }
}

/// Builds the completion / copy-formula pair for a normal program.
pub fn build_counting_pair(p: &Program) -> Result<(CnfFormula, CopyFormula), CountError> {
    let mut cnf = clark_completion(p).map_err(|_| CountError::DisjunctiveNotSupported)?;
    let loops = loop_atoms(p);
    let copy = build_copy_formula(p, &loops, &mut cnf.var_map)
        .map_err(|_| CountError::DisjunctiveNotSupported)?;
    Ok((cnf, copy))
}

/// Exact |AS(P)| for a normal program: DPLL over the completion, copy check
/// at each total assignment.
pub fn count_exact(p: &Program, cfg: &SearchConfig) -> Result<CountResult, CountError> {
    let (cnf, copy) = build_counting_pair(p)?;
    let engine = Engine::new(&cnf, &copy, cfg, None, None);
    let (count, stats) = engine.run(Vec::new())?;
    Ok(CountResult {
        count,
        mode: CountMode::Exact,
        stats,
        approx: None,
    })
}

/// Reference mode: enumerate completion models by truth table over atom
/// variables and filter with the copy check. Differential-tests the search
/// engine; atom count is capped.
pub fn count_filter_reference(p: &Program) -> Result<CountResult, CountError> {
    let n = p.num_atoms();
    if n > DEFAULT_ATOM_CAP {
        return Err(SemanticsError::AtomCapExceeded {
            atoms: n,
            cap: DEFAULT_ATOM_CAP,
        }
        .into());
    }
    let (cnf, copy) = build_counting_pair(p)?;
    let mut count = BigUint::zero();
    let mut stats = SearchStats::default();
    for mask in 0u64..1u64 << n {
        if crate::cnf::extend_to_model(&cnf, |a| mask >> a & 1 == 1).is_none() {
            continue;
        }
        let m = Interpretation((0..n).filter(|&a| mask >> a & 1 == 1).collect());
        if copy_check(&m, &copy, &cnf.var_map) {
            count += 1u32;
        } else {
            stats.copy_rejections += 1;
        }
    }
    Ok(CountResult {
        count,
        mode: CountMode::Filter,
        stats,
        approx: None,
    })
}

/// min(thresh, |{M ∈ AS(P) : M satisfies every constraint in xors}|).
///
/// Normal programs run the exact-counter search with the GF(2) propagator and
/// abort once `thresh` answer sets are found; disjunctive programs filter the
/// brute-force oracle's enumeration (oracle-scale only).
pub fn bounded_count(
    p: &Program,
    xors: &[XorConstraint],
    thresh: u64,
    budget: Option<u64>,
) -> Result<u64, CountError> {
    assert!(thresh >= 1);
    if p.is_normal() {
        let (cnf, copy) = build_counting_pair(p)?;
        let (mat, out) = gje_init(xors, p.num_atoms());
        if out.conflict {
            return Ok(0);
        }
        let root: Vec<(Var, bool)> = out
            .forced
            .into_iter()
            .map(|(col, val)| (Var(col + 1), val))
            .collect();
        let cfg = SearchConfig {
            decision_budget: budget,
            order: DecisionOrder::AscendingId,
        };
        let engine = Engine::new(&cnf, &copy, &cfg, Some(mat), Some(thresh));
        let (count, _) = engine.run(root)?;
        Ok(count.min(BigUint::from(thresh)).try_into().unwrap())
    } else {
        let mut hits = 0u64;
        for m in enumerate_answer_sets(p)? {
            if xors.iter().all(|c| c.satisfied_by(&m)) {
                hits += 1;
                if hits >= thresh {
                    break;
                }
            }
        }
        Ok(hits)
    }
}

/// |AS(P)| via the oracle, packaged as a [`CountResult`].
pub fn count_brute(p: &Program) -> Result<CountResult, CountError> {
    let count = crate::semantics::count_bruteforce(p)?;
    Ok(CountResult::new(count, CountMode::Bruteforce))
}

/// Convenience: exact count as u64 for tests.
pub fn count_exact_u64(p: &Program) -> u64 {
    count_exact(p, &SearchConfig::default())
        .unwrap()
        .count
        .try_into()
        .unwrap()
}
