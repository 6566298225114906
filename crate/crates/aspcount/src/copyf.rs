//! Copy formula and the unit-propagation acceptance test.
//!
//! The copy formula guards loop atoms with fresh copy variables: type 1
//! implications `copy(v) → v` for every loop atom v, and type 2 implications
//! `copy(a_1) ∧ .. ∧ copy(a_k) ∧ b_1 ∧ .. ∧ b_m ∧ ¬c_1 ∧ .. ∧ ¬c_n → copy(x)`
//! for every rule with a loop-atom head x, where the a_i are the loop atoms of
//! the positive body and the b_j the remaining positive body atoms. For a
//! total atom assignment M satisfying the completion, unit-propagating M
//! through the copy clauses leaves no residual clause iff M is an answer set.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::cnf::{Lit, Var, VarMap};
use crate::program::{AtomId, Program};
use crate::semantics::Interpretation;

/// Copy implications as clauses over copy and atom variables.
#[derive(Debug, Clone)]
pub struct CopyFormula {
    pub implications: Vec<Vec<Lit>>,
    /// Copy variable per loop atom.
    pub copy_of: BTreeMap<AtomId, Var>,
}

impl CopyFormula {
    pub fn is_empty(&self) -> bool {
        self.implications.is_empty()
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CopyError {
    #[error("copy formula is defined for normal programs only")]
    DisjunctiveNotSupported,
    #[error("loop atom {0} is not registered in the program")]
    UnknownLoopAtom(AtomId),
}

/// Builds the copy formula for a normal program. `loops` must be
/// `loop_atoms(p)`; copy variables are allocated in the shared map, after all
/// aux variables.
pub fn build_copy_formula(
    p: &Program,
    loops: &BTreeSet<AtomId>,
    vm: &mut VarMap,
) -> Result<CopyFormula, CopyError> {
    if p.is_disjunctive() {
        return Err(CopyError::DisjunctiveNotSupported);
    }
    if let Some(&bad) = loops.iter().find(|&&a| a >= p.num_atoms()) {
        return Err(CopyError::UnknownLoopAtom(bad));
    }
    let mut copy_of = BTreeMap::new();
    for &v in loops {
        copy_of.insert(v, vm.alloc_copy(v));
    }
    let mut implications = Vec::new();
    // type 1: copy(v) → v
    for &v in loops {
        implications.push(vec![Lit::negative(copy_of[&v]), Lit::positive(vm.atom_var(v))]);
    }
    // type 2: justified body → copy(head), per rule with a loop-atom head
    for r in &p.rules {
        let Some(&x) = r.head.iter().next() else {
            continue;
        };
        if !loops.contains(&x) {
            continue;
        }
        let mut cl = Vec::new();
        for &a in &r.pos_body {
            if loops.contains(&a) {
                cl.push(Lit::negative(copy_of[&a]));
            } else {
                cl.push(Lit::negative(vm.atom_var(a)));
            }
        }
        for &c in &r.neg_body {
            cl.push(Lit::positive(vm.atom_var(c)));
        }
        cl.push(Lit::positive(copy_of[&x]));
        implications.push(cl);
    }
    Ok(CopyFormula {
        implications,
        copy_of,
    })
}

/// Result of a unit-propagation fixpoint.
#[derive(Debug, Clone)]
pub struct Residual {
    /// Unsatisfied, non-unit clauses with false literals removed.
    pub clauses_remaining: Vec<Vec<Lit>>,
    /// Assignments derived from unit clauses, in derivation order.
    pub derived: Vec<(Var, bool)>,
    /// Some clause was emptied.
    pub conflict: bool,
}

/// Unit propagation to fixpoint: delete satisfied clauses, drop false
/// literals, assert literals of unit clauses. The assignment is extended in
/// place with the derived values.
pub fn unit_propagate(clauses: &[Vec<Lit>], assignment: &mut [Option<bool>]) -> Residual {
    let mut derived = Vec::new();
    let mut remaining = Vec::new();
    loop {
        let mut changed = false;
        remaining.clear();
        for cl in clauses {
            let mut satisfied = false;
            let mut open = Vec::new();
            for &l in cl {
                match assignment[l.var().slot()] {
                    Some(v) if l.eval(v) => {
                        satisfied = true;
                        break;
                    }
                    Some(_) => {}
                    None => open.push(l),
                }
            }
            if satisfied {
                continue;
            }
            match open.len() {
                0 => {
                    return Residual {
                        clauses_remaining: remaining,
                        derived,
                        conflict: true,
                    }
                }
                1 => {
                    let l = open[0];
                    assignment[l.var().slot()] = Some(l.is_positive());
                    derived.push((l.var(), l.is_positive()));
                    changed = true;
                }
                _ => remaining.push(open),
            }
        }
        if !changed {
            return Residual {
                clauses_remaining: remaining,
                derived,
                conflict: false,
            };
        }
    }
}

/// Propagates a total atom assignment through the copy clauses.
pub fn propagate_interpretation(
    cf: &CopyFormula,
    vm: &VarMap,
    atom_value: impl Fn(AtomId) -> bool,
) -> Residual {
    let mut assignment: Vec<Option<bool>> = vec![None; vm.num_vars() as usize];
    for a in 0..vm.num_atom_vars() {
        assignment[vm.atom_var(a).slot()] = Some(atom_value(a));
    }
    unit_propagate(&cf.implications, &mut assignment)
}

/// The acceptance test: for a total atom assignment M satisfying the
/// completion, true iff the propagation residual is empty and conflict-free —
/// i.e. iff M is an answer set.
pub fn copy_check(m: &Interpretation, cf: &CopyFormula, vm: &VarMap) -> bool {
    let res = propagate_interpretation(cf, vm, |a| m.contains(a));
    !res.conflict && res.clauses_remaining.is_empty()
}
