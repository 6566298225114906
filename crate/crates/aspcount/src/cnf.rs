//! CNF formulas over three variable classes and the Clark completion.
//!
//! Variable numbering is class-segmented and dense: atom variables first (in
//! atom-id order), then one body auxiliary per rule with body size ≥ 2 (in
//! rule order), then copy variables (allocated by the copy-formula builder).
//! The segmentation keeps DIMACS exports byte-stable across runs.

use std::collections::BTreeSet;
use std::io::{self, Write};
use std::ops::Not;

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::copyf::CopyFormula;
use crate::program::{AtomId, Program};

/// A CNF variable, 1-based as in DIMACS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

impl Var {
    /// 0-based slot for assignment vectors.
    pub fn slot(self) -> usize {
        (self.0 - 1) as usize
    }
}

/// A signed variable; the sign is the DIMACS sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(i32);

impl Lit {
    pub fn positive(v: Var) -> Lit {
        Lit(v.0 as i32)
    }

    pub fn negative(v: Var) -> Lit {
        Lit(-(v.0 as i32))
    }

    pub fn var(self) -> Var {
        Var(self.0.unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Truth of the literal given its variable's value.
    pub fn eval(self, value: bool) -> bool {
        value == self.is_positive()
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarClass {
    Atom,
    BodyAux,
    Copy,
}

/// Bidirectional map between program objects and CNF variables.
#[derive(Debug, Clone, Default)]
pub struct VarMap {
    n_atoms: u32,
    /// Aux variable per rule index, if the rule got one.
    rule_aux: Vec<Option<Var>>,
    /// Body literals per aux ordinal (var index minus atoms minus 1).
    aux_bodies: Vec<Vec<Lit>>,
    /// Copy variable per loop atom.
    copy_of: std::collections::BTreeMap<AtomId, Var>,
}

impl VarMap {
    fn new(p: &Program) -> VarMap {
        VarMap {
            n_atoms: p.num_atoms(),
            rule_aux: vec![None; p.rules.len()],
            aux_bodies: Vec::new(),
            copy_of: Default::default(),
        }
    }

    pub fn atom_var(&self, a: AtomId) -> Var {
        debug_assert!(a < self.n_atoms);
        Var(a + 1)
    }

    /// The atom behind a variable, if it is an atom variable.
    pub fn atom_of(&self, v: Var) -> Option<AtomId> {
        (v.0 <= self.n_atoms).then(|| v.0 - 1)
    }

    pub fn class(&self, v: Var) -> VarClass {
        if v.0 <= self.n_atoms {
            VarClass::Atom
        } else if v.0 <= self.n_atoms + self.aux_bodies.len() as u32 {
            VarClass::BodyAux
        } else {
            VarClass::Copy
        }
    }

    pub fn num_atom_vars(&self) -> u32 {
        self.n_atoms
    }

    pub fn num_aux_vars(&self) -> u32 {
        self.aux_bodies.len() as u32
    }

    pub fn num_copy_vars(&self) -> u32 {
        self.copy_of.len() as u32
    }

    /// Total variable count: atoms + aux + copy.
    pub fn num_vars(&self) -> u32 {
        self.n_atoms + self.num_aux_vars() + self.num_copy_vars()
    }

    pub fn rule_aux(&self, rule_idx: usize) -> Option<Var> {
        self.rule_aux[rule_idx]
    }

    pub fn aux_body(&self, v: Var) -> &[Lit] {
        &self.aux_bodies[(v.0 - self.n_atoms - 1) as usize]
    }

    fn alloc_aux(&mut self, rule_idx: usize, body: Vec<Lit>) -> Var {
        let v = Var(self.n_atoms + self.aux_bodies.len() as u32 + 1);
        self.aux_bodies.push(body);
        self.rule_aux[rule_idx] = Some(v);
        v
    }

    /// Allocates the copy variable for a loop atom. Copy variables come after
    /// all aux variables; the copy-formula builder is the only caller.
    pub(crate) fn alloc_copy(&mut self, a: AtomId) -> Var {
        debug_assert!(!self.copy_of.contains_key(&a));
        let v = Var(self.n_atoms + self.num_aux_vars() + self.copy_of.len() as u32 + 1);
        self.copy_of.insert(a, v);
        v
    }

    pub fn copy_var(&self, a: AtomId) -> Option<Var> {
        self.copy_of.get(&a).copied()
    }

    pub fn copy_vars(&self) -> impl Iterator<Item = (AtomId, Var)> + '_ {
        self.copy_of.iter().map(|(&a, &v)| (a, v))
    }
}

/// Clauses over atom and body-aux variables, plus the variable map.
#[derive(Debug, Clone)]
pub struct CnfFormula {
    pub clauses: Vec<Vec<Lit>>,
    pub var_map: VarMap,
}

impl CnfFormula {
    /// Variables of the completion itself (atoms + aux, no copy vars).
    pub fn num_completion_vars(&self) -> u32 {
        self.var_map.num_atom_vars() + self.var_map.num_aux_vars()
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("Clark completion is defined for normal programs only")]
    DisjunctiveNotSupported,
}

/// Builds the Clark completion of a normal program as CNF.
///
/// For each atom a with defining rules r_1..r_k this encodes
/// `a ↔ (B_1 ∨ ... ∨ B_k)`; bodies of size ≥ 2 go through one aux variable
/// with a full `aux ↔ B_i` equivalence, size-1 bodies use the body literal
/// directly, and empty bodies collapse to the unit clause `a`. Atoms with no
/// defining rule get the unit `¬a`; constraints become plain clauses over
/// atom variables.
pub fn clark_completion(p: &Program) -> Result<CnfFormula, TranslateError> {
    if p.is_disjunctive() {
        return Err(TranslateError::DisjunctiveNotSupported);
    }
    let mut vm = VarMap::new(p);
    let body_lits = |vm: &VarMap, pos: &BTreeSet<AtomId>, neg: &BTreeSet<AtomId>| -> Vec<Lit> {
        pos.iter()
            .map(|&a| Lit::positive(vm.atom_var(a)))
            .chain(neg.iter().map(|&a| Lit::negative(vm.atom_var(a))))
            .collect()
    };

    // aux allocation in rule order
    for (i, r) in p.rules.iter().enumerate() {
        if !r.is_constraint() && r.body_len() >= 2 {
            let lits = body_lits(&vm, &r.pos_body, &r.neg_body);
            vm.alloc_aux(i, lits);
        }
    }

    let mut clauses: Vec<Vec<Lit>> = Vec::new();

    // aux ↔ body equivalences, rule order
    for (i, _) in p.rules.iter().enumerate() {
        if let Some(d) = vm.rule_aux(i) {
            let lits = vm.aux_body(d).to_vec();
            for &l in &lits {
                clauses.push(vec![Lit::negative(d), l]);
            }
            let mut long = vec![Lit::positive(d)];
            long.extend(lits.iter().map(|&l| !l));
            clauses.push(long);
        }
    }

    // per-atom definitions, atom-id order
    #[derive(Clone, Copy, PartialEq)]
    enum BodyRepr {
        True,
        Single(Lit),
        Aux(Var),
    }
    for a in p.atoms.ids() {
        let av = vm.atom_var(a);
        let mut defs: Vec<BodyRepr> = Vec::new();
        for (i, r) in p.rules.iter().enumerate() {
            if r.head.contains(&a) {
                defs.push(if r.body_len() == 0 {
                    BodyRepr::True
                } else if let Some(d) = vm.rule_aux(i) {
                    BodyRepr::Aux(d)
                } else {
                    let lits = body_lits(&vm, &r.pos_body, &r.neg_body);
                    BodyRepr::Single(lits[0])
                });
            }
        }
        if defs.is_empty() {
            clauses.push(vec![Lit::negative(av)]);
            continue;
        }
        let has_fact = defs.iter().any(|d| matches!(d, BodyRepr::True));
        let mut disj: Vec<Lit> = Vec::new();
        for d in &defs {
            let l = match d {
                BodyRepr::True => continue,
                BodyRepr::Single(l) => *l,
                BodyRepr::Aux(v) => Lit::positive(*v),
            };
            if !disj.contains(&l) {
                disj.push(l);
            }
        }
        if has_fact {
            clauses.push(vec![Lit::positive(av)]);
        } else {
            let mut cl = vec![Lit::negative(av)];
            cl.extend(disj.iter().copied());
            clauses.push(cl);
        }
        for &d in &disj {
            clauses.push(vec![!d, Lit::positive(av)]);
        }
    }

    // constraints as plain clauses, rule order
    for r in &p.rules {
        if r.is_constraint() {
            let cl: Vec<Lit> = body_lits(&vm, &r.pos_body, &r.neg_body)
                .into_iter()
                .map(|l| !l)
                .collect();
            clauses.push(cl);
        }
    }

    Ok(CnfFormula {
        clauses,
        var_map: vm,
    })
}

/// Extends an atom-variable assignment to a full assignment over atoms + aux
/// (aux values are functionally determined by their bodies) and returns it if
/// it satisfies every clause.
pub fn extend_to_model(
    f: &CnfFormula,
    atom_value: impl Fn(AtomId) -> bool,
) -> Option<Vec<bool>> {
    let vm = &f.var_map;
    let n = vm.num_atom_vars();
    let total = f.num_completion_vars() as usize;
    let mut values = vec![false; total];
    for a in 0..n {
        values[a as usize] = atom_value(a);
    }
    for ord in 0..vm.num_aux_vars() {
        let v = Var(n + ord + 1);
        let body = vm.aux_body(v);
        values[v.slot()] = body.iter().all(|l| l.eval(values[l.var().slot()]));
    }
    let ok = f
        .clauses
        .iter()
        .all(|cl| cl.iter().any(|l| l.eval(values[l.var().slot()])));
    ok.then_some(values)
}

/// Number of atom-variable assignments extendable to a model, by truth table.
/// Equals the total model count of the formula since aux values are forced.
pub fn completion_model_count(f: &CnfFormula) -> BigUint {
    let n = f.var_map.num_atom_vars();
    assert!(n <= 30, "truth-table counting over {n} atoms is infeasible");
    let mut count = BigUint::zero();
    for mask in 0u64..1u64 << n {
        if extend_to_model(f, |a| mask >> a & 1 == 1).is_some() {
            count += 1u32;
        }
    }
    count
}

/// Writes the formula in DIMACS CNF, with the variable map as `c` comments.
/// When a copy formula is given its clauses are appended and its variables
/// flagged with `c copy` lines.
pub fn export_dimacs(
    f: &CnfFormula,
    p: &Program,
    copy: Option<&CopyFormula>,
    sink: &mut impl Write,
) -> io::Result<()> {
    let vm = &f.var_map;
    for a in p.atoms.ids() {
        writeln!(sink, "c atom {} {}", p.atoms.name(a), vm.atom_var(a).0)?;
    }
    let mut n_vars = f.num_completion_vars();
    let mut n_clauses = f.clauses.len();
    if let Some(cf) = copy {
        for (a, v) in vm.copy_vars() {
            writeln!(sink, "c copy {} {}", p.atoms.name(a), v.0)?;
        }
        n_vars += vm.num_copy_vars();
        n_clauses += cf.implications.len();
    }
    writeln!(sink, "p cnf {} {}", n_vars, n_clauses)?;
    let copy_clauses = copy.map(|cf| cf.implications.as_slice()).unwrap_or(&[]);
    for cl in f.clauses.iter().chain(copy_clauses) {
        for l in cl {
            write!(sink, "{} ", l.to_dimacs())?;
        }
        writeln!(sink, "0")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::Program;
    use crate::semantics::{count_bruteforce, enumerate_answer_sets};
    use num_traits::ToPrimitive;

    fn completion(src: &str) -> CnfFormula {
        clark_completion(&Program::parse(src).unwrap()).unwrap()
    }

    fn count(src: &str) -> u64 {
        completion_model_count(&completion(src)).to_u64().unwrap()
    }

    /// Atom-projected models of the completion, as masks.
    fn atom_models(f: &CnfFormula) -> Vec<u64> {
        let n = f.var_map.num_atom_vars();
        (0u64..1 << n)
            .filter(|&m| extend_to_model(f, |a| m >> a & 1 == 1).is_some())
            .collect()
    }

    #[test]
    fn fact_yields_unit() {
        let f = completion("a.");
        assert_eq!(atom_models(&f), vec![1]);
        assert_eq!(count("a."), 1);
    }

    #[test]
    fn negation_rule_has_single_model() {
        // a ↔ ¬b together with ¬b (b has no defining rule): model {a}
        let f = completion("a :- not b.");
        assert_eq!(atom_models(&f), vec![0b01]);
    }

    #[test]
    fn two_cycle_overapproximates() {
        // completion a↔b, b↔a: models ∅ and {a,b}, vs answer-set count 1
        let f = completion("a :- b. b :- a.");
        assert_eq!(atom_models(&f), vec![0b00, 0b11]);
        assert_eq!(count("a :- b. b :- a."), 2);
        let p = Program::parse("a :- b. b :- a.").unwrap();
        assert_eq!(count_bruteforce(&p).unwrap().to_u64().unwrap(), 1);
    }

    #[test]
    fn completion_count_examples() {
        assert_eq!(count("a :- not b. b :- not a."), 2);
        assert_eq!(count("a."), 1);
    }

    #[test]
    fn rejects_disjunctive() {
        assert_eq!(
            clark_completion(&Program::parse("a | b.").unwrap()).unwrap_err(),
            TranslateError::DisjunctiveNotSupported
        );
    }

    #[test]
    fn dimacs_format() {
        let f = CnfFormula {
            clauses: vec![vec![Lit(1), Lit(-2)]],
            var_map: {
                let p = Program::parse("a :- not b.").unwrap();
                VarMap::new(&p)
            },
        };
        let p = Program::parse("a :- not b.").unwrap();
        let mut out = Vec::new();
        export_dimacs(&f, &p, None, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("p cnf 2 1"));
        assert!(text.contains("1 -2 0"));
        assert!(text.contains("c atom a 1"));
        assert!(text.contains("c atom b 2"));

        let empty = CnfFormula {
            clauses: vec![],
            var_map: VarMap::default(),
        };
        let mut out = Vec::new();
        export_dimacs(&empty, &Program::default(), None, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "p cnf 0 0\n");
    }

    #[test]
    fn dimacs_deterministic() {
        let src = "a :- b, not c. b :- a. c. :- a, c.";
        let render = || {
            let p = Program::parse(src).unwrap();
            let f = clark_completion(&p).unwrap();
            let mut out = Vec::new();
            export_dimacs(&f, &p, None, &mut out).unwrap();
            out
        };
        assert_eq!(render(), render());
    }

    #[test]
    fn answer_sets_satisfy_completion() {
        for src in [
            "a :- not b. b :- not a. c :- a.",
            "a :- b. b :- a. x :- not a.",
            "a. b :- a, not c. :- b, c.",
            "a :- not a.",
        ] {
            let p = Program::parse(src).unwrap();
            let f = clark_completion(&p).unwrap();
            for m in enumerate_answer_sets(&p).unwrap() {
                assert!(
                    extend_to_model(&f, |a| m.contains(a)).is_some(),
                    "answer set not a completion model for {src}"
                );
            }
        }
    }

    #[test]
    fn aux_values_functionally_determined() {
        // no two models agree on atoms but differ on aux: flipping any aux of
        // a model must falsify a clause
        for src in ["a :- b, not c. b :- a, c. c :- not a, not b.", "a :- b, c. b. c."] {
            let f = completion(src);
            let n = f.var_map.num_atom_vars();
            for mask in 0u64..1 << n {
                let Some(values) = extend_to_model(&f, |a| mask >> a & 1 == 1) else {
                    continue;
                };
                for ord in 0..f.var_map.num_aux_vars() {
                    let slot = (n + ord) as usize;
                    let mut flipped = values.clone();
                    flipped[slot] = !flipped[slot];
                    let still_model = f
                        .clauses
                        .iter()
                        .all(|cl| cl.iter().any(|l| l.eval(flipped[l.var().slot()])));
                    assert!(!still_model, "aux not functionally determined in {src}");
                }
            }
        }
    }

    #[test]
    fn var_classes_segmented() {
        let p = Program::parse("a :- b, not c. b :- a. d :- a, b.").unwrap();
        let f = clark_completion(&p).unwrap();
        let vm = &f.var_map;
        assert_eq!(vm.num_atom_vars(), 4);
        assert_eq!(vm.num_aux_vars(), 2); // rules with body size ≥ 2
        for a in 0..4 {
            assert_eq!(vm.class(vm.atom_var(a)), VarClass::Atom);
        }
        assert_eq!(vm.class(Var(5)), VarClass::BodyAux);
        assert_eq!(vm.class(Var(7)), VarClass::Copy);
    }
}
