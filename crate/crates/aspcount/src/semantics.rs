//! First-principles answer set semantics.
//!
//! Satisfaction, the Gelfond-Lifschitz reduct, the answer set test, and a
//! deliberately naive enumeration oracle that serves as ground truth for the
//! counters. An interpretation M satisfies a rule r iff
//! `(head(r) ∪ neg_body(r)) ∩ M ≠ ∅` or `pos_body(r) \ M ≠ ∅`; M is an answer
//! set iff it models P and no proper subset models the reduct P^M.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use thiserror::Error;

use crate::program::{AtomId, Program, Rule};

/// Default cap on the oracle's 2^n interpretation sweep.
pub const DEFAULT_ATOM_CAP: u32 = 24;

/// A set of true atoms; every atom not present is false.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Interpretation(pub BTreeSet<AtomId>);

impl Interpretation {
    pub fn empty() -> Self {
        Interpretation(BTreeSet::new())
    }

    pub fn from_iter(atoms: impl IntoIterator<Item = AtomId>) -> Self {
        Interpretation(atoms.into_iter().collect())
    }

    pub fn contains(&self, a: AtomId) -> bool {
        self.0.contains(&a)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Render as `{a,b}` with atom names sorted lexicographically.
    pub fn display(&self, p: &Program) -> String {
        let mut names: Vec<&str> = self.0.iter().map(|&a| p.atoms.name(a)).collect();
        names.sort_unstable();
        format!("{{{}}}", names.join(","))
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("program has {atoms} atoms, exceeding the oracle cap of {cap}")]
    AtomCapExceeded { atoms: u32, cap: u32 },
    #[error("least_model requires every rule to have exactly one head atom")]
    NotDefinite,
}

/// `M ⊨ r` per the satisfaction condition above.
pub fn satisfies(m: &Interpretation, r: &Rule) -> bool {
    r.head.iter().chain(r.neg_body.iter()).any(|&a| m.contains(a))
        || r.pos_body.iter().any(|&a| !m.contains(a))
}

/// `M ⊨ P`: M satisfies every rule.
pub fn is_model(m: &Interpretation, p: &Program) -> bool {
    p.rules.iter().all(|r| satisfies(m, r))
}

/// The GL reduct `P^M`: drop rules whose negative body meets M, strip
/// negative bodies from the rest. The result is negation-free.
pub fn gl_reduct(p: &Program, m: &Interpretation) -> Program {
    let rules = p
        .rules
        .iter()
        .filter(|r| r.neg_body.iter().all(|&a| !m.contains(a)))
        .map(|r| Rule {
            head: r.head.clone(),
            pos_body: r.pos_body.clone(),
            neg_body: BTreeSet::new(),
        })
        .collect();
    Program {
        atoms: p.atoms.clone(),
        rules,
    }
}

/// Least model of a negation-free program whose rules all have exactly one
/// head atom, via the immediate-consequence fixpoint.
pub fn least_model(p: &Program) -> Result<Interpretation, SemanticsError> {
    if p.rules.iter().any(|r| r.head.len() != 1 || !r.neg_body.is_empty()) {
        return Err(SemanticsError::NotDefinite);
    }
    let mut m = BTreeSet::new();
    loop {
        let mut changed = false;
        for r in &p.rules {
            if r.pos_body.iter().all(|a| m.contains(a)) {
                let &h = r.head.iter().next().unwrap();
                changed |= m.insert(h);
            }
        }
        if !changed {
            return Ok(Interpretation(m));
        }
    }
}

/// The answer set test. Normal programs decide reduct minimality by
/// least-fixpoint equality; disjunctive programs search proper subsets.
pub fn is_answer_set(p: &Program, m: &Interpretation) -> bool {
    if !is_model(m, p) {
        return false;
    }
    if p.is_normal() {
        let reduct = gl_reduct(p, m);
        // Constraint rules of the reduct can never derive anything; M ⊨ P
        // already guarantees they are satisfied. The definite part decides.
        let definite = Program {
            atoms: reduct.atoms.clone(),
            rules: reduct
                .rules
                .into_iter()
                .filter(|r| !r.is_constraint())
                .collect(),
        };
        least_model(&definite).map(|lm| lm == *m).unwrap_or(false)
    } else {
        is_answer_set_definitional(p, m)
    }
}

/// The definitional route: `M ⊨ P` and no proper subset `M' ⊂ M` models
/// `P^M`. Exponential in |M|; oracle-scale only. For normal programs this
/// cross-checks the least-fixpoint route.
pub fn is_answer_set_definitional(p: &Program, m: &Interpretation) -> bool {
    if !is_model(m, p) {
        return false;
    }
    let reduct = gl_reduct(p, m);
    let members: Vec<AtomId> = m.0.iter().copied().collect();
    let k = members.len();
    assert!(k < 63, "subset search over {k} atoms is infeasible");
    if k == 0 {
        return true; // the empty set has no proper subset
    }
    let full: u64 = (1u64 << k) - 1;
    // iterate proper submasks of m, including the empty set
    let mut sub = full.wrapping_sub(1) & full;
    loop {
        let m2 = Interpretation(
            members
                .iter()
                .enumerate()
                .filter(|(i, _)| sub >> i & 1 == 1)
                .map(|(_, &a)| a)
                .collect(),
        );
        if is_model(&m2, &reduct) {
            return false;
        }
        if sub == 0 {
            break;
        }
        sub = sub.wrapping_sub(1) & full;
    }
    true
}

/// All answer sets of P, in lexicographic atom-id order, via a 2^n sweep with
/// the default atom cap.
pub fn enumerate_answer_sets(p: &Program) -> Result<Vec<Interpretation>, SemanticsError> {
    enumerate_answer_sets_capped(p, DEFAULT_ATOM_CAP)
}

/// As [`enumerate_answer_sets`] with an explicit cap.
pub fn enumerate_answer_sets_capped(
    p: &Program,
    cap: u32,
) -> Result<Vec<Interpretation>, SemanticsError> {
    let n = p.num_atoms();
    if n > cap {
        return Err(SemanticsError::AtomCapExceeded { atoms: n, cap });
    }
    let masks = rule_masks(p);
    let normal = p.is_normal();
    let mut found = Vec::new();
    for m in 0u64..1u64 << n {
        if is_answer_set_mask(&masks, normal, m) {
            found.push(m);
        }
    }
    let mut sets: Vec<Interpretation> = found.into_iter().map(|m| mask_to_interp(m, n)).collect();
    sets.sort_by(|a, b| a.0.iter().cmp(b.0.iter()));
    Ok(sets)
}

/// `|AS(P)|` by brute force.
pub fn count_bruteforce(p: &Program) -> Result<BigUint, SemanticsError> {
    Ok(BigUint::from(enumerate_answer_sets(p)?.len()))
}

fn mask_to_interp(mask: u64, n: u32) -> Interpretation {
    Interpretation((0..n).filter(|&i| mask >> i & 1 == 1).collect())
}

struct RuleMask {
    head: u64,
    pos: u64,
    neg: u64,
}

fn rule_masks(p: &Program) -> Vec<RuleMask> {
    let to_mask = |s: &BTreeSet<AtomId>| s.iter().fold(0u64, |acc, &a| acc | 1u64 << a);
    p.rules
        .iter()
        .map(|r| RuleMask {
            head: to_mask(&r.head),
            pos: to_mask(&r.pos_body),
            neg: to_mask(&r.neg_body),
        })
        .collect()
}

fn is_model_mask(rules: &[RuleMask], m: u64) -> bool {
    rules
        .iter()
        .all(|r| (r.head | r.neg) & m != 0 || r.pos & m != r.pos)
}

fn is_answer_set_mask(rules: &[RuleMask], normal: bool, m: u64) -> bool {
    if !is_model_mask(rules, m) {
        return false;
    }
    let kept: Vec<(u64, u64)> = rules
        .iter()
        .filter(|r| r.neg & m == 0)
        .map(|r| (r.head, r.pos))
        .collect();
    if normal {
        // least fixpoint of the definite part of the reduct
        let mut cur = 0u64;
        loop {
            let mut changed = false;
            for &(h, pos) in &kept {
                if h != 0 && pos & cur == pos && cur | h != cur {
                    cur |= h;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        cur == m
    } else {
        if m == 0 {
            return true;
        }
        // no proper subset of m may model the reduct
        let mut sub = m.wrapping_sub(1) & m;
        loop {
            if kept.iter().all(|&(h, pos)| h & sub != 0 || pos & sub != pos) {
                return false;
            }
            if sub == 0 {
                return true;
            }
            sub = sub.wrapping_sub(1) & m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interp(p: &Program, names: &[&str]) -> Interpretation {
        Interpretation(names.iter().map(|n| p.atoms.lookup(n).unwrap()).collect())
    }

    fn sets(p: &Program) -> Vec<Interpretation> {
        enumerate_answer_sets(p).unwrap()
    }

    #[test]
    fn satisfies_examples() {
        let p = Program::parse("a :- b.").unwrap();
        assert!(!satisfies(&interp(&p, &["b"]), &p.rules[0]));
        assert!(satisfies(&interp(&p, &["a", "b"]), &p.rules[0]));
        let c = Program::parse(":- a.").unwrap();
        assert!(satisfies(&Interpretation::empty(), &c.rules[0]));
    }

    #[test]
    fn is_model_examples() {
        let p = Program::parse("a :- b. b :- a.").unwrap();
        assert!(is_model(&Interpretation::empty(), &p));
        assert!(!is_model(&interp(&p, &["a"]), &p));
        let f = Program::parse("a.").unwrap();
        assert!(!is_model(&Interpretation::empty(), &f));
    }

    #[test]
    fn gl_reduct_examples() {
        let p = Program::parse("a :- not b. b :- not a.").unwrap();
        let r = gl_reduct(&p, &interp(&p, &["a"]));
        assert_eq!(r.rules.len(), 1);
        assert_eq!(r.rules[0], Program::parse("a.").unwrap().rules[0]);

        let p = Program::parse("a :- b.").unwrap();
        for m in [Interpretation::empty(), interp(&p, &["a", "b"])] {
            assert_eq!(gl_reduct(&p, &m).rules, p.rules);
        }

        let p = Program::parse("a :- not a.").unwrap();
        let r = gl_reduct(&p, &Interpretation::empty());
        assert!(r.rules[0].is_fact());
        assert!(r.rules.iter().all(|r| r.neg_body.is_empty()));
    }

    #[test]
    fn least_model_examples() {
        let p = Program::parse("a. b :- a.").unwrap();
        assert_eq!(least_model(&p).unwrap(), interp(&p, &["a", "b"]));
        let p = Program::parse("a :- b. b :- a.").unwrap();
        assert_eq!(least_model(&p).unwrap(), Interpretation::empty());
        let p = Program::parse("a. c :- a, b.").unwrap();
        assert_eq!(least_model(&p).unwrap(), interp(&p, &["a"]));
    }

    #[test]
    fn least_model_rejects_non_definite() {
        assert!(least_model(&Program::parse(":- a.").unwrap()).is_err());
        assert!(least_model(&Program::parse("a | b.").unwrap()).is_err());
        assert!(least_model(&Program::parse("a :- not b.").unwrap()).is_err());
    }

    #[test]
    fn is_answer_set_examples() {
        let p = Program::parse("a :- b. b :- a.").unwrap();
        assert!(is_answer_set(&p, &Interpretation::empty()));
        assert!(!is_answer_set(&p, &interp(&p, &["a", "b"])));

        let p = Program::parse("a | b.").unwrap();
        assert!(is_answer_set(&p, &interp(&p, &["a"])));
        assert!(!is_answer_set(&p, &interp(&p, &["a", "b"])));
    }

    #[test]
    fn enumerate_examples() {
        let p = Program::parse("a :- not b. b :- not a.").unwrap();
        assert_eq!(sets(&p), vec![interp(&p, &["a"]), interp(&p, &["b"])]);

        let p = Program::parse("a | b.").unwrap();
        assert_eq!(sets(&p), vec![interp(&p, &["a"]), interp(&p, &["b"])]);

        let p = Program::parse("a :- a.").unwrap();
        assert_eq!(sets(&p), vec![Interpretation::empty()]);
    }

    #[test]
    fn count_examples() {
        let one = Program::parse("a :- not b. b :- not a. :- a.").unwrap();
        assert_eq!(count_bruteforce(&one).unwrap(), BigUint::from(1u32));

        let empty = Program::parse("").unwrap();
        assert_eq!(count_bruteforce(&empty).unwrap(), BigUint::from(1u32));

        let mut src = String::new();
        for i in 0..4 {
            src.push_str(&format!("a{i} :- not b{i}. b{i} :- not a{i}. "));
        }
        let pairs = Program::parse(&src).unwrap();
        assert_eq!(count_bruteforce(&pairs).unwrap(), BigUint::from(16u32));
    }

    #[test]
    fn cap_enforced() {
        let mut src = String::new();
        for i in 0..25 {
            src.push_str(&format!("x{i}. "));
        }
        let p = Program::parse(&src).unwrap();
        assert!(matches!(
            enumerate_answer_sets(&p),
            Err(SemanticsError::AtomCapExceeded { atoms: 25, cap: 24 })
        ));
        assert!(enumerate_answer_sets_capped(&p, 25).is_ok());
    }

    #[test]
    fn answer_sets_are_models_and_antichain() {
        for src in [
            "a :- not b. b :- not a. c :- a. :- c, b.",
            "a | b. c :- a.",
            "a :- b. b :- a. x :- not y. y :- not x.",
        ] {
            let p = Program::parse(src).unwrap();
            let all = sets(&p);
            for m in &all {
                assert!(is_model(m, &p));
            }
            for x in &all {
                for y in &all {
                    if x != y {
                        assert!(!x.0.is_subset(&y.0), "antichain violated in {src}");
                    }
                }
            }
        }
    }

    #[test]
    fn negation_free_normal_program_has_least_model_as_only_answer_set() {
        let p = Program::parse("a. b :- a. c :- b, d.").unwrap();
        assert_eq!(sets(&p), vec![least_model(&p).unwrap()]);
    }

    #[test]
    fn both_minimality_routes_agree_on_normal_programs() {
        for src in [
            "a :- not b. b :- not a.",
            "a :- b. b :- a.",
            "a :- not a.",
            "a. b :- a, not c. c :- not b.",
            ":- a, not a. b.",
        ] {
            let p = Program::parse(src).unwrap();
            let n = p.num_atoms();
            for mask in 0u64..1 << n {
                let m = Interpretation((0..n).filter(|&i| mask >> i & 1 == 1).collect());
                assert_eq!(
                    is_answer_set(&p, &m),
                    is_answer_set_definitional(&p, &m),
                    "routes disagree on {src} with {m:?}"
                );
            }
        }
    }
}
