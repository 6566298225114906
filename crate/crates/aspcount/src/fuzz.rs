//! Random program generation and the differential check harness.
//!
//! The generator is biased toward cyclic positive dependencies (uniform
//! random rules are mostly tight, and the copy formula only bites on loops).
//! Generation renders text and reparses it, so a fixed seed reproduces
//! identical program bytes.

use num_bigint::BigUint;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::program::Program;
use crate::search::{count_exact, count_filter_reference, CountError, SearchConfig};
use crate::semantics::{count_bruteforce, enumerate_answer_sets};

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub atoms: u32,
    pub rules: u32,
    /// Probability that a body literal is negated.
    pub neg_prob: f64,
    /// Probability that a rule head is disjunctive (2-3 atoms).
    pub disj_prob: f64,
    /// Probability that the program gets an injected positive cycle.
    pub cycle_prob: f64,
    /// Probability that a rule is a constraint.
    pub constraint_prob: f64,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            atoms: 8,
            rules: 12,
            neg_prob: 0.5,
            disj_prob: 0.0,
            cycle_prob: 0.5,
            constraint_prob: 0.15,
        }
    }
}

/// Renders one random program. Atom names are `a0..a{n-1}`.
pub fn gen_program_text(cfg: &FuzzConfig, rng: &mut ChaCha8Rng) -> String {
    let n = cfg.atoms.max(1);
    let name = |i: u32| format!("a{i}");
    let mut lines: Vec<String> = Vec::new();
    let mut budget = cfg.rules;

    if n >= 2 && rng.gen_bool(cfg.cycle_prob) {
        // close a chain of distinct atoms into a pure positive cycle
        let len = rng.gen_range(2..=3.min(n));
        let mut picks: Vec<u32> = Vec::new();
        while (picks.len() as u32) < len {
            let a = rng.gen_range(0..n);
            if !picks.contains(&a) {
                picks.push(a);
            }
        }
        for i in 0..picks.len() {
            let head = picks[i];
            let body = picks[(i + 1) % picks.len()];
            lines.push(format!("{} :- {}.", name(head), name(body)));
            budget = budget.saturating_sub(1);
        }
    }

    for _ in 0..budget {
        let constraint = rng.gen_bool(cfg.constraint_prob);
        let head: Vec<u32> = if constraint {
            Vec::new()
        } else {
            let k = if rng.gen_bool(cfg.disj_prob) {
                rng.gen_range(2..=3)
            } else {
                1
            };
            (0..k).map(|_| rng.gen_range(0..n)).collect()
        };
        let min_body = usize::from(constraint);
        let body_len = rng.gen_range(min_body..=3);
        let body: Vec<String> = (0..body_len)
            .map(|_| {
                let a = rng.gen_range(0..n);
                if rng.gen_bool(cfg.neg_prob) {
                    format!("not {}", name(a))
                } else {
                    name(a)
                }
            })
            .collect();
        let head_txt = head.iter().map(|&a| name(a)).collect::<Vec<_>>().join(" | ");
        let line = match (head.is_empty(), body.is_empty()) {
            (false, true) => format!("{head_txt}."),
            (false, false) => format!("{head_txt} :- {}.", body.join(", ")),
            (true, false) => format!(":- {}.", body.join(", ")),
            (true, true) => unreachable!("constraints always draw a body"),
        };
        lines.push(line);
    }
    let mut text = lines.join("\n");
    text.push('\n');
    text
}

/// Generates and parses one program.
pub fn gen_program(cfg: &FuzzConfig, rng: &mut ChaCha8Rng) -> Program {
    Program::parse(&gen_program_text(cfg, rng)).expect("generator produced invalid syntax")
}

/// Outcome of one differential check.
#[derive(Debug, Clone)]
pub struct DiffOutcome {
    pub bruteforce: BigUint,
    /// Search-engine and filter-reference counts; None for disjunctive input,
    /// where only the oracle runs.
    pub exact: Option<BigUint>,
    pub filter: Option<BigUint>,
    pub mismatch: bool,
}

/// Runs brute force vs `count_exact` vs `count_filter_reference` on normal
/// programs; disjunctive programs get an oracle self-consistency pass (the
/// answer sets must form an antichain).
pub fn differential_check(p: &Program) -> Result<DiffOutcome, CountError> {
    let bruteforce = count_bruteforce(p)?;
    if p.is_normal() {
        let exact = count_exact(p, &SearchConfig::default())?.count;
        let filter = count_filter_reference(p)?.count;
        let mismatch = exact != bruteforce || filter != bruteforce;
        Ok(DiffOutcome {
            bruteforce,
            exact: Some(exact),
            filter: Some(filter),
            mismatch,
        })
    } else {
        let sets = enumerate_answer_sets(p)?;
        let mut mismatch = false;
        for x in &sets {
            for y in &sets {
                if x != y && x.0.is_subset(&y.0) {
                    mismatch = true;
                }
            }
        }
        Ok(DiffOutcome {
            bruteforce,
            exact: None,
            filter: None,
            mismatch,
        })
    }
}
