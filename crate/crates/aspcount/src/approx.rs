//! (ε, δ) approximate answer set counting.
//!
//! Random XOR constraints partition the answer sets into 2^m cells of a
//! pairwise-independent hash family. Per round, the counter searches for the
//! smallest m whose cell falls below a threshold derived from ε, counts that
//! cell exactly, and estimates `cell × 2^m`; the median over an odd number of
//! rounds derived from δ gives the `Pr[|AS|/(1+ε) ≤ c ≤ (1+ε)|AS|] ≥ 1−δ`
//! guarantee. If the whole space is already below the threshold the count is
//! exact and reported as such.

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gf2::sample_xor_set;
use crate::program::Program;
use crate::result::{ApproxMeta, CountMode, CountResult, RoundInfo, SearchStats};
use crate::search::{bounded_count, CountError};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ApproxError {
    #[error("epsilon must be > 0, got {0}")]
    BadEpsilon(f64),
    #[error("delta must be in (0, 1), got {0}")]
    BadDelta(f64),
}

/// `thresh = 1 + ⌈9.84 · (1 + ε/(1+ε)) · (1 + 1/ε)²⌉`.
pub fn derive_thresh(epsilon: f64) -> Result<u64, ApproxError> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(ApproxError::BadEpsilon(epsilon));
    }
    let t = 9.84 * (1.0 + epsilon / (1.0 + epsilon)) * (1.0 + 1.0 / epsilon).powi(2);
    Ok(1 + t.ceil() as u64)
}

/// Smallest odd integer ≥ ⌈17 · log₂(3/δ)⌉, the standard median
/// amplification bound.
pub fn derive_rounds(delta: f64) -> Result<u32, ApproxError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(ApproxError::BadDelta(delta));
    }
    let r = (17.0 * (3.0 / delta).log2()).ceil() as u32;
    Ok(if r % 2 == 0 { r + 1 } else { r.max(1) })
}

/// Validated configuration with the derived threshold and round count.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub thresh: u64,
    pub rounds: u32,
}

impl ApproxConfig {
    pub fn new(epsilon: f64, delta: f64, seed: u64) -> Result<Self, ApproxError> {
        Ok(ApproxConfig {
            epsilon,
            delta,
            seed,
            thresh: derive_thresh(epsilon)?,
            rounds: derive_rounds(delta)?,
        })
    }
}

/// The seed-derived RNG stream for one round; round streams are independent,
/// so rounds may run concurrently with identical results.
pub fn round_rng(seed: u64, round: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round as u64 + 1);
    rng
}

/// One round: the full sampled XOR list and the crossing point found on its
/// nested prefixes.
fn run_round(
    p: &Program,
    cfg: &ApproxConfig,
    round: u32,
    start_m: u32,
    budget: Option<u64>,
) -> Result<(u32, u64), CountError> {
    let n = p.num_atoms();
    let max_m = n.max(1);
    let mut rng = round_rng(cfg.seed, round);
    let xors = sample_xor_set(n, max_m as usize, &mut rng);
    let cell = |m: u32| bounded_count(p, &xors[..m as usize], cfg.thresh, budget);

    let mut m = start_m.clamp(1, max_m);
    let mut c = cell(m)?;
    if c < cfg.thresh {
        // gallop down to the smallest m still below thresh
        while m > 1 {
            let c2 = cell(m - 1)?;
            if c2 >= cfg.thresh {
                break;
            }
            m -= 1;
            c = c2;
        }
    } else {
        loop {
            if m == max_m {
                break; // degenerate: every prefix saturates; report the cap
            }
            m += 1;
            c = cell(m)?;
            if c < cfg.thresh {
                break;
            }
        }
    }
    Ok((m, c))
}

/// Approximate |AS(P)| with the (ε, δ) guarantee. Disjunctive programs are
/// served through the oracle enumerator inside [`bounded_count`].
pub fn approx_count(p: &Program, cfg: &ApproxConfig) -> Result<CountResult, CountError> {
    approx_count_threaded(p, cfg, 1, None)
}

/// As [`approx_count`], optionally spreading rounds over `threads` workers.
/// The estimate and telemetry are independent of the thread count.
pub fn approx_count_threaded(
    p: &Program,
    cfg: &ApproxConfig,
    threads: usize,
    budget: Option<u64>,
) -> Result<CountResult, CountError> {
    // whole space below thresh: the cell count is the exact answer
    let whole = bounded_count(p, &[], cfg.thresh, budget)?;
    if whole < cfg.thresh {
        return Ok(CountResult {
            count: BigUint::from(whole),
            mode: CountMode::Exact,
            stats: SearchStats::default(),
            approx: Some(ApproxMeta {
                epsilon: cfg.epsilon,
                delta: cfg.delta,
                seed: cfg.seed,
                thresh: cfg.thresh,
                rounds: cfg.rounds,
                final_m: 0,
                cells: Vec::new(),
            }),
        });
    }

    let rounds = cfg.rounds;
    let mut results: Vec<Option<Result<(u32, u64), CountError>>> =
        (0..rounds).map(|_| None).collect();
    if threads <= 1 {
        let mut prev_m = 1;
        for r in 0..rounds {
            let out = run_round(p, cfg, r, prev_m, budget);
            if let Ok((m, _)) = out {
                prev_m = m;
            }
            results[r as usize] = Some(out);
        }
    } else {
        let chunks: Vec<Vec<u32>> = (0..threads)
            .map(|w| (0..rounds).filter(|r| *r as usize % threads == w).collect())
            .collect();
        std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .into_iter()
                .map(|mine| {
                    scope.spawn(move || {
                        let mut out = Vec::new();
                        let mut prev_m = 1;
                        for r in mine {
                            let res = run_round(p, cfg, r, prev_m, budget);
                            if let Ok((m, _)) = res {
                                prev_m = m;
                            }
                            out.push((r, res));
                        }
                        out
                    })
                })
                .collect();
            for h in handles {
                for (r, res) in h.join().expect("round worker panicked") {
                    results[r as usize] = Some(res);
                }
            }
        });
    }

    let mut cells = Vec::with_capacity(rounds as usize);
    let mut estimates: Vec<BigUint> = Vec::with_capacity(rounds as usize);
    let mut final_m = 0;
    for (r, res) in results.into_iter().enumerate() {
        let (m, c) = res.expect("round not run")?;
        cells.push(RoundInfo {
            round: r as u32,
            m,
            cell_count: c,
        });
        estimates.push(BigUint::from(c) << m);
        final_m = m;
    }
    estimates.sort();
    let median = estimates[estimates.len() / 2].clone();
    Ok(CountResult {
        count: median,
        mode: CountMode::Approx,
        stats: SearchStats::default(),
        approx: Some(ApproxMeta {
            epsilon: cfg.epsilon,
            delta: cfg.delta,
            seed: cfg.seed,
            thresh: cfg.thresh,
            rounds,
            final_m,
            cells,
        }),
    })
}
