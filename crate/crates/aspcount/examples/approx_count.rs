//! Approximate counting with an (ε, δ) guarantee via XOR hashing.
//!
//! Run with: `cargo run --release --example approx_count`

use aspcount::approx::{approx_count_threaded, ApproxConfig};
use aspcount::program::Program;
use aspcount::search::count_exact;
use aspcount::search::SearchConfig;

fn main() {
    // 9 choice pairs: exactly 2^9 = 512 answer sets
    let mut src = String::new();
    for i in 0..9 {
        src.push_str(&format!("a{i} :- not b{i}. b{i} :- not a{i}.\n"));
    }
    let p = Program::parse(&src).unwrap();

    let cfg = ApproxConfig::new(0.8, 0.2, 42).unwrap();
    println!("thresh={} rounds={}", cfg.thresh, cfg.rounds);

    let approx = approx_count_threaded(&p, &cfg, 4, None).unwrap();
    let exact = count_exact(&p, &SearchConfig::default()).unwrap();
    println!("approximate : {}", approx.count);
    println!("exact       : {}", exact.count);
    if let Some(meta) = &approx.approx {
        println!("final m = {}, first rounds:", meta.final_m);
        for info in meta.cells.iter().take(5) {
            println!(
                "  round {:2}: m={} cell={} estimate={}",
                info.round,
                info.m,
                info.cell_count,
                info.cell_count << info.m
            );
        }
    }
}
