//! Differential fuzzing: random programs, three independent counting routes,
//! any disagreement is a bug.
//!
//! Run with: `cargo run --release --example fuzz_diff`

use aspcount::fuzz::{differential_check, gen_program, FuzzConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let cfg = FuzzConfig {
        atoms: 7,
        rules: 10,
        cycle_prob: 0.6,
        ..FuzzConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..25 {
        let p = gen_program(&cfg, &mut rng);
        let out = differential_check(&p).unwrap();
        assert!(!out.mismatch, "mismatch on program {i}:\n{p}");
        println!("program {i:2}: count={} ok", out.bruteforce);
    }
    println!("all routes agree on 25 random programs");
}
