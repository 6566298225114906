//! Exact counting via the completion + copy-formula search, cross-checked
//! against the brute-force oracle.
//!
//! Run with: `cargo run --example exact_count`

use aspcount::program::Program;
use aspcount::search::{count_brute, count_exact, SearchConfig};

fn main() {
    // n independent choice pairs plus a constraint: 2^n / 2 answer sets
    let n = 10;
    let mut src = String::new();
    for i in 0..n {
        src.push_str(&format!("a{i} :- not b{i}. b{i} :- not a{i}.\n"));
    }
    src.push_str(":- a0, a1.\n");
    let p = Program::parse(&src).unwrap();

    let exact = count_exact(&p, &SearchConfig::default()).unwrap();
    let brute = count_brute(&p).unwrap();
    println!("exact search : {}", exact.count);
    println!("brute oracle : {}", brute.count);
    println!(
        "decisions={} propagations={} copy_rejections={}",
        exact.stats.decisions, exact.stats.propagations, exact.stats.copy_rejections
    );
    assert_eq!(exact.count, brute.count);
}
