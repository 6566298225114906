//! Random XOR constraints partition the answer sets: summing the cell counts
//! over every right-hand side of an m-constraint system recovers the total.
//!
//! Run with: `cargo run --example xor_partition`

use aspcount::approx::round_rng;
use aspcount::gf2::sample_xor_set;
use aspcount::program::Program;
use aspcount::search::{bounded_count, count_brute};

fn main() {
    let mut src = String::new();
    for i in 0..6 {
        src.push_str(&format!("a{i} :- not b{i}. b{i} :- not a{i}.\n"));
    }
    let p = Program::parse(&src).unwrap();
    let total = count_brute(&p).unwrap().count;
    println!("total answer sets: {total}");

    let m = 3usize;
    let mut rng = round_rng(7, 0);
    let mut xors = sample_xor_set(p.num_atoms(), m, &mut rng);

    let mut sum = 0u64;
    for rhs_bits in 0..(1u32 << m) {
        for (i, c) in xors.iter_mut().enumerate() {
            c.rhs = rhs_bits >> i & 1 == 1;
        }
        let cell = bounded_count(&p, &xors, u64::MAX - 1, None).unwrap();
        println!("  rhs={rhs_bits:0m$b}  cell={cell}");
        sum += cell;
    }
    println!("sum over cells:    {sum}");
    assert_eq!(format!("{total}"), format!("{sum}"));
}
