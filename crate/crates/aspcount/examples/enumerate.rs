//! Enumerate answer sets of a small program from first principles.
//!
//! Run with: `cargo run --example enumerate`

use aspcount::program::Program;
use aspcount::semantics::enumerate_answer_sets;

fn main() {
    let src = "
        a :- not b.
        b :- not a.
        c :- a.
        :- b, not c.
    ";
    let p = Program::parse(src).unwrap();
    println!("program:\n{p}");
    println!("answer sets:");
    for m in enumerate_answer_sets(&p).unwrap() {
        println!("  {}", m.display(&p));
    }
}
