//! Translate a non-tight program into DIMACS CNF: the Clark completion plus
//! the copy-formula implications that restore exactness of the copy check.
//!
//! Run with: `cargo run --example translate_dimacs`

use aspcount::cnf::{clark_completion, export_dimacs};
use aspcount::copyf::build_copy_formula;
use aspcount::deps::{is_tight, loop_atoms};
use aspcount::program::Program;

fn main() {
    let src = "
        a :- b.
        b :- a.
        a :- not c.
        c :- not a.
    ";
    let p = Program::parse(src).unwrap();
    println!("tight: {}", is_tight(&p));

    let mut f = clark_completion(&p).unwrap();
    let loops = loop_atoms(&p);
    let copy = build_copy_formula(&p, &loops, &mut f.var_map).unwrap();

    let mut out = Vec::new();
    export_dimacs(&f, &p, Some(&copy), &mut out).unwrap();
    print!("{}", String::from_utf8(out).unwrap());
}
