//! Answer set counting for ground logic programs.
//!
//! The pipeline: parse a ground program, translate it to CNF via Clark
//! completion (an over-approximation of its answer sets), and separate real
//! answer sets from spurious completion models with a copy-formula
//! unit-propagation check. On top of that sit an exact counter (DPLL over the
//! completion), an approximate counter (random XOR partitioning with a GF(2)
//! Gauss-Jordan propagator), a brute-force enumeration oracle, and a
//! differential fuzz harness.
//!
//! See the `examples/` directory for one runnable example per capability.

pub mod approx;
pub mod cnf;
pub mod copyf;
pub mod deps;
pub mod fuzz;
pub mod gf2;
pub mod program;
pub mod result;
pub mod search;
pub mod semantics;

pub use program::{AtomId, ParseError, Program, Rule};
pub use result::{CountMode, CountResult, SearchStats};
