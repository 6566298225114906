//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage/parse error, 2 unsupported input or
//! incomplete run, 3 differential mismatch.

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use aspcount::approx::{approx_count_threaded, round_rng, ApproxConfig};
use aspcount::cnf::{clark_completion, export_dimacs};
use aspcount::copyf::build_copy_formula;
use aspcount::deps::{build_dep_graph, compute_sccs, is_tight, loop_atoms};
use aspcount::fuzz::{differential_check, gen_program_text, FuzzConfig};
use aspcount::gf2::sample_xor_set;
use aspcount::program::Program;
use aspcount::search::{
    count_brute, count_exact, count_filter_reference, CountError, SearchConfig,
};
use aspcount::semantics::{enumerate_answer_sets_capped, SemanticsError, DEFAULT_ATOM_CAP};
use aspcount::CountResult;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_UNSUPPORTED: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

#[derive(Parser)]
#[command(name = "aspcount", version, about = "Count answer sets of ground logic programs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CountModeArg {
    /// Completion + copy-formula search (normal programs).
    Exact,
    /// Brute-force enumeration oracle (any program within the atom cap).
    Brute,
    /// Truth-table completion models filtered by the copy check.
    Filter,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count answer sets exactly.
    Count {
        /// Input program, or `-` for stdin.
        path: String,
        #[arg(long, value_enum, default_value_t = CountModeArg::Exact)]
        mode: CountModeArg,
        /// Abort after this many search decisions.
        #[arg(long)]
        budget: Option<u64>,
        /// Emit a JSON run report instead of the bare count.
        #[arg(long)]
        json: bool,
    },
    /// Approximate the count with an (epsilon, delta) guarantee.
    Approx {
        path: String,
        #[arg(long, default_value_t = 0.8)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.2)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Parallel workers for the estimation rounds.
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Print each round's sampled XOR system to stderr.
        #[arg(long)]
        dump_xors: bool,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate answer sets, one per line.
    Enumerate {
        path: String,
        /// Override the oracle's atom cap.
        #[arg(long)]
        cap: Option<u32>,
    },
    /// Structural statistics as JSON.
    Stats { path: String },
    /// Export the Clark completion as DIMACS CNF on stdout.
    Translate {
        path: String,
        /// Append the copy-formula clauses.
        #[arg(long)]
        with_copy: bool,
    },
    /// Generate random programs; with --check, differential-test the counters.
    Fuzz {
        #[arg(long, default_value_t = 8)]
        atoms: u32,
        #[arg(long, default_value_t = 12)]
        rules: u32,
        #[arg(long, default_value_t = 0.5)]
        neg_prob: f64,
        #[arg(long, default_value_t = 0.0)]
        disj_prob: f64,
        #[arg(long, default_value_t = 0.5)]
        cycle_prob: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of programs to generate.
        #[arg(long, default_value_t = 1)]
        count: u32,
        /// Compare brute-force, exact, and filter-reference counts.
        #[arg(long)]
        check: bool,
        /// Where to write a reproducer on mismatch (default: cwd).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // keep --help/--version on exit 0, everything else is a usage error
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(cli.cmd))
}

fn read_program(path: &str) -> Result<Program, u8> {
    let text = if path == "-" {
        let mut buf = String::new();
        if let Err(e) = std::io::stdin().read_to_string(&mut buf) {
            eprintln!("error: cannot read stdin: {e}");
            return Err(EXIT_USAGE);
        }
        buf
    } else {
        match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {path}: {e}");
                return Err(EXIT_USAGE);
            }
        }
    };
    Program::parse(&text).map_err(|e| {
        eprintln!("error: {path}: {e}");
        EXIT_USAGE
    })
}

fn count_error_exit(e: &CountError) -> u8 {
    match e {
        CountError::DisjunctiveNotSupported => {
            eprintln!(
                "error: {e}; use `count --mode brute` or the `approx` subcommand for disjunctive programs"
            );
            EXIT_UNSUPPORTED
        }
        CountError::Incomplete { .. } | CountError::Oracle(_) => {
            eprintln!("error: {e}");
            EXIT_UNSUPPORTED
        }
    }
}

fn emit_result(
    result: &CountResult,
    json: bool,
    command: &str,
    input: &str,
    config: serde_json::Value,
    started: Instant,
) {
    if json {
        let report = json!({
            "tool": "aspcount",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "input": input,
            "config": config,
            "result": result,
            "wall_time_ms": started.elapsed().as_secs_f64() * 1e3,
        });
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!("{}", result.count);
    }
}

fn run(cmd: Cmd) -> u8 {
    match cmd {
        Cmd::Count {
            path,
            mode,
            budget,
            json,
        } => {
            let started = Instant::now();
            let p = match read_program(&path) {
                Ok(p) => p,
                Err(code) => return code,
            };
            let result = match mode {
                CountModeArg::Exact => count_exact(
                    &p,
                    &SearchConfig {
                        decision_budget: budget,
                        ..SearchConfig::default()
                    },
                ),
                CountModeArg::Brute => count_brute(&p),
                CountModeArg::Filter => count_filter_reference(&p),
            };
            match result {
                Ok(r) => {
                    let config = json!({"mode": format!("{mode:?}").to_lowercase(), "budget": budget});
                    emit_result(&r, json, "count", &path, config, started);
                    EXIT_OK
                }
                Err(e) => count_error_exit(&e),
            }
        }
        Cmd::Approx {
            path,
            epsilon,
            delta,
            seed,
            threads,
            dump_xors,
            json,
        } => {
            let started = Instant::now();
            let p = match read_program(&path) {
                Ok(p) => p,
                Err(code) => return code,
            };
            let cfg = match ApproxConfig::new(epsilon, delta, seed) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_USAGE;
                }
            };
            match approx_count_threaded(&p, &cfg, threads.max(1), None) {
                Ok(r) => {
                    if dump_xors {
                        if let Some(meta) = &r.approx {
                            for info in &meta.cells {
                                eprintln!("round {}: m={}", info.round, info.m);
                                let n = p.num_atoms();
                                let mut rng = round_rng(seed, info.round);
                                let xors = sample_xor_set(n, n.max(1) as usize, &mut rng);
                                for c in &xors[..info.m as usize] {
                                    let lhs: Vec<String> =
                                        c.vars.iter().map(|a| format!("x{}", a + 1)).collect();
                                    let lhs = if lhs.is_empty() {
                                        "0".to_string()
                                    } else {
                                        lhs.join(" + ")
                                    };
                                    eprintln!("{} = {}", lhs, u8::from(c.rhs));
                                }
                            }
                        }
                    }
                    if json {
                        let config = json!({
                            "epsilon": epsilon, "delta": delta, "seed": seed,
                            "thresh": cfg.thresh, "rounds": cfg.rounds, "threads": threads,
                        });
                        emit_result(&r, true, "approx", &path, config, started);
                    } else {
                        println!("{}", r.count);
                        eprintln!(
                            "epsilon={} delta={} seed={} thresh={} rounds={} mode={:?}",
                            epsilon, delta, seed, cfg.thresh, cfg.rounds, r.mode
                        );
                    }
                    EXIT_OK
                }
                Err(e) => count_error_exit(&e),
            }
        }
        Cmd::Enumerate { path, cap } => {
            let p = match read_program(&path) {
                Ok(p) => p,
                Err(code) => return code,
            };
            match enumerate_answer_sets_capped(&p, cap.unwrap_or(DEFAULT_ATOM_CAP)) {
                Ok(sets) => {
                    for m in sets {
                        println!("{}", m.display(&p));
                    }
                    EXIT_OK
                }
                Err(e @ SemanticsError::AtomCapExceeded { .. }) => {
                    eprintln!("error: {e}");
                    EXIT_UNSUPPORTED
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_UNSUPPORTED
                }
            }
        }
        Cmd::Stats { path } => {
            let p = match read_program(&path) {
                Ok(p) => p,
                Err(code) => return code,
            };
            let graph = build_dep_graph(&p);
            let scc = compute_sccs(&graph);
            let mut scc_sizes: Vec<usize> = scc.members.iter().map(|c| c.len()).collect();
            scc_sizes.sort_unstable_by(|a, b| b.cmp(a));
            let loop_names: Vec<&str> = loop_atoms(&p)
                .iter()
                .map(|&a| p.atoms.name(a))
                .collect();
            let stats = json!({
                "atoms": p.num_atoms(),
                "rules": p.rules.len(),
                "constraints": p.rules.iter().filter(|r| r.is_constraint()).count(),
                "normal": p.is_normal(),
                "disjunctive": p.is_disjunctive(),
                "tight": is_tight(&p),
                "loop_atoms": loop_names,
                "scc_sizes": scc_sizes,
            });
            println!("{}", serde_json::to_string_pretty(&stats).unwrap());
            EXIT_OK
        }
        Cmd::Translate { path, with_copy } => {
            let p = match read_program(&path) {
                Ok(p) => p,
                Err(code) => return code,
            };
            let mut f = match clark_completion(&p) {
                Ok(f) => f,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_UNSUPPORTED;
                }
            };
            let copy = if with_copy {
                let loops = loop_atoms(&p);
                match build_copy_formula(&p, &loops, &mut f.var_map) {
                    Ok(cf) => Some(cf),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return EXIT_UNSUPPORTED;
                    }
                }
            } else {
                None
            };
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            if let Err(e) = export_dimacs(&f, &p, copy.as_ref(), &mut lock) {
                eprintln!("error: write failed: {e}");
                return EXIT_USAGE;
            }
            EXIT_OK
        }
        Cmd::Fuzz {
            atoms,
            rules,
            neg_prob,
            disj_prob,
            cycle_prob,
            seed,
            count,
            check,
            out_dir,
        } => {
            let cfg = FuzzConfig {
                atoms,
                rules,
                neg_prob,
                disj_prob,
                cycle_prob,
                ..FuzzConfig::default()
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in 0..count {
                let text = gen_program_text(&cfg, &mut rng);
                if !check {
                    print!("% program {i}\n{text}");
                    continue;
                }
                let p = Program::parse(&text).expect("generator produced invalid syntax");
                match differential_check(&p) {
                    Ok(out) if !out.mismatch => {
                        println!(
                            "program {i}: ok count={} {}",
                            out.bruteforce,
                            if out.exact.is_some() {
                                "(brute = exact = filter)"
                            } else {
                                "(disjunctive, oracle self-check)"
                            }
                        );
                    }
                    Ok(out) => {
                        let dir = out_dir.unwrap_or_else(|| PathBuf::from("."));
                        let file = dir.join(format!("aspcount_mismatch_{seed}_{i}.lp"));
                        let _ = fs::write(&file, &text);
                        eprintln!(
                            "MISMATCH on program {i}: brute={} exact={:?} filter={:?}; reproducer written to {}",
                            out.bruteforce,
                            out.exact,
                            out.filter,
                            file.display()
                        );
                        return EXIT_MISMATCH;
                    }
                    Err(e) => {
                        return count_error_exit(&e);
                    }
                }
            }
            EXIT_OK
        }
    }
}
