//! `krein`: hermitian indices, decompositions, factorizations, congruence
//! and Phillips extensions for matrices read from JSON files.

mod commands;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use krein_core::{Error, Tolerance};

/// Exit statuses.
const EXIT_VIOLATION: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "krein",
    version,
    about = "Selfadjoint operators on finite-dimensional Krein spaces"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Relative threshold below which singular values and eigenvalues count as zero.
    #[arg(long, global = true, value_name = "TOL")]
    tol_rank: Option<f64>,
    /// Relative bound for residual checks.
    #[arg(long, global = true, value_name = "TOL")]
    tol_res: Option<f64>,
    /// Print a single JSON document instead of text.
    #[arg(long, global = true)]
    machine: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Hermitian indices (h+, h-, h0) and the indices of the space.
    Indices {
        #[arg(short, long, value_name = "FILE")]
        input: PathBuf,
    },
    /// Spectral decomposition into strictly positive, strictly negative and
    /// kernel parts, with projections and the validation table.
    Decompose {
        #[arg(short, long, value_name = "FILE")]
        input: PathBuf,
    },
    /// Factorization C = AA* with an injective factor.
    Factorize {
        #[arg(short, long, value_name = "FILE")]
        input: PathBuf,
        /// Directory receiving space.json, factor.json and report.json.
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
    },
    /// Congruence test between two selfadjoint operators of equal dimension.
    Congruent {
        #[arg(short, long, value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        other: PathBuf,
    },
    /// Extends a nonnegative/nonpositive orthogonal pair to a maximal pair.
    Phillips {
        /// File holding {"J": matrix}.
        #[arg(long, value_name = "FILE")]
        space: PathBuf,
        /// Matrix whose columns span the nonnegative subspace.
        #[arg(long, value_name = "FILE")]
        plus: PathBuf,
        /// Matrix whose columns span the nonpositive subspace.
        #[arg(long, value_name = "FILE")]
        minus: PathBuf,
        /// Directory receiving angle.json, plus.json and minus.json.
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
    },
    /// Seeded battery of invariant checks on random instances.
    PropertySuite {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 8)]
        max_dim: usize,
        #[arg(long, env = "KREIN_SEED", default_value_t = 0)]
        seed: u64,
        /// Run cases on one thread.
        #[arg(long)]
        serial: bool,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

impl Global {
    fn tolerance(&self, base: Tolerance) -> Result<Tolerance, Error> {
        Tolerance::new(
            self.tol_rank.unwrap_or(base.rank_tol),
            self.tol_res.unwrap_or(base.residual_tol),
        )
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_precondition() {
        EXIT_PRECONDITION
    } else {
        EXIT_INPUT
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    match commands::run(&cli.command, &cli.global) {
        Ok(out) => {
            let text = if cli.global.machine {
                serde_json::to_string_pretty(&out.machine).expect("report serializes") + "\n"
            } else {
                out.human
            };
            // a closed pipe downstream is not an error of ours
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            if out.violated {
                ExitCode::from(EXIT_VIOLATION)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            if cli.global.machine {
                let doc = serde_json::json!({
                    "schema_version": commands::SCHEMA_VERSION,
                    "error": e.to_string(),
                    "precondition": e.is_precondition(),
                });
                println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
            }
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
