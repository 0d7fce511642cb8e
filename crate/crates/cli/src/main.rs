//! `tes`: solving, checking and constructing edge irregular total weightings.
//!
//! Summaries go to stdout as a single JSON document; certificates, tables and
//! reports are written to the files named by `--out`/`--report`.
//! Exit codes: 0 success, 1 verification failure, 2 input error,
//! 3 indeterminate result or failed construction.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tes_core::exact::DEFAULT_BUDGET;

#[derive(Parser, Debug)]
#[command(
    name = "tes",
    version,
    about = "Total edge irregularity strength toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lower bound and conjectured strength of a graph.
    Bound { graph: PathBuf },
    /// Exact strength by branch and bound, with a certificate.
    Exact {
        graph: PathBuf,
        /// Search nodes allowed per strength level.
        #[arg(long, env = "TES_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Certificate file (weighting JSON).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks a weighting file against a graph.
    Verify { graph: PathBuf, weighting: PathBuf },
    /// Builds a verified total weighting of conjectured strength.
    Construct {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = EpsModeArg::Auto)]
        eps_mode: EpsModeArg,
        /// Explicit large-degree threshold fraction; overrides --eps-mode.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 50)]
        max_resamples: usize,
        /// Graphs with at most this many edges are solved exactly.
        #[arg(long, default_value_t = 20)]
        exact_threshold: usize,
        #[arg(long, env = "TES_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Certificate file (weighting JSON).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Diagnostics file (JSON).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Checks the tripartition conditions and builds the guarding set.
    Lemma {
        graph: PathBuf,
        /// JSON object with vertex lists `a1`, `a2`, `c`.
        partition: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact strength against the conjectured value on all small labeled graphs.
    Corpus {
        #[arg(long, default_value_t = 5)]
        max_vertices: usize,
        #[arg(long, env = "TES_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// CSV file, one row per graph.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recomputes the slack, polynomial and threshold tables and the failure bound.
    Appendix {
        #[arg(long, value_enum, ignore_case = true)]
        which: Which,
        #[arg(long, value_enum, default_value_t = ModeArg::Main)]
        eps_mode: ModeArg,
        /// CSV file for the table forms.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes a generated graph as an edge list.
    Generate {
        #[arg(value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        cap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Auto,
    Case4,
    Exact,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum EpsModeArg {
    Auto,
    Main,
    SmallDegree,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Main,
    SmallDegree,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Which {
    A,
    B,
    Delta,
    Azuma,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    /// Complete graph on `n` vertices.
    Complete,
    /// Star with `n` leaves.
    Star,
    /// Path on `n` vertices.
    Path,
    /// Uniform random graph with `n` vertices and `m` edges.
    Gnm,
    /// Random graph with `m` edges and maximum degree at most `cap`.
    CappedDegree,
    /// Random recursive tree on `n` vertices.
    Tree,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(summary) => {
            output::print_json(&summary.body);
            ExitCode::from(summary.code)
        }
        Err(err) => {
            eprintln!("tes: {}", err.message);
            output::print_json(&serde_json::json!({
                "status": "error",
                "kind": err.kind,
                "message": err.message,
            }));
            ExitCode::from(err.code)
        }
    }
}
