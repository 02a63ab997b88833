//! Scenario-driven risk evaluation at the command line.
//!
//! Four commands: `eval` applies one operator to the claims of a scenario
//! document, `robust` takes the supremum over the scenario's model family,
//! `verify` runs the randomized property suites, and `reproduce` re-runs
//! packaged examples against their expected numbers.
//!
//! Exit codes are stable: 0 success, 2 input validation, 3 solver or
//! numerical failure, 4 unknown example id. Reports go to stdout,
//! diagnostics to stderr.

mod ops;
mod registry;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "riskmeter",
    version,
    about = "Risk measures under model uncertainty on finite scenario spaces"
)]
struct Cli {
    /// Engine worker threads; 1 keeps every computation on the calling thread
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Emit the report as a JSON document instead of a table
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Op {
    /// Dual supremum over the whole penalty domain
    Rho,
    /// Supremum restricted to weightings dominated by the reference
    RhoHat,
    /// Infimum over payoff versions free on reference-null atoms
    RhoP,
    /// Swapped order: restriction applied before the supremum
    RhoTilde,
    /// Restricted value, version value, and their difference
    Gap,
    /// Cheapest pathwise dominance in the scenario market
    Superhedge,
    /// Average of the worst tail at level lambda
    Es,
    /// Smallest cash addition at quantile level lambda
    Var,
    /// Negative infimum over charged scenarios, shifted by a
    Worst,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one operator on the scenario's claims
    Eval {
        /// Scenario document (JSON)
        #[arg(long)]
        scenario: PathBuf,
        /// Single claim to evaluate; default is every claim in the document
        #[arg(long)]
        claim: Option<String>,
        #[arg(long, value_enum, default_value_t = Op::RhoHat)]
        op: Op,
        /// Level for the tail operators (es, var)
        #[arg(long)]
        lambda: Option<f64>,
        /// Cash shift for the worst-case operator
        #[arg(long, default_value_t = 0.0)]
        a: f64,
    },
    /// Supremum of the operator over the scenario's model family
    Robust {
        #[arg(long)]
        scenario: PathBuf,
        /// Single claim to evaluate; default is every claim in the document
        #[arg(long)]
        claim: Option<String>,
        /// Operator the supremum ranges over (rho_hat or rho_p)
        #[arg(long, value_enum, default_value_t = Op::RhoHat)]
        op: Op,
        /// Check the single-measure representation against this named measure
        #[arg(long)]
        classical: Option<String>,
    },
    /// Run the randomized verification suites and summarize their ledgers
    Verify {
        /// Instances per suite (the grid-scan suite caps itself at 50)
        #[arg(long, default_value_t = 200)]
        instances: usize,
        /// Campaign seed; the RISKMETER_SEED variable takes precedence
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Re-run a packaged example and compare against its expected numbers
    Reproduce {
        /// Example id; omit to run the whole registry
        id: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs == 0 {
        eprintln!("riskmeter: --jobs must be at least 1");
        return ExitCode::from(2);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
        eprintln!("riskmeter: thread pool: {e}");
        return ExitCode::from(3);
    }
    let out = match &cli.command {
        Command::Eval { scenario, claim, op, lambda, a } => {
            ops::eval(scenario, claim.as_deref(), *op, *lambda, *a)
        }
        Command::Robust { scenario, claim, op, classical } => {
            ops::robust_family(scenario, claim.as_deref(), *op, classical.as_deref())
        }
        Command::Verify { instances, seed } => ops::verify(*instances, *seed),
        Command::Reproduce { id } => registry::reproduce(id.as_deref()),
    };
    match out {
        Ok(report) => {
            report.emit(cli.json);
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("riskmeter: {e}");
            ExitCode::from(e.code())
        }
    }
}
