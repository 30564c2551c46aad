//! Command-line front end: ingestion, subcommand dispatch and report emission.

pub mod args;
pub mod commands;
pub mod inputs;
pub mod report;

use std::fmt;

use emcomm_core::Error;

/// A referenced file is missing or malformed.
#[derive(Debug)]
pub struct InputFailure(pub String);

impl fmt::Display for InputFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputFailure {}

/// A verdict differed from `--expect`.
#[derive(Debug)]
pub struct ExpectationFailed(pub String);

impl fmt::Display for ExpectationFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ExpectationFailed {}

pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Exit status for a failed run.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<InputFailure>().is_some() {
        return EXIT_INPUT;
    }
    if let Some(Error::BudgetExceeded { .. }) = err.downcast_ref::<Error>() {
        return EXIT_BUDGET;
    }
    EXIT_MISMATCH
}

pub fn run(cli: args::Cli) -> anyhow::Result<()> {
    use args::Command;
    let global = &cli.global;
    match cli.command {
        Command::Analyze {
            data,
            game,
            metrics,
            epsilon0,
        } => commands::analyze::run(global, &data, &game, &metrics, epsilon0),
        Command::Metrics { data, metrics } => commands::metrics::run(global, &data, &metrics),
        Command::Verify(v) => commands::verify::run(global, &v),
        Command::Optimize(o) => commands::optimize::run(global, &o),
        Command::Counterexample { which, expect } => commands::counterexample::run(global, which, expect),
    }
}
