//! Command-line front end for `qflow-core`.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;
pub mod report;
pub mod spec_doc;

pub use args::{Cli, Command};
pub use error::{CliError, CliResult};

/// Runs one parsed invocation.
pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Solve(a) => commands::solve(&a),
        Command::Reproduce(a) => commands::reproduce(&a),
        Command::PmLadder(a) => commands::pm_ladder(&a),
        Command::Norms(a) => commands::norms(&a),
        Command::Growth(a) => commands::growth(&a),
        Command::Confluence(a) => commands::confluence(&a),
    }
}
