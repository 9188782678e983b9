//! The `spmiti` command line: validate inputs, compute code correlation
//! sets, run the search, benchmark it and render search trees.

pub mod args;
pub mod bench;
pub mod commands;
pub mod error;
pub mod report;

use std::io::Write;

pub use args::Cli;
pub use error::{CliError, CliResult};

use args::Command;

pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Validate(a) => commands::validate(a, out),
        Command::Prepare(a) => commands::prepare(a, out),
        Command::Optimize(a) => commands::optimize(a, out),
        Command::Bench(a) => commands::bench(a, out),
        Command::Explain(a) => commands::explain(a, out),
    }
}
