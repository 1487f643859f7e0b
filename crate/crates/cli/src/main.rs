//! Command-line front end for measuring consensus.
//!
//! Parses ballot or tally input and a measurement policy, runs the
//! library, and emits a structured result document on stdout with
//! diagnostics on stderr. The exit status encodes the outcome: 0 for a
//! consensus (accepted), 1 for rejection, 2 for a negative result, 3 for a
//! null result, 64 for usage errors, and 65 for malformed input.

use clap::Parser;

mod ballots;
mod commands;
mod document;
mod policy;

/// Command failures, split by exit status.
#[derive(Debug)]
pub enum CliError {
    /// Command-line misuse: exit 64.
    Usage(String),
    /// Malformed input or inconsistent counts: exit 65.
    Data(String),
}

impl CliError {
    /// Reclassify as a usage error; flag values are usage problems even
    /// where the same check on a config file is a data problem.
    pub fn into_usage(self) -> CliError {
        match self {
            CliError::Usage(message) | CliError::Data(message) => CliError::Usage(message),
        }
    }
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match commands::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version print to stdout and exit 0
            let code = if err.use_stderr() { 64 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match commands::dispatch(cli) {
        Ok(doc) => {
            print!("{}", doc.render());
            document::exit_code(&doc.outcome)
        }
        Err(CliError::Usage(message)) => {
            eprintln!("usage error: {message}");
            64
        }
        Err(CliError::Data(message)) => {
            eprintln!("error: {message}");
            65
        }
    }
}
