//! Command-line front end: argument parsing, configuration, file formats and
//! the `segment`, `distance` and `benchmark` commands.

pub mod args;
pub mod commands;
pub mod config;
pub mod io;

use std::ffi::OsString;
use std::fmt;

use clap::Parser;

pub use args::{BenchmarkArgs, Cli, Command, DistanceArgs, SegmentArgs};

/// Command failure, split by exit status.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags or configuration; exit status 2.
    Usage(String),
    /// Failure while reading inputs, solving or writing outputs; exit status 1.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<geofront::Error> for CliError {
    fn from(e: geofront::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Segment(a) => commands::segment(&a),
        Command::Distance(a) => commands::distance(&a),
        Command::Benchmark(a) => commands::benchmark(&a),
    }
}

/// Parses `argv`, runs the command and returns the process exit status.
/// Messages go to stderr.
pub fn run_from<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
