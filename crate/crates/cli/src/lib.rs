//! Command line front end for `contactkit`.
//!
//! Every subcommand reads a [`SystemSpec`] file, runs one library
//! operation and prints a report. Exit codes: 0 when every asserted
//! identity holds, 1 when one fails, 2 on unusable input.

pub mod commands;
pub mod error;
pub mod report;
pub mod spec;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use commands::{execute, Cli, Command, Outcome};
pub use error::CliError;
pub use report::Report;
pub use spec::{EtaSpec, FieldSpec, SystemSpec};

/// Parses `args`, runs the command and writes to the given streams.
/// Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let _ = stdout.write_all(out.stdout.as_bytes());
            if out.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
