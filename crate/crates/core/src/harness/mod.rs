//! Command-line orchestration: argument parsing, experiment runs, table output.

pub mod cli;
pub mod figure1;
pub mod output;
pub mod validate;

use std::ffi::OsString;

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Io(_) => EXIT_IO,
        Error::Config(_) | Error::Domain(_) | Error::UnsupportedBoundary(_) => EXIT_USAGE,
        Error::Range(_) | Error::Numerical { .. } | Error::Degenerate(_) => EXIT_FAILURE,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    cli::run(args)
}
