//! Command-line surface over the recognition library: artifact codecs,
//! dataset ingestion, the pipeline commands, and the evaluation harness.
//! The binary target is a thin wrapper around [`run`].

pub mod commands;
pub mod config;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod io;

pub use error::{CliError, CliResult};

use clap::Parser;

/// Applies SMASH_THREADS to the global worker pool: unset or 0 leaves the
/// automatic sizing, anything else must be a thread count.
pub fn init_thread_pool() -> CliResult<()> {
    let raw = match std::env::var("SMASH_THREADS") {
        Ok(raw) => raw,
        Err(std::env::VarError::NotPresent) => return Ok(()),
        Err(std::env::VarError::NotUnicode(_)) => {
            return Err(CliError::usage("SMASH_THREADS must be a number"))
        }
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("SMASH_THREADS must be a number, got '{raw}'")))?;
    if threads > 0 {
        // A second initialization (tests driving run() repeatedly) keeps
        // the first pool; that is fine, the sizes agree per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    Ok(())
}

/// Parses argv, runs the command, and reports the process exit code:
/// 0 success, 1 usage, 2 file I/O or format, 3 numeric.
pub fn run() -> i32 {
    let cli = match commands::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = init_thread_pool().and_then(|()| commands::run(cli)) {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    0
}
