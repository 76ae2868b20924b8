//! Command-line harness around `pyp_means`: argument parsing, run records
//! and parameter sweeps. The `pyp` binary is a thin wrapper over [`main_with_args`].

pub mod args;
pub mod commands;
pub mod record;
pub mod sweep;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}

use std::ffi::OsString;

use anyhow::{Context, Result};
use clap::Parser;

use crate::args::{Cli, Command};

/// How a successful command ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Converged,
    /// The fit hit its iteration limit.
    NotConverged,
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT_ERROR: u8 = 1;
pub const EXIT_NOT_CONVERGED: u8 = 2;

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Cluster(a) => commands::cluster(a),
        Command::Spectral(a) => commands::spectral(a),
        Command::Urn(a) => commands::urn(a),
        Command::Datagen(a) => commands::datagen(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Sweep(a) => commands::sweep(a),
    }
}

/// Sizes the global rayon pool from `PYP_THREADS` (unset: all cores).
pub fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("PYP_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("PYP_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")
}

/// Parses `args`, runs the command and maps the result to an exit code:
/// 0 converged, 1 bad input or flags, 2 no convergence.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT_ERROR } else { EXIT_OK };
        }
    };
    let result = init_threads().and_then(|()| run(&cli));
    match result {
        Ok(Outcome::Converged) => EXIT_OK,
        Ok(Outcome::NotConverged) => {
            eprintln!("warning: iteration limit reached before convergence");
            EXIT_NOT_CONVERGED
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_INPUT_ERROR
        }
    }
}
