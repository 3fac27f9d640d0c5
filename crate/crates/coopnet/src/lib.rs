//! Command-line driver for `coopnet-core`: grids, config files, parallel
//! Monte Carlo and CSV output.

pub mod cli;
pub mod config;
pub mod error;
pub mod grid;
pub mod output;
pub mod run;
pub mod validate;

use std::fs::File;
use std::io::{self, BufWriter, Write};

pub use error::{CliError, Result};

use cli::{Command, Kind};

/// Resolves and executes one command.
pub fn execute(command: &Command) -> Result<()> {
    let spec = command.resolve()?;
    let pool = run::thread_pool()?;
    if spec.kind == Kind::Validate {
        let checks = pool.install(|| validate::run_checks(&spec));
        let mut out = io::stdout().lock();
        for c in &checks {
            writeln!(out, "{}", c.line())?;
        }
        let failed = checks.iter().filter(|c| !c.passed).count();
        return if failed == 0 { Ok(()) } else { Err(CliError::Validation { failed }) };
    }
    let rows = pool.install(|| run::rows(&spec))?;
    match &spec.output {
        Some(path) => output::write_csv(BufWriter::new(File::create(path)?), &rows, spec.timing),
        None => output::write_csv(io::stdout().lock(), &rows, spec.timing),
    }
}
