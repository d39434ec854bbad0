//! Command-line front end: input loading, algorithm runs with optional
//! verification, random model generation and a small benchmark harness.

use std::path::PathBuf;

use simshell_core::algorithms::Algorithm;
use simshell_core::{domains, DomainError, ModelError, ParseError};

pub mod bench;
pub mod output;
pub mod run;

pub use bench::{run_bench, BenchSpec};
pub use output::{parse_machine, ParsedOutput, Section, Style};
pub use run::{load_structure, run, InputFormat, RunConfig};

/// Environment variable that lifts the size guards of the naive oracle and
/// of state-level output.
pub const GUARD_OVERRIDE_ENV: &str = "SIMSHELL_GUARD_OVERRIDE";

/// Largest state space on which the naive oracle runs by default.
pub const ORACLE_GUARD: usize = 2000;

/// Largest state space for the HHK reference, whose per-state counter
/// table takes four bytes per pair of states.
pub const COUNT_TABLE_GUARD: usize = 20_000;

/// Largest state space for which state-level pairs are printed by default.
pub const PAIR_GUARD: usize = 5000;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("output: {0}")]
    Output(#[from] std::io::Error),
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error("invalid input: {0}")]
    Model(#[from] ModelError),
    #[error("{0}")]
    Usage(String),
    #[error("{what} refused: {size} states exceed the limit of {limit} (set {GUARD_OVERRIDE_ENV}=1 to lift)")]
    Guard { what: &'static str, size: usize, limit: usize },
    #[error("shell refused: {0}")]
    Domain(#[from] DomainError),
    #[error("verification failed: {0}")]
    Mismatch(String),
    #[error("bench spec {path}: {message}")]
    BenchSpec { path: PathBuf, message: String },
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Output(_) => 1,
            CliError::Parse { .. } | CliError::Model(_) | CliError::Usage(_) | CliError::BenchSpec { .. } => 2,
            CliError::Guard { .. } | CliError::Domain(_) => 3,
            CliError::Mismatch(_) => 4,
        }
    }
}

pub(crate) fn guard_lifted() -> bool {
    std::env::var_os(GUARD_OVERRIDE_ENV).is_some_and(|v| !v.is_empty() && v != "0")
}

pub(crate) fn check_guard(what: &'static str, size: usize, limit: usize) -> Result<(), CliError> {
    if size > limit && !guard_lifted() {
        return Err(CliError::Guard { what, size, limit });
    }
    Ok(())
}

/// Refuses algorithms whose cost is impractical on `n` states.
pub(crate) fn algorithm_guard(alg: Algorithm, n: usize) -> Result<(), CliError> {
    match alg {
        Algorithm::Oracle => check_guard("naive oracle", n, ORACLE_GUARD),
        Algorithm::Hhk => check_guard("hhk counter table", n, COUNT_TABLE_GUARD),
        Algorithm::Shell => check_guard("closure shell", n, domains::MAX_STATES),
        _ => Ok(()),
    }
}
