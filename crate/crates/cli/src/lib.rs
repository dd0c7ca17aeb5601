//! Configuration-driven experiments over the skew-ergodic library.

pub mod config;
pub mod record;
pub mod run;
pub mod sweep;
pub mod verify;

use skew_ergodic::error::Error;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn from_lib(field: &str, e: Error) -> CliError {
        match e {
            Error::BudgetExceeded { .. } | Error::EnumerationBudget { .. } => CliError::Budget(e.to_string()),
            other => CliError::Config(format!("{field}: {other}")),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

/// Runs `f` on a pool of `threads` workers (rayon's default when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Config("--threads: must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
