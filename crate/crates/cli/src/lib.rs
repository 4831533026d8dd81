//! Library half of the `parrondo` binary: spec-file parsing and the three
//! subcommands, kept out of `main.rs` so integration tests can drive them.

pub mod commands;
pub mod csv;
pub mod spec;
pub mod verify;

use thiserror::Error;

/// Every way a command can end other than success. Each maps to a fixed exit code.
#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Property(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    NonConvergence(String),
    #[error("all {0} cells failed")]
    AllCellsFailed(usize),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Property(_) => 1,
            Failure::Input(_) => 2,
            Failure::NonConvergence(_) => 3,
            Failure::AllCellsFailed(_) => 4,
        }
    }
}

impl From<parrondo_core::Error> for Failure {
    fn from(e: parrondo_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(format!("i/o: {e}"))
    }
}

/// Installs the global rayon pool, sized by `PARRONDO_THREADS` when set.
pub fn init_thread_pool() -> Result<(), Failure> {
    let Ok(v) = std::env::var("PARRONDO_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Input(format!("PARRONDO_THREADS must be a positive integer, got {v:?}")))?;
    // A second call (tests in one process) finds the pool already built; that is fine.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
