//! Error type shared across the solver.

use std::fmt;

/// Failure modes of a run. `Config` maps to exit code 2, the others to 3.
#[derive(Debug)]
pub enum SolverError {
    Config(String),
    /// Numerical breakdown (NaN, runaway wave speed, vanishing time step).
    Numerical { what: String, cell: Option<(isize, isize)>, t: f64 },
    Io(std::io::Error),
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::Config(msg) => write!(f, "config error: {msg}"),
            SolverError::Numerical { what, cell, t } => {
                write!(f, "numerical failure at t={t}: {what}")?;
                if let Some((i, j)) = cell {
                    write!(f, " (cell {i},{j})")?;
                }
                Ok(())
            }
            SolverError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for SolverError {}

impl From<std::io::Error> for SolverError {
    fn from(e: std::io::Error) -> Self {
        SolverError::Io(e)
    }
}

impl SolverError {
    pub fn numerical(what: impl Into<String>, cell: Option<(isize, isize)>, t: f64) -> Self {
        SolverError::Numerical { what: what.into(), cell, t }
    }

    /// Process exit code for the CLI, per the run contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            SolverError::Config(_) => 2,
            _ => 3,
        }
    }
}
