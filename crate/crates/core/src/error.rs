use thiserror::Error;

use crate::geometry::MixedAction;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("expansion index must be a finite non-negative number, got {0}")]
    NegativeExpansion(f64),

    #[error("solver did not converge after {iterations} iterations (best objective {objective})")]
    NonConvergence {
        best: MixedAction,
        objective: f64,
        iterations: usize,
    },

    #[error("infeasible problem: {0}")]
    Infeasible(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("inner-product inequality violated: {lhs} > {rhs} + {tolerance}")]
    InequalityViolation { lhs: f64, rhs: f64, tolerance: f64 },

    #[error("payoff matrix leaves the admissible body at round {round} (distance {distance})")]
    OutsideBody { round: usize, distance: f64 },

    #[error("round {requested} is not available ({played} rounds played{detail})")]
    RoundUnavailable {
        requested: usize,
        played: usize,
        detail: &'static str,
    },

    #[error("bad config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}
