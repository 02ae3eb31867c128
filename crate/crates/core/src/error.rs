use thiserror::Error;

/// Errors raised by the analysis engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("head probability must lie in (0, 1], got {0}")]
    InvalidProbability(String),

    #[error("starting count must be at least 1, got {0}")]
    InvalidCount(u64),

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),

    #[error("coin set must contain at least one coin")]
    EmptyCoinSet,

    #[error("coin values must be nonzero")]
    ZeroCoin,

    #[error("increment enumeration supports at most {max} coins, got {got}")]
    TooManyCoins { got: usize, max: usize },

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("remaining count {remaining} must lie in 1..={initial}")]
    InvalidRemaining { remaining: u64, initial: u64 },

    #[error("rate parameter must be positive and finite, got {0}")]
    InvalidRate(f64),

    #[error("run count must be at least 1")]
    NoRuns,

    #[error("invalid fit input: {0}")]
    InvalidFitInput(String),

    #[error("correlation undefined for a constant sequence")]
    ConstantSequence,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
