use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),

    #[error("rate {name} must be positive and finite, got {value}")]
    InvalidRate { name: &'static str, value: f64 },

    #[error(
        "inadmissible rates: min(beta, gamma) = {min} exceeds 2*alpha = {two_alpha} \
         (rate assumption requires min(beta, gamma) <= 2*alpha)"
    )]
    InadmissibleRates { min: f64, two_alpha: f64 },

    #[error("invalid level schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid family parameters: {0}")]
    InvalidFamily(String),

    #[error("plan does not match family: {0}")]
    PlanMismatch(String),

    #[error("sample allocation overflow at level {level}")]
    AllocationOverflow { level: usize },

    #[error("epsilon grid must be non-empty, positive and strictly decreasing")]
    InvalidGrid,

    #[error("nu must be positive and finite, got {0}")]
    InvalidNu(f64),

    #[error("UI probe point must exceed 1, got {0}")]
    InvalidProbePoint(f64),

    #[error("no tolerance places exactly {samples} samples on finest level {target}")]
    NoWitnessTolerance { target: usize, samples: u64 },

    #[error("empty sample")]
    EmptySample,

    #[error("sample contains a non-finite value at index {0}")]
    NonFiniteSample(usize),

    #[error("probability must lie strictly inside (0, 1), got {0}")]
    InvalidProbability(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
