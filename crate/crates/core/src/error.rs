use thiserror::Error;

/// Errors produced by the model, search and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid hypothesis: {0}")]
    InvalidHypothesis(String),

    #[error("invalid subset: {0}")]
    InvalidSubset(String),

    #[error("rank {rank} out of range for C({n},{m}) = {total}")]
    RankOutOfRange { rank: u64, n: usize, m: usize, total: u64 },

    #[error("config mismatch: {0}")]
    ConfigMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("enumeration guard exceeded: {what} needs {needed} > cap {cap}")]
    GuardExceeded { what: String, needed: String, cap: u64 },

    #[error("unsupported divergence: {0}")]
    UnsupportedDivergence(String),

    #[error("degenerate hypothesis space: |Y| = 1, the Fano floor is undefined")]
    DegenerateSpace,

    #[error("missing sub-Gaussian parameters for sigma mode")]
    MissingSigma,

    #[error("invalid threshold parameters: {0}")]
    InvalidParams(String),

    #[error("preset {preset} inconsistent with config: {reason}")]
    PresetMismatch { preset: String, reason: String },

    #[error("unknown lemma id `{0}`")]
    UnknownLemma(String),

    #[error("no event to test: hypothesis equals the truth")]
    NoEvent,

    #[error("invalid tail check: {0}")]
    InvalidTailCheck(String),

    #[error("malformed grid: {0}")]
    MalformedGrid(String),

    #[error("identity violated: {0}")]
    IdentityViolation(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag, used in CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidConfig(_) => "invalid_config",
            Error::InvalidDistribution(_) => "invalid_distribution",
            Error::InvalidHypothesis(_) => "invalid_hypothesis",
            Error::InvalidSubset(_) => "invalid_subset",
            Error::RankOutOfRange { .. } => "rank_out_of_range",
            Error::ConfigMismatch(_) => "config_mismatch",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::GuardExceeded { .. } => "guard_exceeded",
            Error::UnsupportedDivergence(_) => "unsupported_divergence",
            Error::DegenerateSpace => "degenerate_space",
            Error::MissingSigma => "missing_sigma",
            Error::InvalidParams(_) => "invalid_params",
            Error::PresetMismatch { .. } => "preset_mismatch",
            Error::UnknownLemma(_) => "unknown_lemma",
            Error::NoEvent => "no_event",
            Error::InvalidTailCheck(_) => "invalid_tail_check",
            Error::MalformedGrid(_) => "malformed_grid",
            Error::IdentityViolation(_) => "identity_violation",
            Error::Format(_) => "format",
            Error::Io(_) => "io",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
