use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = JcmError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum JcmError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("index {index} outside the ladder 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("truncation at n_max = {n_max} leaves tail mass {tail:e} (limit {limit:e})")]
    Truncation { n_max: usize, tail: f64, limit: f64 },

    #[error("state populates the dark sector |0>|-> with probability {probability:e}; it lies outside the (a_n, b_n) ladder")]
    UnsupportedSector { probability: f64 },

    #[error("{what} is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { what: &'static str, norm_sqr: f64 },

    #[error("{0} is undefined for this state")]
    UndefinedObservable(&'static str),

    #[error("ODE integration failed at t = {t}: {message} ({accepted} accepted / {rejected} rejected steps, {evaluations} evaluations)")]
    Integrator {
        t: f64,
        message: String,
        accepted: u32,
        rejected: u32,
        evaluations: u32,
    },

    #[error("unknown figure preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
}

impl JcmError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        JcmError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
