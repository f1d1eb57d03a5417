use thiserror::Error;

use crate::spectral::SpectralResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported sampler: {0}")]
    UnsupportedSampler(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("insufficient range: {0}")]
    InsufficientRange(String),

    #[error("eigensolver did not converge (estimate {}, residual {:e})", .0.lambda1, .0.residual)]
    NotConverged(Box<SpectralResult>),

    #[error("construction failed certification: measured ratio {ratio}")]
    Certification { ratio: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
