use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported payload: {0} bytes (only 25-byte packets have a time-on-air table)")]
    UnsupportedPayload(u32),

    #[error("SF index {0} out of range 1..={1}")]
    SfIndex(usize, usize),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge after {0} terms")]
    NonConvergence(usize),

    #[error("quadrature did not reach tolerance (estimate {estimate:e}, error {error:e})")]
    Quadrature { estimate: f64, error: f64 },

    #[error("scenario parse error: {0}")]
    Scenario(String),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field,
            reason: reason.into(),
        }
    }
}
