use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} amplitudes, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("decay geometry ({theta12}°, {theta13}°) is incompatible with momentum conservation")]
    Infeasible { theta12: f64, theta13: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    /// The two hypotheses predict the same outcome distribution, so no
    /// amount of data can separate them.
    #[error("q = r = {0}: the hypotheses are indistinguishable")]
    NoSeparation(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
