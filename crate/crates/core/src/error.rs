use thiserror::Error;

/// Errors raised by problem validation, domain checks and the optimisers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("`{what}` out of domain: {value}")]
    OutOfDomain { what: &'static str, value: f64 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("reference samples have zero L2 norm")]
    ZeroReferenceNorm,

    #[error("optimiser did not converge after {iterations} sweeps (best price found: {best_price})")]
    NoConvergence { best_price: f64, iterations: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
