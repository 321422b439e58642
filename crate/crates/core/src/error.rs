use thiserror::Error;

/// Errors produced anywhere in the simulation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The raster frame does not leave the required margin around the path.
    #[error("frame too small: {0}")]
    FrameTooSmall(String),

    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: estimate {estimate}, error bound {error}")]
    Quadrature { estimate: f64, error: f64 },

    /// A failure inside one Monte Carlo realization.
    #[error("realization {index} at r = {radius}: {source}")]
    Realization {
        index: u64,
        radius: f64,
        #[source]
        source: Box<Error>,
    },

    /// Configuration parse or validation failure, naming the offending field.
    #[error("invalid value for {field}: {message}")]
    Config { field: String, message: String },

    /// A non-finite value where finite data is required.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
