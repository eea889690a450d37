use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside its physical domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("slit index {index} out of range 1..={n}")]
    SlitIndex { index: usize, n: usize },

    /// The pair state factorizes, so slit conditioning carries no correlation.
    #[error("singular configuration: {0}")]
    Singular(String),

    #[error("regime violation: {0}")]
    Regime(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid detector: {0}")]
    InvalidDetector(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("extraction error: {0}")]
    Extraction(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("state escaped the padded domain: {0}")]
    Escaped(String),

    #[error("incompatible domains: {0}")]
    IncompatibleDomain(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
