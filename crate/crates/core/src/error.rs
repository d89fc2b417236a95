use thiserror::Error;

/// Errors raised by the construction, analysis and measurement routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested accuracy cannot be certified with the available input.
    #[error("precision error: {message} (best achievable bound {achievable:e})")]
    Precision { message: String, achievable: f64 },

    /// The request would exceed a configured resource limit.
    #[error("resource limit: {0}")]
    Resource(String),

    /// The operation has no defined answer for this parameter region.
    #[error("unsupported parameter region: {0}")]
    UnsupportedRegion(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of numerical accuracy rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Precision { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
