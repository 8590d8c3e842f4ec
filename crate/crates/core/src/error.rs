use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("capacity exceeded: {what} width {width} is above the limit of {limit}")]
    Capacity {
        what: &'static str,
        width: usize,
        limit: usize,
    },

    #[error("invalid {field}: {reason}")]
    Validation { field: &'static str, reason: String },

    #[error("unsupported gate {gate}: run decompose first")]
    UnsupportedGate { gate: String },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field,
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Capacity { .. } => "capacity",
            Error::Validation { .. } => "validation",
            Error::UnsupportedGate { .. } => "unsupported-gate",
        }
    }
}
