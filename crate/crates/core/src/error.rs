use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The dipole length makes the input-current reference vanish (sin(kl/2) = 0).
    #[error("degenerate current reference: sin(kl/2) = {0:e}")]
    DegenerateReference(f64),

    #[error("argument error: {0}")]
    Argument(String),

    /// Singular system or non-convergent iteration.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The configuration violates a physical constraint (non-passive port, indefinite resistance).
    #[error("constraint violation: {0}")]
    Constraint(String),

    #[error("could not draw {required} feasible genomes after {attempts} attempts ({accepted} accepted)")]
    Initialization {
        required: usize,
        accepted: usize,
        attempts: usize,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
