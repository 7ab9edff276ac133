use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violates the validity conditions of a measurement
    /// specification or of an operation's precondition.
    #[error("{name} out of range: {reason}")]
    OutOfRange { name: &'static str, reason: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("no inflection point: {0}")]
    NoInflection(String),

    #[error("curvature sign pattern matches no known shape: {0}")]
    Unclassifiable(String),

    #[error("finite difference did not converge: levels {coarse} and {fine} differ by {rel_diff:e} (relative)")]
    FiniteDifference { coarse: f64, fine: f64, rel_diff: f64 },

    #[error("too few Monte Carlo samples: {given} (minimum {minimum})")]
    TooFewSamples { given: usize, minimum: usize },

    #[error("invalid identity request: {0}")]
    InvalidIdentity(String),

    #[error("state is not normalized: squared norm {0}")]
    NotNormalized(f64),
}

impl Error {
    pub(crate) fn out_of_range(name: &'static str, reason: impl Into<String>) -> Self {
        Error::OutOfRange {
            name,
            reason: reason.into(),
        }
    }
}
