use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad argument, incompatible kinds, or violated precondition.
    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("window literal `{literal}`: {reason}")]
    Literal { literal: String, reason: String },

    /// The requested computation exceeds the configured budget.
    #[error("resource limit: {what} needs about {needed} elements (limit {limit}); {advice}")]
    Resource {
        what: &'static str,
        needed: u64,
        limit: u64,
        advice: &'static str,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Phase information too sparse for a trustworthy inversion; carries
    /// the indicator obtained from the known phases anyway.
    #[error("reconstruction failed: {reason}")]
    Reconstruction { reason: String, partial: Vec<u8> },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
