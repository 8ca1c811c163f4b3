use thiserror::Error;

/// Failure modes shared by every layer of the pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A value needed as a divisor is indistinguishable from zero at its precision.
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("not Hensel liftable: {0}")]
    NotHenselLiftable(String),
    /// The truncated series cannot certify the requested quantity.
    #[error("inconclusive truncation: {0}")]
    InconclusiveTruncation(String),
    #[error("transversality failure: {0}")]
    TransversalityFailure(String),
    #[error("decomposition failure: {0}")]
    DecompositionFailure(String),
    #[error("torsion generator: {0}")]
    TorsionGenerator(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("configuration error in `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn precision(what: impl Into<String>) -> Self {
        Error::PrecisionLoss(what.into())
    }

    /// Failures that a higher working precision may cure.
    pub fn is_precision_related(&self) -> bool {
        matches!(
            self,
            Error::PrecisionLoss(_) | Error::InconclusiveTruncation(_) | Error::NotHenselLiftable(_)
        )
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
