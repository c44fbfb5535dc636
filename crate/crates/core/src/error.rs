use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("vector is not normalized: norm {norm}")]
    Normalization { norm: f64 },

    #[error("invalid {kind}: {detail}")]
    Invalid { kind: &'static str, detail: String },

    #[error("index {index} out of range for a set of {len} states")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("superposition amplitudes alpha and beta are both zero")]
    ZeroAmplitudes,

    #[error("no density-matrix fixed point found within tolerance (residual {residual:e})")]
    NoFixedPointNumerical { residual: f64 },

    #[error("fixed point is not unique: eigenvalue-1 space has dimension {dim}")]
    NonUniqueFixedPoint { dim: usize },

    #[error("no U_{k} satisfying the overlap condition after {attempts} attempts")]
    Condition2Exhausted { k: usize, attempts: usize },

    #[error("degenerate superposition for pair ({i}, {j}): normalizer {gamma:e} below threshold")]
    DegenerateSuperposition { i: usize, j: usize, gamma: f64 },

    #[error("ancilla state is not pure: second eigenvalue {second:e}")]
    PurityLoss { second: f64 },
}

/// How an error should be surfaced to a caller that only sees exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input: malformed or invalid configuration.
    Validation,
    /// The protocol itself refused: degenerate target, non-unique fixed point.
    Protocol,
    /// Numerical breakdown that valid inputs should never trigger.
    Internal,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Dimension(_)
            | Error::Normalization { .. }
            | Error::Invalid { .. }
            | Error::IndexOutOfRange { .. }
            | Error::ZeroAmplitudes => ErrorClass::Validation,
            Error::NonUniqueFixedPoint { .. }
            | Error::Condition2Exhausted { .. }
            | Error::DegenerateSuperposition { .. } => ErrorClass::Protocol,
            Error::NoFixedPointNumerical { .. } | Error::PurityLoss { .. } => ErrorClass::Internal,
        }
    }

    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "DimensionError",
            Error::Normalization { .. } => "NormalizationError",
            Error::Invalid { .. } => "ValidationError",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::ZeroAmplitudes => "ZeroAmplitudes",
            Error::NoFixedPointNumerical { .. } => "NoFixedPointNumerical",
            Error::NonUniqueFixedPoint { .. } => "NonUniqueFixedPoint",
            Error::Condition2Exhausted { .. } => "Condition2Exhausted",
            Error::DegenerateSuperposition { .. } => "DegenerateSuperposition",
            Error::PurityLoss { .. } => "PurityLoss",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
