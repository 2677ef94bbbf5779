use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid bounds: lower={lower}, upper={upper} (need 0 < lower < upper)")]
    InvalidBounds { lower: f64, upper: f64 },

    #[error("invalid mesh point count {0}: need at least 6 points and count % 5 == 1")]
    InvalidCount(usize),

    #[error("grid functions are defined on different meshes")]
    MeshMismatch,

    #[error("grid function has {got} values but the mesh has {expected} points")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value at mesh index {0}")]
    NonFinite(usize),

    #[error("point {y} lies outside [{lower}, {upper}]")]
    OutOfRange { y: f64, lower: f64, upper: f64 },

    #[error("model assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("particular solution series did not converge after {terms} terms (relative tail {tail:e})")]
    NoConvergence { terms: usize, tail: f64 },

    #[error("particular solution is not positive at y={y}")]
    NotPositive { y: f64 },

    #[error("direct formula requested for order {0}; the maximum is 8")]
    OrderTooLarge(usize),

    #[error("eigenfunction {n} violates the right boundary condition (relative residual {residual:e})")]
    BoundaryViolation { n: usize, residual: f64 },

    #[error("vega is undefined because sigma'(y0) = 0")]
    VegaUndefined,

    #[error("contribution band {n1}..={n2} is outside the retained range 1..={available}")]
    BandOutOfRange { n1: usize, n2: usize, available: usize },

    #[error("finite-difference solution unstable: |v| = {value:e} exceeds {bound:e}")]
    Instability { value: f64, bound: f64 },

    #[error("invalid contract: {0}")]
    InvalidContract(String),

    #[error("invalid config field `{field}`: {reason}")]
    ConfigInvalid { field: String, reason: String },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Tags an error with the pipeline stage that raised it.
    pub fn in_stage(self, stage: &'static str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage { stage, source: Box::new(e) },
        }
    }

    /// Strips stage tags.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::ConfigInvalid { field: field.into(), reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
