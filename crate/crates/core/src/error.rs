use thiserror::Error;

use crate::gaussian::EntropyResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the geometric, spectral and verification routines.
///
/// The `Display` form of each variant starts with a stable kebab-case tag
/// (`degenerate-curve`, `invalid-time`, ...) that the CLI and tests match on.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid-curve: {0}")]
    InvalidCurve(String),

    #[error("invalid-field: {0}")]
    InvalidField(String),

    #[error("degenerate-curve: total length {0:e}")]
    DegenerateCurve(f64),

    #[error("invalid-time: t = {0} (must be negative)")]
    InvalidTime(f64),

    #[error("invalid-scale: s = {0} (must be positive)")]
    InvalidScale(f64),

    #[error("invalid-radius: r = {0} (must be positive)")]
    InvalidRadius(f64),

    #[error("invalid-argument: {0}")]
    InvalidArgument(String),

    #[error("grid-mismatch: expected {expected} samples, found {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("singular-projection: projected tangent vanishes at index {index}")]
    SingularProjection { index: usize },

    #[error("cfl-violation: dt = {dt:e} exceeds explicit limit {limit:e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("extinct: curve length {length:e} below extinction threshold")]
    Extinct { length: f64 },

    #[error("invalid-multiplicity: {0} is not one of the frequencies")]
    InvalidMultiplicity(u32),

    #[error("no-graph-deviation: a single-frequency torus curve is an exact shrinking circle")]
    NoGraphDeviation,

    #[error("no-graph-correspondence: expected winding {expected}, found {found}")]
    NoGraphCorrespondence { expected: i64, found: i64 },

    #[error("not-a-graph: {0}")]
    NotAGraph(String),

    #[error("rank-deficient: field {index} is J_t-dependent on its predecessors")]
    RankDeficient { index: usize },

    #[error("orthogonality-violated: residual inner products {residuals:?}")]
    NotOrthogonal { residuals: Vec<f64> },

    #[error("under-resolved: refinement disagreement {disagreement:.3e} exceeds 10%")]
    UnderResolved { disagreement: f64 },

    #[error("eigensolver-failure: {0}")]
    Eigensolver(String),

    #[error("entropy-not-converged: best value so far {}", .0.value)]
    EntropyNotConverged(Box<EntropyResult>),

    #[error("insufficient-samples: {found} samples, at least {required} required")]
    InsufficientSamples { found: usize, required: usize },

    #[error("step failed at time {time}: {source}")]
    StepFailed {
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("graph-lost: correspondence lost after tau = {tau}: {source}")]
    GraphLost {
        tau: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable tag naming the error kind.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::InvalidCurve(_) => "invalid-curve",
            Error::InvalidField(_) => "invalid-field",
            Error::DegenerateCurve(_) => "degenerate-curve",
            Error::InvalidTime(_) => "invalid-time",
            Error::InvalidScale(_) => "invalid-scale",
            Error::InvalidRadius(_) => "invalid-radius",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::GridMismatch { .. } => "grid-mismatch",
            Error::SingularProjection { .. } => "singular-projection",
            Error::CflViolation { .. } => "cfl-violation",
            Error::Extinct { .. } => "extinct",
            Error::InvalidMultiplicity(_) => "invalid-multiplicity",
            Error::NoGraphDeviation => "no-graph-deviation",
            Error::NoGraphCorrespondence { .. } => "no-graph-correspondence",
            Error::NotAGraph(_) => "not-a-graph",
            Error::RankDeficient { .. } => "rank-deficient",
            Error::NotOrthogonal { .. } => "orthogonality-violated",
            Error::UnderResolved { .. } => "under-resolved",
            Error::Eigensolver(_) => "eigensolver-failure",
            Error::EntropyNotConverged(_) => "entropy-not-converged",
            Error::InsufficientSamples { .. } => "insufficient-samples",
            Error::StepFailed { source, .. } => source.tag(),
            Error::GraphLost { .. } => "graph-lost",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t < 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTime(t))
    }
}
