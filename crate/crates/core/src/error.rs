use thiserror::Error;

/// Errors raised by the geometry and metric routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point is not in the interior of the body")]
    NotInterior,

    #[error("direction must be nonzero")]
    ZeroDirection,

    #[error("affine map has a singular linear part")]
    SingularMap,

    #[error("body is not properly convex (contains a line{})", fmt_witness(.witness))]
    NotProperlyConvex { witness: Option<Vec<f64>> },

    #[error("body does not meet the open ball of radius {radius}")]
    EmptyIntersection { radius: f64 },

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("need at least 4 points, got {0}")]
    TooFewPoints(usize),

    #[error("geodesic oracle inconsistent with distance: additivity defect {defect:e}")]
    InconsistentOracle { defect: f64 },

    #[error("interval inversion: lower bound {lo} exceeds upper bound {hi}")]
    IntervalInversion { lo: f64, hi: f64 },

    #[error("point lies outside the domain")]
    OutsideDomain,

    #[error("target is not on the boundary within tolerance {tol:e}")]
    NotOnBoundary { tol: f64 },

    #[error("base must be bounded")]
    UnboundedBase,

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

fn fmt_witness(w: &Option<Vec<f64>>) -> String {
    match w {
        Some(v) => format!(" with direction {v:?}"),
        None => String::new(),
    }
}

impl Error {
    /// True for errors that signal a broken numerical contract rather than bad input.
    pub fn is_contract_violation(&self) -> bool {
        matches!(
            self,
            Error::IntervalInversion { .. } | Error::Internal(_) | Error::InconsistentOracle { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
