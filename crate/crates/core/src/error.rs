use thiserror::Error;

/// Errors raised across the pipeline.
///
/// Variants fall into two groups that the command-line front end maps to
/// different exit codes: malformed input (`InvalidDomain`, `InvalidDatum`,
/// `InvalidInput`, `Json`, `Io`) and mathematical refusals (everything else).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid boundary datum: {0}")]
    InvalidDatum(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point ({x}, {y}) lies in the interior of the domain")]
    InteriorPoint { x: f64, y: f64 },

    #[error("boundary measure is identically zero")]
    ZeroMeasure,

    #[error("boundary datum has zero total variation")]
    ZeroVariation,

    #[error("measures are unbalanced: positive mass {positive}, negative mass {negative}")]
    Unbalanced { positive: f64, negative: f64 },

    #[error("transportation simplex failed: {0}")]
    NumericFailure(String),

    #[error("brute-force oracle limited to {limit} atoms per side, got {sources}x{targets}")]
    TooLarge {
        limit: usize,
        sources: usize,
        targets: usize,
    },

    #[error("plan is not optimal: {0}")]
    NotOptimal(String),

    #[error("segment endpoint ({x}, {y}) lies outside the grid")]
    GridTooSmall { x: f64, y: f64 },

    #[error("transport segments {first} and {second} cross in the interior")]
    CrossingSegments { first: usize, second: usize },

    #[error("plan charges the boundary with mass {mass}; no least gradient solution exists")]
    BoundarySupported { mass: f64 },

    #[error("inconsistent trace on face {face}: boundary values differ by {spread}")]
    InconsistentTrace { face: usize, spread: f64 },

    #[error("point ({x}, {y}) lies on the jump set")]
    OnJumpSet { x: f64, y: f64 },

    #[error("point ({x}, {y}) lies outside the domain")]
    OutsideDomain { x: f64, y: f64 },

    #[error("point ({x}, {y}) lies on a case boundary of the closed-form solution")]
    OnCaseBoundary { x: f64, y: f64 },

    #[error("domain approximation requires a strictly convex domain")]
    NotStrictlyConvex,

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by malformed input rather than by the
    /// mathematics of a well-posed instance.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidDomain(_)
                | Error::InvalidDatum(_)
                | Error::InvalidInput(_)
                | Error::Json(_)
                | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
