use thiserror::Error;

/// Errors produced by model construction and the numerical operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate s = {s} outside the model domain [{lo}, {hi}]")]
    OutOfDomain { s: f64, lo: f64, hi: f64 },

    #[error("potential squared is negative at s = {s} (value {value:.3e}); model inconsistent")]
    NegativeRadicand { s: f64, value: f64 },

    #[error("no root of the squared potential inside the bracket [{lo}, {hi}]")]
    NoHorizonRoot { lo: f64, hi: f64 },

    #[error("model has no horizon boundary")]
    NoHorizon,

    #[error("degenerate horizon: surface gravity {k:.3e} not strictly positive")]
    DegenerateHorizon { k: f64 },

    #[error("mean convexity violated: min H = {min_h:.6e}")]
    MeanConvexityViolation { min_h: f64 },

    #[error("graph property lost: max |u'|/u = {max_slope:.3e} exceeds limit")]
    GraphLoss { max_slope: f64 },

    #[error("horizon-constant denominator {value:.3e} is not strictly positive")]
    NonPositiveBracket { value: f64 },

    #[error("linear solve failed: {0}")]
    SolveFailure(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
