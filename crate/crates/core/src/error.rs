use thiserror::Error;

/// Errors raised by the placement toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must be a probability in [0, 1], got {value}")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("placement entry {index} is negative ({value})")]
    NegativeCount { index: usize, value: i64 },

    #[error("placement must contain at least one sensor")]
    EmptyPlacement,

    #[error("placement lists {len} entries but only {n} points exist")]
    TooManyEntries { len: usize, n: usize },

    #[error("placement uses {parts} points but only {n} points exist")]
    TooManyParts { parts: usize, n: usize },

    #[error("{m} sensors exceed {n} points (M <= N is required)")]
    SensorsExceedPoints { m: usize, n: usize },

    #[error("{what} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("hypothesis index {j} is outside 1..={n}")]
    HypothesisOutOfRange { j: usize, n: usize },

    #[error("placements partition different totals ({left} vs {right})")]
    DifferentTotals { left: usize, right: usize },

    #[error("placements {0} and {1} are not comparable under majorization")]
    NotAChain(String, String),

    #[error("closed form only covers M = N = 2, got placement {0}")]
    UnsupportedShape(String),

    #[error("grid step {0} must lie in [0.001, 0.1] and divide 1 evenly")]
    InvalidStep(f64),

    #[error("sweep would cost about {estimate:.3e} likelihood evaluations, above the budget of {budget:.3e}")]
    BudgetExceeded { estimate: f64, budget: f64 },

    #[error("cannot parse placement `{0}`; expected dash-joined counts such as 2-1-1-0")]
    ParsePlacement(String),
}

pub type Result<T> = std::result::Result<T, Error>;
