use thiserror::Error;

pub type Result<T> = std::result::Result<T, QreError>;

#[derive(Debug, Error)]
pub enum QreError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid game parameters: {0}")]
    InvalidGame(String),

    /// Strategy violates a monotonicity precondition.
    #[error("non-monotone strategy: {0}")]
    NonMonotone(String),

    #[error("degenerate strategy: {0}")]
    DegenerateStrategy(String),

    #[error("type {value} cannot be supported as an indifferent type: {reason}")]
    UnsupportableType { value: f64, reason: String },

    #[error("constraint infeasible: {0}")]
    ConstraintInfeasible(String),

    #[error("symmetric extension leaves the type space (x_T = {x_end})")]
    InfeasibleExtension { x_end: f64 },

    #[error("tail cannot satisfy the mean constraint: {0}")]
    SlackInfeasible(String),

    #[error("no convergence for lambda = {lambda} after {iterations} iterations (residual {residual:e})")]
    Convergence {
        lambda: f64,
        iterations: usize,
        residual: f64,
    },

    #[error("unstable estimate: {failed} of {reps} bootstrap replicates failed")]
    UnstableEstimate { failed: usize, reps: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate bandwidth: {0}")]
    DegenerateBandwidth(String),

    #[error("no indifferent type: estimated choice probability never crosses 1/2")]
    NoIndifferentType,

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl QreError {
    /// Convergence and instability failures are numerical outcomes rather
    /// than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            QreError::Convergence { .. } | QreError::UnstableEstimate { .. }
        )
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(QreError::Domain(msg.into()))
}
