use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IsingError {
    #[error("instance must have at least one spin")]
    NoSpins,
    #[error("{n} spins exceeds the maximum of {max}")]
    TooManySpins { n: usize, max: usize },
    #[error("spin index {index} out of range for {n} spins")]
    SpinOutOfRange { index: usize, n: usize },
    #[error("self-coupling on spin {index}")]
    SelfCoupling { index: usize },
    #[error("coupling or field value is not finite")]
    NonFinite,
    #[error("temperature must be positive and finite, got {0}")]
    BadTemperature(f64),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {dim} exceeds the dense limit {limit}")]
    TooLarge { dim: usize, limit: usize },
    #[error("matrix is not symmetric: |A_ij - A_ji| = {asymmetry:e}")]
    NotSymmetric { asymmetry: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("spin index {index} out of range for {n} spins")]
    SpinOutOfRange { index: usize, n: usize },
    #[error(transparent)]
    Ising(#[from] IsingError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error("objective returned {value} at {point:?}")]
    NonFinite { value: f64, point: Vec<f64> },
    #[error("expected {expected} parameters, got {found}")]
    ParameterLength { expected: usize, found: usize },
    #[error("circuit depth must be at least 1")]
    ZeroDepth,
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Ising(#[from] IsingError),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("nothing to run: {0}")]
    EmptyGrid(&'static str),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("missing data for figure panel {0}")]
    MissingPanel(String),
    #[error("{failed} sweep point(s) failed: {summary}")]
    PartialFailure { failed: usize, summary: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Ising(#[from] IsingError),
}
