use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("operator is not Hermitian (max |H - H^dag| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index ({row}, {col}) out of range for dimension {dim}")]
    IndexOutOfRange { row: usize, col: usize, dim: usize },

    #[error("frequency {omega} outside the domain of {what}")]
    Domain { what: &'static str, omega: f64 },

    #[error("rate graph is reducible: {} closed blocks {blocks:?}", blocks.len())]
    Reducible { blocks: Vec<Vec<usize>> },

    #[error("drive frequency must be positive for a periodic propagator (omega_d = {omega_d})")]
    NoPeriod { omega_d: f64 },

    #[error("sideband cutoff m_max = {m_max} leaves Parseval tail {tail:e} above tolerance {tolerance:e}")]
    InsufficientSidebands { m_max: usize, tail: f64, tolerance: f64 },

    #[error("time step too large: {measure} {value:e} exceeds {limit:e}; reduce dt")]
    StepTooLarge { measure: &'static str, value: f64, limit: f64 },

    #[error("{what} did not converge: relative change {change:e} after escalation to {detail}")]
    NotConverged { what: &'static str, change: f64, detail: String },

    #[error("eigendecomposition failed: {0}")]
    Decomposition(&'static str),
}
