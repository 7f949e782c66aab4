use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("nx must be odd ≥ 9 (got {0})")]
    BadNx(usize),
    #[error("nz must be odd ≥ 9 (got {0})")]
    BadNz(usize),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("domain collapsed: min(u - v) = {min_gap:e}")]
    DomainCollapsed { min_gap: f64 },
    #[error("state outside S̄_q(κ): {violated:?}")]
    NotAdmissible { violated: Vec<String> },
    #[error("singular matrix at pivot {0}")]
    Singular(usize),
    #[error("linear solve did not converge: relative residual {residual:e} after {iterations} iterations")]
    LinearSolve { residual: f64, iterations: usize },
    #[error("newton did not converge: residual {residual:e} after {iterations} iterations ({reason})")]
    Newton {
        residual: f64,
        iterations: usize,
        reason: String,
    },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
