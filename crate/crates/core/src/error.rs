use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(u32),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("non-finite sample at r = {r}")]
    NonFinite { r: f64 },
    #[error("grid too coarse: order-{order} derivative needs {needed} nodes, grid has {have}")]
    GridTooCoarse {
        order: usize,
        needed: usize,
        have: usize,
    },
    #[error("profile is missing its {0} samples")]
    MissingDerivative(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("integrand is not integrable at the origin (power-law exponent {exponent:.4})")]
    NonIntegrable { exponent: f64 },
    #[error("could not bracket the shooting parameter for a = {a}")]
    Bracket { a: f64 },
    #[error("branch has no points")]
    EmptyBranch,
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("test function does not vanish at the ends of its support (|v| = {value:e} at r = {r})")]
    NotCompactlySupported { r: f64, value: f64 },
    #[error("(tη)' is unbounded on the grid near r = {r}")]
    UnboundedTestFunction { r: f64 },
    #[error("Φ' is not positive at r = {r}")]
    NonPositivePhiPrime { r: f64 },
    #[error("construction check failed at r = {r}: {what}")]
    Construction { r: f64, what: String },
    #[error("profile is not strictly decreasing near r = {r}")]
    NotMonotone { r: f64 },
    #[error("slope-cap calibration failed; r²g'(u) not positive at r = {r}")]
    Calibration { r: f64 },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
