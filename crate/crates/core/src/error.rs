use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("dimension {dim} exceeds the dense oracle limit {max}")]
    TooLarge { dim: usize, max: usize },
    #[error("banded factorization broke down at lambda = {lambda} after {retries} shifted retries")]
    FactorizationBreakdown { lambda: f64, retries: u32 },
    #[error("truncation length {trunc_length} too short: potential {potential} at the cut is not far enough above eigenvalue {eigenvalue}")]
    TruncationMargin {
        trunc_length: f64,
        potential: f64,
        eigenvalue: f64,
    },
    #[error("second difference did not stabilize under step halving: {coarse} vs {fine}")]
    Unstable { coarse: f64, fine: f64 },
    #[error("grid too coarse: {points_per_length:.2} points per magnetic length (need at least {min})")]
    GridTooCoarse { points_per_length: f64, min: f64 },
    #[error("counting is infinite: lambda = {lambda} is not below h*B = {threshold}")]
    InfiniteCount { lambda: f64, threshold: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("mode window could not be certified: {0}")]
    Uncertified(String),
    #[error("exterior truncation unstable: count {first} at R_out = {r_out} but {second} after doubling")]
    TruncationUnstable { r_out: f64, first: u64, second: u64 },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
