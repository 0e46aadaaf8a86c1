use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model specification: {0}")]
    InvalidSpec(String),

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("series too short: need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("lag polynomial is not stationary: {0}")]
    NonStationary(String),

    #[error("explosive path: |y_{t}| = {value:e} exceeds the overflow guard")]
    ExplosivePath { t: usize, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("design matrix is rank deficient (rank {rank} < {cols} columns)")]
    RankDeficient { rank: usize, cols: usize },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("MLE did not converge in {iterations} iterations (score norm {score_norm:e})")]
    NotConverged { iterations: usize, score_norm: f64 },

    #[error("no CLAD start converged within the evaluation budget")]
    AllStartsFailed,

    #[error("density at zero cannot be estimated: {0}")]
    DegenerateDensity(String),

    #[error("estimation failed at lag order k = {k}: {source}")]
    AtLagOrder {
        k: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("missing values in rows {rows:?}")]
    MissingValues { rows: Vec<u64> },

    #[error("timestamps not strictly increasing at row {row} ({prev:?} then {next:?})")]
    NonMonotone { row: u64, prev: String, next: String },

    #[error("file contains no data rows")]
    EmptySeries,

    #[error("column {0:?} not found in header")]
    MissingColumn(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
