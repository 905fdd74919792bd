use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("rank mismatch: {op} is not defined for {rank:?} fields")]
    RankMismatch { op: &'static str, rank: crate::spectral::Rank },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("exponent {value} outside admissible range ({lo}, {hi})")]
    ExponentOutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("misaligned series: {0}")]
    MisalignedSeries(String),

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("config error: {0}")]
    ConfigMissing(String),

    #[error("diagnostics schema v{expected} mismatch: {msg}")]
    Schema { expected: u32, msg: String },

    #[error("snapshot format error: {0}")]
    Snapshot(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("Picard iteration diverged at t = {t} after {iterations} iterations")]
    PicardDiverged { t: f64, iterations: usize },

    #[error("blow-up at t = {t}: {what}")]
    Blowup { t: f64, what: String },

    #[error("manufactured construction: {0}")]
    Manufactured(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
