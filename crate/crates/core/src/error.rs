use thiserror::Error;

/// Errors produced by the depth, binning, simulation and boxplot routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dataset is invalid: {0}")]
    InvalidDataset(String),

    #[error("all pooled observation times are identical; the time span has zero length")]
    ZeroSpan,

    #[error("requested {requested} bins but only {available} observations are pooled")]
    TooManyBins { requested: usize, available: usize },

    #[error("bin {bin} holds {count} observations, at least {required} are needed")]
    BinTooSmall {
        bin: usize,
        count: usize,
        required: usize,
    },

    #[error("only {total} observations in total, fewer than the per-bin floor {min_count}")]
    NotEnoughObservations { total: usize, min_count: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("curve {0} lost every observation after sparsification retries")]
    EmptyAfterSparsify(String),

    #[error("no observed points inside the central region")]
    EmptyRegion,

    #[error("unknown {kind} '{value}'")]
    Unknown { kind: &'static str, value: String },
}

pub type Result<T> = std::result::Result<T, Error>;
