use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("too few observations: need at least 3 finite values, got {0}")]
    TooFewObservations(usize),

    #[error("{path}: parse error at row {row}, column {col}: {msg}")]
    Parse {
        path: String,
        row: usize,
        col: usize,
        msg: String,
    },

    #[error("duplicate CpG identifier '{id}' at row {row}")]
    DuplicateCpg { id: String, row: usize },

    #[error("chromosome '{label}' reappears at row {row}; rows must be grouped by chromosome")]
    NonContiguousChromosome { label: String, row: usize },

    #[error("matrices do not pair: {msg} (first offending row {row})")]
    PairMismatch { row: usize, msg: String },

    #[error("unknown CpG identifier '{0}'")]
    UnknownCpg(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("degenerate Bayes factor: {0}")]
    DegenerateBayesFactor(String),

    #[error("DMR index {index} out of range (table has {len} records)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("could not place {placed} of {requested} regions without overlap")]
    InfeasiblePlacement { placed: usize, requested: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
