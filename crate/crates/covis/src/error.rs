use crate::grid::LocationId;
use thiserror::Error;

/// Errors shared across the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    MalformedRow { line: usize, msg: String },

    #[error("line {line}: field `{field}` out of range: {value} not in {bound}")]
    FieldOutOfRange {
        line: usize,
        field: &'static str,
        value: u64,
        bound: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("window length {delta_t} exceeds horizon of {horizon} days")]
    WindowTooLong { delta_t: u32, horizon: u32 },

    #[error("empty transaction dataset: support is undefined")]
    EmptyDataset,

    #[error("{count} distinct items exceeds the brute-force enumeration limit of {limit}")]
    TooManyItems { count: usize, limit: usize },

    #[error("unknown node {0}")]
    UnknownNode(LocationId),

    #[error("item {item} outside grid of {cells} cells")]
    ItemOutsideGrid { item: LocationId, cells: usize },

    #[error("no hyperedges of size >= {min_edge_size}")]
    NoQualifyingEdges { min_edge_size: usize },

    #[error("degenerate sample: all {n} values equal {value}")]
    DegenerateSample { n: usize, value: u64 },

    #[error("need at least {need} {what}, got {got}")]
    TooFewSamples {
        what: &'static str,
        need: usize,
        got: usize,
    },

    #[error("phase `{label}` days [{lo}, {hi}) not contained in the visit log")]
    PhaseOutOfRange { label: String, lo: u32, hi: u32 },

    #[error("hypergraph file, line {line}: {msg}")]
    BadHypergraphFile { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
