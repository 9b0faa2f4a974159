use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::ttf::TtfError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("edge {edge} ({tail} -> {head}): {source}")]
    InvalidEdge {
        edge: usize,
        tail: usize,
        head: usize,
        #[source]
        source: TtfError,
    },
    #[error("edge {edge}: {message}")]
    MalformedEdge { edge: usize, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid time window: {0}")]
    Window(String),
    #[error("path is not a contiguous walk: edge {edge} does not start at node {expected}")]
    NonContiguousPath { edge: usize, expected: usize },
    #[error("node {node} out of range (graph has {count} nodes)")]
    NodeOutOfRange { node: usize, count: usize },
    #[error("query budget exceeded: {requested} queries requested, budget is {budget}")]
    Budget { requested: u64, budget: u64 },
    #[error("negative error observed for query {query}: exact {exact}, approx {approx}")]
    NegativeError {
        query: usize,
        exact: String,
        approx: String,
    },
    #[error("empty input")]
    Empty,
    #[error("index cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}
