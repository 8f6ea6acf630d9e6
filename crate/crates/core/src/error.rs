use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("marking columns {0:?} are not a permutation")]
    NotAPermutation(Vec<usize>),
    #[error("row {row} holds both an X and an O in column {col}")]
    MarkingCollision { row: usize, col: usize },
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("malformed grid file at line {line}: {reason}")]
    GridSyntax { line: usize, reason: String },
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("resource bound exceeded: {needed} generators requested, limit is {limit}")]
    ResourceBound { needed: u64, limit: u64 },
    #[error("inconsistent complex: {0}")]
    InconsistentComplex(String),
    #[error("bigraded ranks are not divisible by (1 + m t)^{0}")]
    NotDivisible(usize),
    #[error("operation requires a knot, grid presents a {0}-component link")]
    NotAKnot(usize),
    #[error("negative surface index: {boundary} boundary components, Euler characteristic {euler}")]
    NegativeIndex { boundary: u32, euler: i64 },
    #[error("{link}: computed bottom Alexander grading {computed_alex2}/2 contradicts declared index {declared_index2}/2")]
    IndexMismatch {
        link: String,
        computed_alex2: i32,
        declared_index2: i32,
    },
    #[error("cable parameter q must be nonzero")]
    UnsupportedQ,
    #[error("invalid cable parameters p={p}, q={q}: {reason}")]
    InvalidCable { p: i64, q: i64, reason: String },
    #[error("ledger already contains an entry named {0:?}")]
    DuplicateName(String),
    #[error("ledger has no entry named {0:?}")]
    UnknownEntry(String),
    #[error("invalid ledger query: {0}")]
    InvalidLedger(String),
    #[error("invalid snapshot: {0}")]
    Snapshot(String),
    #[error("polynomial arithmetic overflow")]
    Overflow,
}

impl Error {
    /// Variant name, used by the CLI when reporting failures.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotAPermutation(_) => "NotAPermutation",
            Error::MarkingCollision { .. } => "MarkingCollision",
            Error::SizeMismatch(_) => "SizeMismatch",
            Error::GridSyntax { .. } => "GridSyntax",
            Error::FileNotFound(_) => "FileNotFound",
            Error::Io { .. } => "Io",
            Error::Json(_) => "Json",
            Error::ResourceBound { .. } => "ResourceBound",
            Error::InconsistentComplex(_) => "InconsistentComplex",
            Error::NotDivisible(_) => "NotDivisible",
            Error::NotAKnot(_) => "NotAKnot",
            Error::NegativeIndex { .. } => "NegativeIndex",
            Error::IndexMismatch { .. } => "IndexMismatch",
            Error::UnsupportedQ => "UnsupportedQ",
            Error::InvalidCable { .. } => "InvalidCable",
            Error::DuplicateName(_) => "DuplicateName",
            Error::UnknownEntry(_) => "UnknownEntry",
            Error::InvalidLedger(_) => "InvalidLedger",
            Error::Snapshot(_) => "Snapshot",
            Error::Overflow => "Overflow",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path)
        } else {
            Error::Io { path, source }
        }
    }
}
