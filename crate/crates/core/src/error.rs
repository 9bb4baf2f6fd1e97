use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: duplicate concept id `{id}`")]
    DuplicateConcept { line: usize, id: String },

    #[error("line {line}: duplicate edge {child} -> {parent} ({relation})")]
    DuplicateEdge {
        line: usize,
        child: String,
        parent: String,
        relation: String,
    },

    #[error("line {line}: edge endpoint `{id}` is not a declared concept")]
    DanglingEndpoint { line: usize, id: String },

    #[error("cycle detected through concept `{0}`")]
    Cycle(String),

    #[error("unknown concept `{0}`")]
    UnknownConcept(String),

    #[error("unknown word `{0}`")]
    UnknownWord(String),

    #[error("no common subsumer for `{0}` and `{1}`")]
    NoCommonSubsumer(String, String),

    #[error("`{0}` and `{1}` are not connected in the hierarchy")]
    Unreachable(String, String),

    #[error("`{child}` -> `{parent}` is not an edge")]
    NotAnEdge { child: String, parent: String },

    #[error("`{0}` and `{1}` are not adjacent")]
    NotAdjacent(String, String),

    #[error("concept `{0}` has infinite information content (zero probability)")]
    InfiniteIc(String),

    #[error("no weight range configured for relation `{0}`")]
    UnknownRelation(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("negative count {count} for `{token}` on line {line}")]
    NegativeCount {
        line: usize,
        token: String,
        count: i64,
    },

    #[error("{0}")]
    Estimator(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("pair `{0}`-`{1}` not found in dataset")]
    PairNotFound(String, String),

    #[error("no usable pairs for `{0}`")]
    EmptyUsableSet(String),

    #[error("unknown measure `{0}` (expected edge, resnik, sussna, jc or jc-simplified)")]
    UnknownMeasure(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
