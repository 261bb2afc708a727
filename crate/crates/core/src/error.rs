use thiserror::Error;

/// Errors raised by framekit operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown label {0}")]
    UnknownLabel(String),

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error(
        "collar not witnessed: block {block} at radius {radius} needs {needed} materialized blocks, have {available}"
    )]
    CollarNotWitnessed {
        block: usize,
        radius: f64,
        needed: usize,
        available: usize,
    },

    #[error("need at least {needed} blocks, have {available}")]
    InsufficientBlocks { needed: usize, available: usize },

    #[error("decompositions do not match: {0}")]
    Mismatch(String),

    #[error("metric error: {0}")]
    Metric(String),

    #[error("family has empty span")]
    EmptySpan,

    #[error("sequence is not frame compatible at block {block}: {reason}")]
    NotFrameCompatible { block: usize, reason: String },

    #[error("sequence has no growth certificate: increment at block {block} over an empty block increment")]
    NoGrowthCertificate { block: usize },

    #[error("domination is only defined for nonnegative sequences")]
    NegativeSequence,

    #[error("phase at position {index} has modulus {modulus}, expected 1")]
    NonUnimodularPhase { index: usize, modulus: f64 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("tail window too short: need {needed} blocks, have {available}")]
    WindowTooShort { needed: usize, available: usize },

    #[error("removing the selected labels empties the span")]
    RemovalEmptiesSpan,

    #[error("not a frame for its span: {0}")]
    NotAFrame(String),

    #[error("families do not form a superframe (‖P1 P2‖ = {p1p2_norm})")]
    NotSuperframe { p1p2_norm: f64 },

    #[error("window has zero norm")]
    ZeroWindow,

    #[error("skew matrix is degenerate (det = {0})")]
    DegenerateSkew(f64),

    #[error("lattice is empty")]
    EmptyLattice,

    #[error("need at least {needed} {what}, got {got}")]
    TooFew {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("schema violations: {}", .0.join("; "))]
    Schema(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        if err.is_io() {
            return Error::Io(err.into());
        }
        Error::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
