use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PncError {
    #[error("bit packet length {0} is odd; QPSK needs an even number of bits")]
    OddLength(usize),
    #[error("empty input")]
    Empty,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("symbol offset {0} is below DELTA_EPS; use the synchronous model")]
    DeltaTooSmall(f64),
    #[error("observation is synchronous; use the synchronous decoder")]
    SynchronousObservation,
    #[error("observation is asynchronous; use the asynchronous decoder")]
    AsynchronousObservation,
    #[error("sample {value} is not within tolerance of the noiseless support")]
    OffSupport { value: f64 },
    #[error("invalid factor graph: {0}")]
    InvalidGraph(String),
    #[error("tree-exact inference requested on a graph with cycles")]
    NotATree,
    #[error("all-zero belief at variable {0}")]
    ZeroBelief(usize),
    #[error("interleaver is not a permutation of 0..{0}")]
    BadInterleaver(usize),
    #[error("bisection failed to bracket a root for {what}: f({lo}) = {flo}, f({hi}) = {fhi}")]
    NoBracket { what: &'static str, lo: f64, hi: f64, flo: f64, fhi: f64 },
}

pub type Result<T> = std::result::Result<T, PncError>;
