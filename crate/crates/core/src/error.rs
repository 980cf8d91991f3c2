use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid stable parameters: {0}")]
    InvalidParams(String),
    #[error("characteristic exponents differ: {0} vs {1}")]
    AlphaMismatch(f64, f64),
    #[error("scale factor must be nonzero")]
    ZeroScale,
    #[error("exponent p = {p} outside the admissible range {range}")]
    ExponentOutOfRange { p: f64, range: &'static str },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("rank-deficient design (condition estimate {condition:e})")]
    RankDeficient { condition: f64 },
    #[error("invalid regression problem: {0}")]
    InvalidProblem(String),
    #[error("graph contains a cycle through nodes {0:?}")]
    Cycle(Vec<usize>),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("variable `{0}` not present in data")]
    MissingVariable(String),
    #[error("too few rows: need at least {needed}, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
