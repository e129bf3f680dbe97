use thiserror::Error;

/// Errors produced while validating inputs or running mechanisms.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("profile has zero agents")]
    ZeroAgents,
    #[error("agent {agent}: list has {len} entries, expected {expected}")]
    WrongLength {
        agent: usize,
        len: usize,
        expected: usize,
    },
    #[error("agent {agent}: entry {position} (item {item}) is a duplicate or out of range")]
    NotPermutation {
        agent: usize,
        position: usize,
        item: usize,
    },
    #[error("matching assigns item {item} to both agent {first} and agent {second}")]
    NonInjective {
        item: usize,
        first: usize,
        second: usize,
    },
    #[error("id {id} out of range for size {size}")]
    OutOfRange { id: usize, size: usize },
    #[error("order is not a permutation of 0..{n}")]
    InvalidOrder { n: usize },
    #[error("benchmark must be a perfect matching on {n} agents")]
    NotPerfect { n: usize },
    #[error("n = {n} exceeds the enumeration guard {guard}; use Monte Carlo")]
    TooLarge { n: usize, guard: usize },
    #[error("matrix is not doubly stochastic: {0}")]
    NotDoublyStochastic(String),
    #[error("{0}")]
    Divisibility(String),
    #[error("n = {0} must be even")]
    OddN(usize),
    #[error("n = {n} is not a perfect cube (nearest cubes: {below}, {above})")]
    NotACube { n: usize, below: usize, above: usize },
    #[error("agent {agent}: item {item} is not on its preference list")]
    ItemNotOnList { agent: usize, item: usize },
    #[error("agent {agent}: bundle {index} is invalid: {reason}")]
    InvalidBundle {
        agent: usize,
        index: usize,
        reason: String,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
