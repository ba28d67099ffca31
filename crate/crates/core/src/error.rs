use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("symbol {symbol} is outside the alphabet of size {d}")]
    SymbolOutOfRange { symbol: usize, d: usize },

    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,

    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(usize, usize),

    #[error("size cap exceeded: {0}")]
    CapExceeded(String),

    #[error("automaton has epsilon transitions")]
    EpsilonPresent,

    #[error("dfa is incomplete")]
    Incomplete,

    #[error("state {0} out of range")]
    StateOutOfRange(usize),

    #[error("relabelling is not a bijection on its domain: {0}")]
    NotBijective(String),

    #[error("tensor entry is not binary at {0}")]
    NonBinary(String),

    #[error("automaton is ambiguous")]
    Ambiguous,

    #[error("language is not sparse")]
    NotSparse,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
