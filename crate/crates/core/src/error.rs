use thiserror::Error;

use crate::model::{Var, Weight};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid variable name `{0}`")]
    InvalidVar(String),

    #[error("duplicate variable `{0}` in universe")]
    DuplicateVar(Var),

    #[error("weight {0} is outside [0, 1]")]
    WeightOutOfRange(String),

    #[error("cannot parse weight `{0}`")]
    BadWeight(String),

    #[error("variable `{0}` is not in the universe")]
    UnknownVar(Var),

    #[error("variable `{0}` is not assigned")]
    Unassigned(Var),

    #[error("universe has {0} variables, more than the supported {1}")]
    UniverseTooLarge(usize, usize),

    #[error("distribution over {expected} interpretations given {got} values")]
    DistributionSize { expected: usize, got: usize },

    #[error("distribution is not normalized (max degree {0})")]
    NotNormalized(Weight),

    #[error("distributions are defined over different universes")]
    UniverseMismatch,

    #[error("base is inconsistent: Inc = {0}")]
    Inconsistent(Weight),

    #[error("entry is not part of the base")]
    EntryNotFound,

    #[error("ordering is not a permutation of the base variables: {0}")]
    BadOrdering(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("failed to generate a consistent base after {0} attempts")]
    RetriesExhausted(usize),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A syntax or schema problem in textual input, with a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}
