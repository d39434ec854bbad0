use thiserror::Error;

/// Errors raised while constructing or validating a structure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("a structure needs at least one state")]
    EmptyStateSpace,
    #[error("state {state} out of range (structure has {num_states} states)")]
    StateOutOfRange { state: usize, num_states: usize },
    #[error("inconsistent adjacency: {0}")]
    Inconsistent(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// What went wrong on a particular input line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("input is empty")]
    Empty,
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("malformed transition: {0}")]
    MalformedTransition(String),
    #[error("invalid number `{0}`")]
    BadNumber(String),
    #[error("state {state} out of range (declared {num_states} states)")]
    StateOutOfRange { state: usize, num_states: usize },
    #[error("header declares {expected} transitions but {found} were read")]
    CountMismatch { expected: usize, found: usize },
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("`states` must be declared exactly once, before any label or edge line")]
    MisplacedStates,
    #[error("missing `states` declaration")]
    MissingStates,
    #[error("state space is empty")]
    EmptyStateSpace,
}

/// A parse failure, located by 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub(crate) fn new(line: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, kind }
    }
}

/// Errors from the explicit closure-family machinery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("universe of {size} states exceeds the explicit-family limit of {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("capacity mismatch: family over {family} states, argument over {argument}")]
    CapacityMismatch { family: usize, argument: usize },
}
