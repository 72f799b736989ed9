use thiserror::Error;

/// Failure while reading a CNF, WCNF or query file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("malformed header `{0}`")]
    BadHeader(String),
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("duplicate header")]
    DuplicateHeader,
    #[error("invalid literal `{0}`")]
    BadLiteral(String),
    #[error("literal {lit} exceeds declared variable count {num_vars}")]
    LiteralOutOfRange { lit: i64, num_vars: u32 },
    #[error("clause is not terminated by 0")]
    MissingTerminator,
    #[error("tautological clause")]
    Tautology,
    #[error("invalid weight `{0}`")]
    BadWeight(String),
    #[error("weight must be positive and finite, got {0}")]
    NonPositiveWeight(String),
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCount { declared: usize, found: usize },
    #[error("query has no clauses")]
    EmptyQuery,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("tautological clause")]
    Tautology,
    #[error("soft weight must be positive and finite, got {0}")]
    InvalidWeight(f64),
    #[error("knowledge base is inconsistent")]
    InconsistentKb,
    #[error("hard clauses are unsatisfiable")]
    UnsatisfiableHard,
    #[error("constraint is unsatisfiable together with the hard clauses")]
    UnsatisfiableConstraint,
    #[error("seed clauses are unsatisfiable together with the hard clauses")]
    UnsatisfiableSeed,
    #[error("the query is not entailed")]
    NotEntailed,
    #[error("hitting-set collection contains an empty set")]
    EmptyMember,
    #[error("{num_vars} variables exceed the exact-enumeration limit of {limit}")]
    TooManyVariables { num_vars: u32, limit: u32 },
    #[error("conditioning event has probability zero")]
    ZeroProbability,
    #[error("gamma must lie in [0, 1], got {0}")]
    InvalidGamma(f64),
    #[error("k must be at least 1")]
    InvalidK,
    #[error("clause index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("deadline exceeded")]
    Timeout,
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
