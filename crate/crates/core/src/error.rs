use thiserror::Error;

/// Errors surfaced by parsing, transformation, solving and the oracle.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("atom `{0}` uses a reserved prefix (k_, gap_k_, lam_)")]
    ReservedAtom(String),

    #[error("epistemic transformations take plain programs; found {0} weak constraint(s)")]
    WeakConstraintsUnsupported(usize),

    #[error("the program has no paracoherent answer set (no classical model)")]
    NoParacoherentModel,

    #[error("deadline exceeded")]
    Timeout,

    #[error("oracle budget exceeded: {atoms} atoms (max {max_atoms})")]
    BudgetExceeded { atoms: usize, max_atoms: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
