use thiserror::Error;

/// Errors raised by the library.
///
/// Refusals that come from sampling carry the offending point so callers
/// can reproduce them.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),

    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),

    #[error("zero test inconclusive: all {attempts} sample attempts hit singularities")]
    Inconclusive { attempts: usize },

    #[error("chart mismatch: expected ({expected}), found ({found})")]
    ChartMismatch { expected: String, found: String },

    #[error("degenerate contact form: {0}")]
    Degenerate(String),

    #[error("{what} is not admissible: {reason} (witness {witness:?})")]
    Inadmissible {
        what: String,
        reason: String,
        witness: Vec<f64>,
    },

    #[error("internal inconsistency in {what}: residual {residual:e} at {witness:?}")]
    Inconsistent {
        what: String,
        residual: f64,
        witness: Vec<f64>,
    },

    #[error("symbolic output unavailable in dimension {0} (limit is 7)")]
    SymbolicUnavailable(usize),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("integration aborted at t = {time}: non-finite state {state:?}")]
    NonFinite { time: f64, state: Vec<f64> },
}

/// Numeric evaluation failure, naming the subtree that produced it.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("division by zero in `{0}`")]
    DivisionByZero(String),
    #[error("domain error in `{0}`")]
    Domain(String),
    #[error("non-finite value in `{0}`")]
    NonFinite(String),
    #[error("point has {found} coordinates, chart needs {expected}")]
    Arity { expected: usize, found: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
