use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("symbol `{sym}` has arity {expected}, used with {found} arguments")]
    Arity {
        sym: String,
        expected: usize,
        found: usize,
    },
    #[error("signature error: {0}")]
    Signature(String),
    #[error("formula is outside the supported fragment: {0}")]
    Fragment(String),
    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("relation `{rel}` is not an equivalence: {reason} at ({a},{b})")]
    NotEquivalence {
        rel: String,
        reason: &'static str,
        a: u32,
        b: u32,
    },
    #[error("element {0} is outside the domain")]
    Element(u32),
    #[error("variable {0} is unassigned")]
    Unassigned(String),
    #[error("search budget exhausted")]
    BudgetExhausted,
    #[error("invalid input: {0}")]
    Invalid(String),
}
