use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Block or vector dimensions do not agree with the declared spaces.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A value violates a structural invariant (d∘d ≠ 0, duplicate labels, ...).
    #[error("structural error: {0}")]
    Structural(String),

    #[error("not closed in degree {degree}: {detail}")]
    NotClosed { degree: i32, detail: String },

    #[error("not a chain map: {0}")]
    NotChainMap(String),

    #[error("element has degree {found}, expected {expected}")]
    WrongDegree { expected: i32, found: String },

    #[error("operands live in different hosts")]
    HostMismatch,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("series did not terminate; adjoint action is not nilpotent")]
    NotNilpotent,

    #[error("parse error: {0}")]
    Parse(String),

    /// Schema violation located by a JSON-pointer-style path.
    #[error("schema error at {path}: {detail}")]
    Schema { path: String, detail: String },

    #[error("unresolved reference {name:?} at {path}")]
    Dangling { path: String, name: String },

    #[error("out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
