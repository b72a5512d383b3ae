use thiserror::Error;

use crate::syntax::Pos;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("{message}")]
    Lex { pos: Pos, message: String },
    #[error("expected {expected}, found {found}")]
    Unexpected { pos: Pos, expected: String, found: String },
    #[error("rule is missing its terminating `.`")]
    MissingTerminator { pos: Pos },
    #[error("{message}")]
    Invalid { pos: Pos, message: String },
    #[error("more than one compute statement")]
    DuplicateCompute { pos: Pos },
}

impl SyntaxError {
    pub fn pos(&self) -> Pos {
        match self {
            SyntaxError::Lex { pos, .. }
            | SyntaxError::Unexpected { pos, .. }
            | SyntaxError::MissingTerminator { pos }
            | SyntaxError::Invalid { pos, .. }
            | SyntaxError::DuplicateCompute { pos } => *pos,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GroundError {
    #[error("arithmetic error: {message}")]
    Arithmetic { pos: Pos, message: String },
    #[error("constant `{name}` is used numerically but has no value (use -c {name}=<int>)")]
    UnboundConstant { pos: Pos, name: String },
    #[error("{message}")]
    Unsupported { pos: Pos, message: String },
}

impl GroundError {
    pub fn pos(&self) -> Pos {
        match self {
            GroundError::Arithmetic { pos, .. }
            | GroundError::UnboundConstant { pos, .. }
            | GroundError::Unsupported { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: unknown rule type {ty}")]
    UnknownRuleType { line: usize, ty: i64 },
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("rule {index} is not a basic rule; the well-founded model is only defined for normal programs")]
    UnsupportedRuleType { index: usize },
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("program has {atoms} atoms; brute-force enumeration is capped at {cap}")]
    CapExceeded { atoms: usize, cap: usize },
}
