use thiserror::Error;

use crate::ctx::Ctx;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("context mismatch: expected {expected}, found {found}")]
    ContextMismatch { expected: Ctx, found: Ctx },

    #[error("scope error: {0}")]
    Scope(String),

    #[error("unknown arity {op} (signature has {len})")]
    UnknownArity { op: usize, len: usize },

    #[error("cannot generate a term over {0}: no finite term exists")]
    Generation(Ctx),

    #[error("step contract violated: {0}")]
    StepContract(String),

    #[error("recursive call does not descend structurally ({arg} >= {bound} nodes)")]
    NonDescending { arg: usize, bound: usize },

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid signature: {0}")]
    Signature(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn scope(msg: impl Into<String>) -> Error {
    Error::Scope(msg.into())
}
