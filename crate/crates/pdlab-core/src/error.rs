//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by parsing, validation and the algebraic machinery.
#[derive(Debug, Error)]
pub enum Error {
    /// A plabic document or weight file could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// The input is well-formed but violates a structural requirement
    /// (bipartiteness, rotation completeness, planarity, axiom failure
    /// where validity is a precondition, ...).
    #[error("invalid diagram: {0}")]
    Invalid(String),

    /// A requested object does not exist (unknown face label, vertex,
    /// arrow id, corpus name, ...).
    #[error("not found: {0}")]
    NotFound(String),

    /// A search or walk exceeded its step cap; the result is
    /// indeterminate rather than false.
    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    /// An operation's precondition failed (non-quadrilateral face for a
    /// square move, frozen 2-cycle during reduction, ...).
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// An internal consistency check failed; indicates a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
