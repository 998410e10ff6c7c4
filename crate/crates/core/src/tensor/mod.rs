//! Exact algebra of index-labelled tensor polynomials in the momentum.
//!
//! A [`TensorExpr`] is a sum of [`Monomial`]s. Every monomial stores a complex
//! rational coefficient, a power of `hbar`, a power of `p.p`, a list of
//! [`Factor`]s whose index slots are free, contracted with another slot, or
//! contracted with a momentum factor, and an optional denominator made of
//! registered [`ScalarAtom`]s.
//!
//! Canonical form sorts symmetric slots, contracts deltas and momentum
//! factors, picks the lexicographically smallest dummy labelling and merges
//! like terms. Two expressions with identical canonical form are equal; the
//! converse holds for denominator-free expressions, and [`TensorExpr::is_zero`]
//! decides equality in general by clearing denominators.

mod expr;
mod monomial;
mod render;
mod symbol;

pub use expr::TensorExpr;
pub use monomial::Monomial;
pub use render::{render_expr, render_monomial};
pub use symbol::{label, AtomRef, Factor, Label, ScalarAtom, Slot, SymbolKind, TensorSymbol};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("free index mismatch: {0}")]
    FreeMismatch(String),
    #[error("index `{0}` is already free in the operand")]
    IndexCollision(String),
    #[error("ill-formed monomial: {0}")]
    IllFormed(String),
    #[error("symbol `{symbol}` expects {expected} indices, found {found}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("scalar atom `{0}` evaluates to zero")]
    SingularAtom(String),
    #[error("scalar atom `{0}` has no constant leading term; cannot expand")]
    NotTruncatable(String),
    #[error("negative truncation order {0}")]
    NegativeOrder(i64),
}

/// How anisotropy symbols are weighted when truncating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Grading {
    /// Use the grading stored on each symbol.
    #[default]
    Declared,
    /// Weight each background tensor by its rank.
    ByRank,
}
