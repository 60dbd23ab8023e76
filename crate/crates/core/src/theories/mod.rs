//! Algebraic theories, their free models and finite preservation checks.

pub mod builtin;
pub mod checks;
pub mod egraph;
pub mod functor;
pub mod theory;

use thiserror::Error;

pub use builtin::Builtin;
pub use egraph::{EGraph, Verdict};
pub use functor::FreeMonad;
pub use theory::{is_drop_equation, Theory};

/// Size limits for carriers that are infinite or grow quickly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Longest list or multiset in monoid carriers.
    pub max_len: usize,
    /// Largest common denominator of convex weights.
    pub denom: i64,
    /// Largest carrier enumerated before giving up.
    pub max_elems: usize,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget { max_len: 3, denom: 4, max_elems: 1 << 20 }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TheoryError {
    #[error("budget exceeded: {what} is larger than {limit}")]
    BudgetExceeded { what: String, limit: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("free model not determined within {depth} operation layer(s) ({classes} classes so far)")]
    NotSaturated { depth: usize, classes: usize },
    #[error("{0}")]
    Invalid(String),
}
