//! A finite, truncated presheaf model over the time category.

pub mod category;
pub mod checks;
pub mod delay;
pub mod experiments;
pub mod presheaf;
pub mod types;

use thiserror::Error;

pub use category::{Site, SiteObj, TimeObj};
pub use presheaf::FinPresheaf;
pub use types::{Evaluator, PredExpr, TypeExprM};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("no fresh clock: {0} uses the whole pool")]
    FreshClockExhausted(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{0}")]
    Invalid(String),
}
