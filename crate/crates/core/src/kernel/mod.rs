//! Bidirectional type checking with fuel-bounded fixed point unfolding.

pub mod axioms;
mod check;
pub mod context;
mod eval;
pub mod file;
pub mod golden;

use std::cell::Cell;

use thiserror::Error;

use crate::syntax::Term;

pub use axioms::axioms;
pub use context::{Context, Entry};
pub use file::{check_source, FileReport, ItemOutcome, ItemReport};

pub const DEFAULT_FUEL: usize = 32;

/// Cap on β/δ steps within a single query.
const STEP_LIMIT: usize = 2_000_000;

/// Outcome of a conversion query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conv {
    Equal,
    Apart,
    /// The budget ran out before the question was settled.
    Unknown,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Whnf {
    Normal(Term),
    /// Reduction stopped early; carries the term reached so far.
    Exhausted(Term),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("[{rule}] {message}")]
    Rule { rule: &'static str, message: String },
    #[error("fuel exhausted while comparing {lhs} and {rhs}")]
    FuelExhausted { lhs: String, rhs: String },
}

impl TypeError {
    pub(crate) fn rule(rule: &'static str, message: impl Into<String>) -> Self {
        TypeError::Rule { rule, message: message.into() }
    }

    /// The name of the violated rule, if this is a rule violation.
    pub fn rule_name(&self) -> Option<&'static str> {
        match self {
            TypeError::Rule { rule, .. } => Some(rule),
            TypeError::FuelExhausted { .. } => None,
        }
    }
}

pub type TResult<T> = Result<T, TypeError>;

/// A checking session over a context.
#[derive(Debug)]
pub struct Checker {
    pub ctx: Context,
    pub fuel: usize,
    budget: Cell<usize>,
    steps: Cell<usize>,
}

impl Checker {
    pub fn new(ctx: Context, fuel: usize) -> Self {
        Checker { ctx, fuel, budget: Cell::new(fuel), steps: Cell::new(0) }
    }

    fn reset(&self) {
        self.budget.set(self.fuel);
        self.steps.set(0);
    }

    /// Three-valued judgemental equality under a fresh budget.
    pub fn convert(&self, t: &Term, u: &Term) -> Conv {
        self.reset();
        self.conv(t, u)
    }

    pub fn whnf(&self, t: &Term) -> Whnf {
        self.reset();
        self.whnf_fuelled(t)
    }

    /// Weak-head form without fixed point unfolding; used to expose type formers.
    pub(crate) fn head(&self, t: &Term) -> Term {
        self.reset();
        match self.whnf_fuelled(t) {
            Whnf::Normal(x) | Whnf::Exhausted(x) => x,
        }
    }
}

pub fn check_context(ctx: &Context) -> TResult<()> {
    Checker::new(Context::new(), DEFAULT_FUEL).check_entries(ctx)
}

pub fn infer(ctx: &Context, t: &Term) -> TResult<Term> {
    Checker::new(ctx.clone(), DEFAULT_FUEL).infer(t)
}

pub fn check(ctx: &Context, t: &Term, ty: &Term) -> TResult<()> {
    let mut c = Checker::new(ctx.clone(), DEFAULT_FUEL);
    let ty = c.check_type(ty)?;
    c.check(t, &ty)
}

pub fn convert(ctx: &Context, t: &Term, u: &Term, fuel: usize) -> Conv {
    Checker::new(ctx.clone(), fuel).convert(t, u)
}

pub fn whnf(ctx: &Context, t: &Term, fuel: usize) -> Whnf {
    Checker::new(ctx.clone(), fuel).whnf(t)
}
