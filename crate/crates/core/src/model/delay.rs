//! Elements of the guarded delay type `Dκ(X) = μY. X + ▷κ Y`, read off at a
//! given stage of the clock.

use std::fmt;

use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Delay {
    Now(Value),
    Step(Box<Delay>),
    Never,
}

impl Delay {
    pub fn now(v: Value) -> Delay {
        Delay::Now(v)
    }

    pub fn step(d: Delay) -> Delay {
        Delay::Step(Box::new(d))
    }

    /// `step^n (now v)`.
    pub fn steps(n: usize, v: Value) -> Delay {
        (0..n).fold(Delay::Now(v), |d, _| Delay::step(d))
    }

    /// The element of the fiber at stage `k`: `inl v` for `now v`, and for
    /// a step the compatible family of the delayed element at every earlier
    /// stage.
    pub fn at_stage(&self, k: usize) -> Value {
        match self {
            Delay::Now(v) => Value::inl(v.clone()),
            Delay::Step(d) => Value::inr(Value::Tuple((0..k).map(|j| d.at_stage(j)).collect())),
            Delay::Never => Value::inr(Value::Tuple((0..k).map(|j| Delay::Never.at_stage(j)).collect())),
        }
    }
}

impl fmt::Display for Delay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Delay::Now(v) => write!(f, "now({v})"),
            Delay::Step(d) => write!(f, "step({d})"),
            Delay::Never => write!(f, "never"),
        }
    }
}

/// `now v` if the stage element is one.
pub fn as_now(v: &Value) -> Option<&Value> {
    match v {
        Value::Inl(x) => Some(x),
        _ => None,
    }
}

/// The earlier-stage family of a step element.
pub fn as_step(v: &Value) -> Option<&[Value]> {
    match v {
        Value::Inr(t) => match &**t {
            Value::Tuple(xs) => Some(xs),
            _ => None,
        },
        _ => None,
    }
}
