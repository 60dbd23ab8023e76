//! Finite values: elements of model fibers, free models and functor images.
//!
//! The derived `Ord` is the canonical element order used everywhere a choice
//! has to be deterministic (witnesses, iteration order, counterexamples).

use std::fmt;

use num_rational::Ratio;

pub type Rational = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Unit,
    Int(i64),
    Atom(String),
    Pair(Box<Value>, Box<Value>),
    Inl(Box<Value>),
    Inr(Box<Value>),
    /// A compatible family of a limit, indexed from stage 0 upwards.
    Tuple(Vec<Value>),
    /// Sorted, without duplicates.
    Set(Vec<Value>),
    /// Sorted, duplicates kept.
    Bag(Vec<Value>),
    List(Vec<Value>),
    /// Sorted by key, positive weights summing to one.
    Dist(Vec<(Value, Rational)>),
}

impl Value {
    pub fn atom(s: impl Into<String>) -> Value {
        Value::Atom(s.into())
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn inl(a: Value) -> Value {
        Value::Inl(Box::new(a))
    }

    pub fn inr(a: Value) -> Value {
        Value::Inr(Box::new(a))
    }

    pub fn set(mut xs: Vec<Value>) -> Value {
        xs.sort();
        xs.dedup();
        Value::Set(xs)
    }

    pub fn bag(mut xs: Vec<Value>) -> Value {
        xs.sort();
        Value::Bag(xs)
    }

    /// Merges equal keys and drops zero weights.
    pub fn dist(mut xs: Vec<(Value, Rational)>) -> Value {
        xs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Value, Rational)> = Vec::with_capacity(xs.len());
        for (v, p) in xs {
            match out.last_mut() {
                Some((w, q)) if *w == v => *q += p,
                _ => out.push((v, p)),
            }
        }
        out.retain(|(_, p)| *p != Rational::from_integer(0));
        Value::Dist(out)
    }

    /// Indices `0..n` as values.
    pub fn ints(n: usize) -> Vec<Value> {
        (0..n as i64).map(Value::Int).collect()
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }
}

fn write_seq(f: &mut fmt::Formatter<'_>, open: &str, xs: &[Value], close: &str) -> fmt::Result {
    write!(f, "{open}")?;
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, "{close}")
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unit => write!(f, "*"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Atom(s) => write!(f, "{s}"),
            Value::Pair(a, b) => write!(f, "({a}, {b})"),
            Value::Inl(a) => write!(f, "inl {a}"),
            Value::Inr(a) => write!(f, "inr {a}"),
            Value::Tuple(xs) => write_seq(f, "<", xs, ">"),
            Value::Set(xs) => write_seq(f, "{", xs, "}"),
            Value::Bag(xs) => write_seq(f, "{|", xs, "|}"),
            Value::List(xs) => write_seq(f, "[", xs, "]"),
            Value::Dist(xs) => {
                write!(f, "{{")?;
                for (i, (x, p)) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}: {p}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalising_constructors() {
        let s = Value::set(vec![Value::Int(2), Value::Int(1), Value::Int(2)]);
        assert_eq!(s, Value::Set(vec![Value::Int(1), Value::Int(2)]));
        let half = Rational::new(1, 2);
        let d = Value::dist(vec![(Value::atom("b"), half), (Value::atom("a"), Rational::new(1, 4)), (Value::atom("a"), Rational::new(1, 4))]);
        assert_eq!(d.to_string(), "{a: 1/2, b: 1/2}");
    }
}
