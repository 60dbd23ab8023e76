//! Polynomial set functors extended with the builtin free-model monads.

use std::fmt;

use crate::syntax::{parse::ParseError, prefix::parse_prefix, prefix::Prefix};
use crate::theories::{Budget, Builtin, TheoryError};
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FunctorExpr {
    Const(Vec<Value>),
    Id,
    Prod(Box<FunctorExpr>, Box<FunctorExpr>),
    Sum(Box<FunctorExpr>, Box<FunctorExpr>),
    Theory(Builtin, Box<FunctorExpr>),
}

/// Reads a constant atom: numbers become integers, `*` the unit.
pub fn atom_value(s: &str) -> Value {
    if s == "*" {
        Value::Unit
    } else if let Ok(i) = s.parse::<i64>() {
        Value::Int(i)
    } else {
        Value::atom(s)
    }
}

impl FunctorExpr {
    pub fn constant(values: Vec<Value>) -> FunctorExpr {
        let mut v = values;
        v.sort();
        v.dedup();
        FunctorExpr::Const(v)
    }

    /// The constant functor on `{0, …, n−1}`.
    pub fn fin(n: usize) -> FunctorExpr {
        FunctorExpr::Const(Value::ints(n))
    }

    pub fn prod(a: FunctorExpr, b: FunctorExpr) -> FunctorExpr {
        FunctorExpr::Prod(Box::new(a), Box::new(b))
    }

    pub fn sum(a: FunctorExpr, b: FunctorExpr) -> FunctorExpr {
        FunctorExpr::Sum(Box::new(a), Box::new(b))
    }

    pub fn theory(b: Builtin, a: FunctorExpr) -> FunctorExpr {
        FunctorExpr::Theory(b, Box::new(a))
    }

    pub fn parse(src: &str) -> Result<FunctorExpr, ParseError> {
        FunctorExpr::from_prefix(&parse_prefix(src)?)
    }

    pub fn from_prefix(p: &Prefix) -> Result<FunctorExpr, ParseError> {
        if let Ok(n) = p.head.parse::<usize>() {
            p.arity(0)?;
            return Ok(FunctorExpr::fin(n));
        }
        match p.head.as_str() {
            "id" => {
                p.arity(0)?;
                Ok(FunctorExpr::Id)
            }
            "const" => {
                let atoms = p.atoms.as_ref().ok_or_else(|| p.error("`const` needs a set of atoms, e.g. const{a, b}"))?;
                Ok(FunctorExpr::constant(atoms.iter().map(|a| atom_value(a)).collect()))
            }
            "prod" | "sum" => {
                let args = p.arity(2)?;
                let (a, b) = (FunctorExpr::from_prefix(&args[0])?, FunctorExpr::from_prefix(&args[1])?);
                Ok(if p.head == "prod" { FunctorExpr::prod(a, b) } else { FunctorExpr::sum(a, b) })
            }
            h => match Builtin::from_name(h) {
                Some(b) => Ok(FunctorExpr::theory(b, FunctorExpr::from_prefix(&p.arity(1)?[0])?)),
                None => Err(p.error(format!("unknown functor `{h}`"))),
            },
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            FunctorExpr::Const(_) => true,
            FunctorExpr::Id => false,
            FunctorExpr::Prod(a, b) | FunctorExpr::Sum(a, b) => a.is_constant() && b.is_constant(),
            FunctorExpr::Theory(_, a) => a.is_constant(),
        }
    }

    /// `F(X)` in canonical order.
    pub fn eval(&self, xs: &[Value], budget: &Budget) -> Result<Vec<Value>, TheoryError> {
        let mut out = match self {
            FunctorExpr::Const(c) => c.clone(),
            FunctorExpr::Id => xs.to_vec(),
            FunctorExpr::Prod(a, b) => {
                let (va, vb) = (a.eval(xs, budget)?, b.eval(xs, budget)?);
                if va.len().saturating_mul(vb.len()) > budget.max_elems {
                    return Err(TheoryError::BudgetExceeded { what: format!("{self}"), limit: budget.max_elems });
                }
                va.iter().flat_map(|x| vb.iter().map(move |y| Value::pair(x.clone(), y.clone()))).collect()
            }
            FunctorExpr::Sum(a, b) => {
                let mut v: Vec<Value> = a.eval(xs, budget)?.into_iter().map(Value::inl).collect();
                v.extend(b.eval(xs, budget)?.into_iter().map(Value::inr));
                v
            }
            FunctorExpr::Theory(t, a) => t.carrier(&a.eval(xs, budget)?, budget)?,
        };
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// The size of `F(X)` for `|X| = n`, saturating; theories count their
    /// budgeted carriers.
    pub fn size_hint(&self, n: usize, budget: &Budget) -> u128 {
        match self {
            FunctorExpr::Const(c) => c.len() as u128,
            FunctorExpr::Id => n as u128,
            FunctorExpr::Prod(a, b) => a.size_hint(n, budget).saturating_mul(b.size_hint(n, budget)),
            FunctorExpr::Sum(a, b) => a.size_hint(n, budget).saturating_add(b.size_hint(n, budget)),
            FunctorExpr::Theory(t, a) => t.carrier_size(usize::try_from(a.size_hint(n, budget)).unwrap_or(usize::MAX), budget),
        }
    }

    /// `F(f)` applied to one element of `F(X)`.
    pub fn map(&self, v: &Value, f: &dyn Fn(&Value) -> Value) -> Value {
        match (self, v) {
            (FunctorExpr::Const(_), v) => v.clone(),
            (FunctorExpr::Id, v) => f(v),
            (FunctorExpr::Prod(a, b), Value::Pair(x, y)) => Value::pair(a.map(x, f), b.map(y, f)),
            (FunctorExpr::Sum(a, _), Value::Inl(x)) => Value::inl(a.map(x, f)),
            (FunctorExpr::Sum(_, b), Value::Inr(y)) => Value::inr(b.map(y, f)),
            (FunctorExpr::Theory(t, a), v) => t.map(v, &|x| a.map(x, f)),
            (g, v) => panic!("{v} is not an element of {g}"),
        }
    }
}

impl fmt::Display for FunctorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctorExpr::Const(c) if *c == Value::ints(c.len()) => write!(f, "{}", c.len()),
            FunctorExpr::Const(c) => {
                let s: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                write!(f, "const{{{}}}", s.join(", "))
            }
            FunctorExpr::Id => write!(f, "id"),
            FunctorExpr::Prod(a, b) => write!(f, "prod({a}, {b})"),
            FunctorExpr::Sum(a, b) => write!(f, "sum({a}, {b})"),
            FunctorExpr::Theory(t, a) => write!(f, "{}({a})", t.short()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        for src in ["pf(prod(const{a, b}, id))", "sum(1, id)", "prod(2, id)", "df(sum(id, 3))", "bag(list(trunc(id)))"] {
            let f = FunctorExpr::parse(src).unwrap();
            assert_eq!(f.to_string(), src);
        }
        assert!(FunctorExpr::parse("foo(id)").is_err());
        assert!(FunctorExpr::parse("prod(id)").is_err());
    }

    #[test]
    fn small_images() {
        let b = Budget::default();
        let ab = [Value::atom("a"), Value::atom("b")];
        assert_eq!(FunctorExpr::Id.eval(&ab, &b).unwrap().len(), 2);
        assert_eq!(FunctorExpr::parse("sum(1, id)").unwrap().eval(&[], &b).unwrap().len(), 1);
        assert_eq!(FunctorExpr::parse("pf(prod(const{l}, id))").unwrap().eval(&ab, &b).unwrap().len(), 4);
    }
}
