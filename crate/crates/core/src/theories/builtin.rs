//! Free models of the builtin theories, by normal forms.
//!
//! Semilattice elements are finite sets, convex ones finitely supported
//! distributions with exact weights, monoid ones lists, commutative monoid
//! ones multisets, and the truncation of a non-empty set is a point.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};

use super::{Budget, TheoryError};
use crate::syntax::AlgTerm;
use crate::value::{Rational, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Builtin {
    Semilattice,
    Convex,
    Monoid,
    CommutativeMonoid,
    Truncation,
}

pub const ALL: [Builtin; 5] =
    [Builtin::Semilattice, Builtin::Convex, Builtin::Monoid, Builtin::CommutativeMonoid, Builtin::Truncation];

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Semilattice => "semilattice",
            Builtin::Convex => "convex",
            Builtin::Monoid => "monoid",
            Builtin::CommutativeMonoid => "commutative-monoid",
            Builtin::Truncation => "truncation",
        }
    }

    /// The functor name used in functor expressions.
    pub fn short(self) -> &'static str {
        match self {
            Builtin::Semilattice => "pf",
            Builtin::Convex => "df",
            Builtin::Monoid => "list",
            Builtin::CommutativeMonoid => "bag",
            Builtin::Truncation => "trunc",
        }
    }

    pub fn from_name(s: &str) -> Option<Builtin> {
        ALL.into_iter().find(|b| b.name() == s || b.short() == s)
    }

    /// Number of elements `carrier` would produce on `n` generators.
    pub fn carrier_size(self, n: usize, budget: &Budget) -> u128 {
        let n = n as u128;
        match self {
            Builtin::Semilattice => {
                if n >= 127 {
                    u128::MAX
                } else {
                    1u128 << n
                }
            }
            Builtin::Convex => (1..=budget.denom as u128).map(|q| binomial(q + n - 1, q)).fold(0u128, u128::saturating_add),
            Builtin::Monoid => (0..=budget.max_len as u32).map(|k| n.saturating_pow(k)).fold(0, u128::saturating_add),
            Builtin::CommutativeMonoid => {
                (0..=budget.max_len as u128).map(|k| if n == 0 { u128::from(k == 0) } else { binomial(n + k - 1, k) }).fold(0, u128::saturating_add)
            }
            Builtin::Truncation => u128::from(n > 0),
        }
    }

    /// All elements over the generators `xs`, in canonical order. Monoid and
    /// commutative monoid carriers are cut at `budget.max_len` generators per
    /// element, convex ones at common denominator `budget.denom`.
    pub fn carrier(self, xs: &[Value], budget: &Budget) -> Result<Vec<Value>, TheoryError> {
        let estimate = self.carrier_size(xs.len(), budget);
        if estimate > budget.max_elems as u128 {
            return Err(TheoryError::BudgetExceeded { what: format!("{}({} elements)", self.short(), xs.len()), limit: budget.max_elems });
        }
        let n = xs.len();
        let mut out: Vec<Value> = match self {
            Builtin::Semilattice => (0u64..1 << n)
                .map(|m| Value::Set((0..n).filter(|i| m & (1 << i) != 0).map(|i| xs[i].clone()).collect()))
                .map(|v| match v {
                    Value::Set(s) => Value::set(s),
                    v => v,
                })
                .collect(),
            Builtin::Convex => {
                let mut seen = BTreeSet::new();
                for q in 1..=budget.denom {
                    for ks in compositions(q as usize, n) {
                        let d = ks.iter().zip(xs).filter(|(k, _)| **k > 0).map(|(k, x)| (x.clone(), Rational::new(*k as i64, q))).collect();
                        seen.insert(Value::dist(d));
                    }
                }
                seen.into_iter().collect()
            }
            Builtin::Monoid => {
                let mut layer = vec![Vec::new()];
                let mut all = vec![Value::List(Vec::new())];
                for _ in 0..budget.max_len {
                    layer = layer.iter().flat_map(|l: &Vec<Value>| xs.iter().map(move |x| [l.clone(), vec![x.clone()]].concat())).collect();
                    all.extend(layer.iter().cloned().map(Value::List));
                }
                all
            }
            Builtin::CommutativeMonoid => {
                let mut seen = BTreeSet::new();
                for k in 0..=budget.max_len {
                    for ks in compositions(k, n) {
                        let items = ks.iter().zip(xs).flat_map(|(c, x)| std::iter::repeat_n(x.clone(), *c)).collect();
                        seen.insert(Value::bag(items));
                    }
                }
                seen.into_iter().collect()
            }
            Builtin::Truncation => {
                if n > 0 {
                    vec![Value::Unit]
                } else {
                    vec![]
                }
            }
        };
        out.sort();
        out.dedup();
        Ok(out)
    }

    pub fn unit(self, x: &Value) -> Value {
        match self {
            Builtin::Semilattice => Value::Set(vec![x.clone()]),
            Builtin::Convex => Value::Dist(vec![(x.clone(), Rational::one())]),
            Builtin::Monoid => Value::List(vec![x.clone()]),
            Builtin::CommutativeMonoid => Value::Bag(vec![x.clone()]),
            Builtin::Truncation => Value::Unit,
        }
    }

    /// The functor action: substitute generators along `f`.
    pub fn map(self, v: &Value, f: &dyn Fn(&Value) -> Value) -> Value {
        match (self, v) {
            (Builtin::Semilattice, Value::Set(xs)) => Value::set(xs.iter().map(f).collect()),
            (Builtin::Convex, Value::Dist(xs)) => Value::dist(xs.iter().map(|(x, p)| (f(x), *p)).collect()),
            (Builtin::Monoid, Value::List(xs)) => Value::List(xs.iter().map(f).collect()),
            (Builtin::CommutativeMonoid, Value::Bag(xs)) => Value::bag(xs.iter().map(f).collect()),
            (Builtin::Truncation, Value::Unit) => Value::Unit,
            (b, v) => panic!("{v} is not an element of a free {b}"),
        }
    }

    /// Monad multiplication `T(T(X)) → T(X)`.
    pub fn join(self, v: &Value) -> Value {
        match (self, v) {
            (Builtin::Semilattice, Value::Set(xs)) => Value::set(xs.iter().flat_map(|x| self.generators(x)).collect()),
            (Builtin::Convex, Value::Dist(xs)) => {
                let mut acc = Vec::new();
                for (inner, p) in xs {
                    let Value::Dist(ys) = inner else { panic!("{inner} is not a distribution") };
                    acc.extend(ys.iter().map(|(y, q)| (y.clone(), p * q)));
                }
                Value::dist(acc)
            }
            (Builtin::Monoid, Value::List(xs)) => Value::List(xs.iter().flat_map(|x| self.generators(x)).collect()),
            (Builtin::CommutativeMonoid, Value::Bag(xs)) => Value::bag(xs.iter().flat_map(|x| self.generators(x)).collect()),
            (Builtin::Truncation, Value::Unit) => Value::Unit,
            (b, v) => panic!("{v} is not an element of a free {b}"),
        }
    }

    /// The generators occurring in a normal form, with multiplicity for
    /// lists and bags.
    pub fn generators(self, v: &Value) -> Vec<Value> {
        match v {
            Value::Set(xs) | Value::List(xs) | Value::Bag(xs) => xs.clone(),
            Value::Dist(xs) => xs.iter().map(|(x, _)| x.clone()).collect(),
            Value::Unit if self == Builtin::Truncation => vec![],
            v => panic!("{v} is not an element of a free {self}"),
        }
    }

    /// Whether `v ∈ T(X')` for the subset `xs ⊆ X`, i.e. whether `v` is in
    /// the image of `T` applied to the inclusion.
    pub fn lies_in(self, v: &Value, xs: &BTreeSet<Value>) -> bool {
        match self {
            Builtin::Truncation => !xs.is_empty(),
            _ => self.generators(v).iter().all(|g| xs.contains(g)),
        }
    }

    /// The signature and the equations presenting the theory. The convex
    /// operations form a family indexed by `p` in the open unit interval;
    /// `mix[p]` stands for that family schematically.
    pub fn presentation(self) -> (Vec<(&'static str, usize)>, Vec<(&'static str, &'static str)>) {
        match self {
            Builtin::Semilattice => (
                vec![("join", 2), ("bot", 0)],
                vec![
                    ("join(x, join(y, z))", "join(join(x, y), z)"),
                    ("join(x, y)", "join(y, x)"),
                    ("join(x, x)", "x"),
                    ("join(x, bot())", "x"),
                ],
            ),
            Builtin::Convex => (
                vec![("mix[p]", 2), ("mix[1-p]", 2), ("mix[q]", 2), ("mix[pq]", 2), ("mix[(1-p)q/(1-pq)]", 2)],
                vec![
                    ("mix[p](x, x)", "x"),
                    ("mix[p](x, y)", "mix[1-p](y, x)"),
                    ("mix[q](mix[p](x, y), z)", "mix[pq](x, mix[(1-p)q/(1-pq)](y, z))"),
                ],
            ),
            Builtin::Monoid => (
                vec![("mul", 2), ("e", 0)],
                vec![("mul(x, mul(y, z))", "mul(mul(x, y), z)"), ("mul(x, e())", "x"), ("mul(e(), x)", "x")],
            ),
            Builtin::CommutativeMonoid => (
                vec![("mul", 2), ("e", 0)],
                vec![("mul(x, mul(y, z))", "mul(mul(x, y), z)"), ("mul(x, y)", "mul(y, x)"), ("mul(x, e())", "x")],
            ),
            Builtin::Truncation => (vec![], vec![("x", "y")]),
        }
    }

    /// Interprets a term of the presentation in the free model; variables
    /// are looked up in `env`. Convex operations carry their weight in the
    /// index, e.g. `mix[1/3]`.
    pub fn interpret(self, t: &AlgTerm, env: &dyn Fn(&str) -> Value) -> Result<Value, String> {
        match t {
            AlgTerm::Var(x) => Ok(self.unit(&env(x))),
            AlgTerm::Op(f, args) => {
                let vs = args.iter().map(|a| self.interpret(a, env)).collect::<Result<Vec<_>, _>>()?;
                let bad = || format!("`{f}` with {} arguments is not an operation of the {self} theory", vs.len());
                match (self, f.as_str(), vs.as_slice()) {
                    (Builtin::Semilattice, "bot", []) => Ok(Value::Set(vec![])),
                    (Builtin::Semilattice, "join", [a, b]) => {
                        Ok(Value::set([self.generators(a), self.generators(b)].concat()))
                    }
                    (Builtin::Monoid, "e", []) => Ok(Value::List(vec![])),
                    (Builtin::CommutativeMonoid, "e", []) => Ok(Value::Bag(vec![])),
                    (Builtin::Monoid, "mul", [a, b]) => Ok(Value::List([self.generators(a), self.generators(b)].concat())),
                    (Builtin::CommutativeMonoid, "mul", [a, b]) => Ok(Value::bag([self.generators(a), self.generators(b)].concat())),
                    (Builtin::Convex, g, [a, b]) => {
                        let p = g
                            .strip_prefix("mix[")
                            .and_then(|r| r.strip_suffix(']'))
                            .and_then(|r| r.parse::<Rational>().ok())
                            .filter(|p| *p > Rational::zero() && *p < Rational::one())
                            .ok_or_else(bad)?;
                        let (Value::Dist(da), Value::Dist(db)) = (a, b) else { return Err(bad()) };
                        let mut acc: Vec<(Value, Rational)> = da.iter().map(|(x, w)| (x.clone(), p * w)).collect();
                        acc.extend(db.iter().map(|(x, w)| (x.clone(), (Rational::one() - p) * w)));
                        Ok(Value::dist(acc))
                    }
                    _ => Err(bad()),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_alg_term;

    fn budget() -> Budget {
        Budget::default()
    }

    #[test]
    fn carrier_sizes_match_estimates() {
        for b in ALL {
            for n in 0..=3 {
                let xs = Value::ints(n);
                let c = b.carrier(&xs, &budget()).unwrap();
                if b != Builtin::Convex {
                    assert_eq!(c.len() as u128, b.carrier_size(n, &budget()), "{b} on {n}");
                } else {
                    assert!(c.len() as u128 <= b.carrier_size(n, &budget()));
                }
            }
        }
    }

    #[test]
    fn convex_on_two_points() {
        let c = Builtin::Convex.carrier(&[Value::atom("a"), Value::atom("b")], &budget()).unwrap();
        // weights of `a`: 0, 1/4, 1/3, 1/2, 2/3, 3/4, 1
        assert_eq!(c.len(), 7);
    }

    #[test]
    fn interpretation_of_presentations() {
        let env = |x: &str| Value::atom(x);
        let t = parse_alg_term("join(x, join(bot(), y))").unwrap();
        assert_eq!(Builtin::Semilattice.interpret(&t, &env).unwrap().to_string(), "{x, y}");
        let t = parse_alg_term("mix[1/2](x, mix[1/2](x, y))").unwrap();
        assert_eq!(Builtin::Convex.interpret(&t, &env).unwrap().to_string(), "{x: 3/4, y: 1/4}");
        let t = parse_alg_term("mul(y, mul(e(), x))").unwrap();
        assert_eq!(Builtin::CommutativeMonoid.interpret(&t, &env).unwrap().to_string(), "{|x, y|}");
        assert!(Builtin::Convex.interpret(&parse_alg_term("mix[2](x, y)").unwrap(), &env).is_err());
    }

    #[test]
    fn presentations_parse() {
        for b in ALL {
            let (_, eqs) = b.presentation();
            for (l, r) in eqs {
                parse_alg_term(l).unwrap();
                parse_alg_term(r).unwrap();
            }
        }
    }
}
