//! Coalgebras as text.
//!
//! ```text
//! functor pf(prod(const{a, b}, id))
//! states 3
//! 0 -a-> 1          # an edge, for pf(prod(const{..}, id))
//! 2 = {(b, 0)}      # a whole successor structure
//! ```
//!
//! Elements are written as they print: `(x, y)`, `inl x`, `{..}` for sets,
//! `{|..|}` for bags, `[..]` for lists, `{x: 1/2, y: 1/2}` for
//! distributions and `*` for the point. States are numbers.

use std::fmt::Write as _;

use super::{Coalgebra, FunctorExpr};
use crate::theories::Builtin;
use crate::value::{Rational, Value};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct CoalgebraParseError {
    pub line: usize,
    pub message: String,
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.s[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), String> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(format!("expected `{tok}` at column {}", self.pos + 1))
        }
    }

    fn word(&mut self) -> String {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && !b" \t,(){}[]|:".contains(&self.s[self.pos]) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
    }

    /// Elements separated by commas up to `close`.
    fn list(&mut self, close: &str, item: &mut dyn FnMut(&mut Self) -> Result<(), String>) -> Result<(), String> {
        if self.eat(close) {
            return Ok(());
        }
        loop {
            item(self)?;
            if self.eat(close) {
                return Ok(());
            }
            self.expect(",")?;
        }
    }
}

fn elem(f: &FunctorExpr, states: usize, c: &mut Cursor) -> Result<Value, String> {
    match f {
        FunctorExpr::Const(vals) => {
            let w = c.word();
            vals.iter().find(|v| v.to_string() == w).cloned().ok_or_else(|| format!("`{w}` is not one of the constants of {f}"))
        }
        FunctorExpr::Id => {
            let w = c.word();
            match w.parse::<usize>() {
                Ok(i) if i < states => Ok(Value::Int(i as i64)),
                _ => Err(format!("`{w}` is not a state")),
            }
        }
        FunctorExpr::Prod(a, b) => {
            c.expect("(")?;
            let x = elem(a, states, c)?;
            c.expect(",")?;
            let y = elem(b, states, c)?;
            c.expect(")")?;
            Ok(Value::pair(x, y))
        }
        FunctorExpr::Sum(a, b) => {
            if c.eat("inl") {
                Ok(Value::inl(elem(a, states, c)?))
            } else if c.eat("inr") {
                Ok(Value::inr(elem(b, states, c)?))
            } else {
                Err("expected `inl` or `inr`".into())
            }
        }
        FunctorExpr::Theory(t, a) => {
            let mut items = Vec::new();
            match t {
                Builtin::Semilattice => {
                    c.expect("{")?;
                    c.list("}", &mut |c| {
                        items.push(elem(a, states, c)?);
                        Ok(())
                    })?;
                    Ok(Value::set(items))
                }
                Builtin::CommutativeMonoid => {
                    c.expect("{|")?;
                    c.list("|}", &mut |c| {
                        items.push(elem(a, states, c)?);
                        Ok(())
                    })?;
                    Ok(Value::bag(items))
                }
                Builtin::Monoid => {
                    c.expect("[")?;
                    c.list("]", &mut |c| {
                        items.push(elem(a, states, c)?);
                        Ok(())
                    })?;
                    Ok(Value::List(items))
                }
                Builtin::Truncation => {
                    c.expect("*")?;
                    Ok(Value::Unit)
                }
                Builtin::Convex => {
                    let mut weighted = Vec::new();
                    c.expect("{")?;
                    c.list("}", &mut |c| {
                        let x = elem(a, states, c)?;
                        c.expect(":")?;
                        let w = c.word();
                        let p: Rational = w.parse().map_err(|_| format!("`{w}` is not a fraction"))?;
                        if p <= Rational::from_integer(0) {
                            return Err(format!("weight {p} must be positive"));
                        }
                        weighted.push((x, p));
                        Ok(())
                    })?;
                    let total: Rational = weighted.iter().map(|(_, p)| *p).sum();
                    if total != Rational::from_integer(1) {
                        return Err(format!("weights add up to {total}, not 1"));
                    }
                    Ok(Value::dist(weighted))
                }
            }
        }
    }
}

/// Parses one element of `F(states)`.
pub fn parse_element(f: &FunctorExpr, states: usize, src: &str) -> Result<Value, String> {
    let mut c = Cursor { s: src.as_bytes(), pos: 0 };
    let v = elem(f, states, &mut c)?;
    c.ws();
    if c.pos < c.s.len() {
        return Err(format!("trailing input at column {}", c.pos + 1));
    }
    Ok(v)
}

/// The labels of a `pf(prod(const{..}, id))` functor.
fn edge_labels(f: &FunctorExpr) -> Option<&[Value]> {
    match f {
        FunctorExpr::Theory(Builtin::Semilattice, inner) => match &**inner {
            FunctorExpr::Prod(a, b) if **b == FunctorExpr::Id => match &**a {
                FunctorExpr::Const(c) => Some(c),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

impl Coalgebra {
    pub fn parse(src: &str) -> Result<Coalgebra, CoalgebraParseError> {
        let mut functor = None;
        let mut states = None;
        let mut edges: Vec<Vec<Value>> = Vec::new();
        let mut given: Vec<Option<Value>> = Vec::new();
        for (i, raw) in src.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| CoalgebraParseError { line, message };
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            if let Some(rest) = text.strip_prefix("functor ") {
                functor = Some(FunctorExpr::parse(rest.trim()).map_err(|e| err(e.message))?);
                continue;
            }
            if let Some(rest) = text.strip_prefix("states ") {
                let n: usize = rest.trim().parse().map_err(|_| err(format!("bad state count `{}`", rest.trim())))?;
                states = Some(n);
                edges = vec![Vec::new(); n];
                given = vec![None; n];
                continue;
            }
            let (Some(f), Some(n)) = (&functor, states) else {
                return Err(err("`functor` and `states` must come first".into()));
            };
            let state = |w: &str| -> Result<usize, CoalgebraParseError> {
                w.trim().parse::<usize>().ok().filter(|s| *s < n).ok_or_else(|| err(format!("`{}` is not a state", w.trim())))
            };
            if let Some((lhs, rhs)) = text.split_once('=') {
                let s = state(lhs)?;
                if given[s].is_some() {
                    return Err(err(format!("state {s} given twice")));
                }
                given[s] = Some(parse_element(f, n, rhs).map_err(err)?);
            } else if let Some((src_s, rest)) = text.split_once("-") {
                let labels = edge_labels(f).ok_or_else(|| err(format!("edges need a functor of the form pf(prod(const{{..}}, id)), not {f}")))?;
                let (label, dst) = rest.split_once("->").ok_or_else(|| err("expected `s -a-> t`".into()))?;
                let label = labels
                    .iter()
                    .find(|l| l.to_string() == label.trim())
                    .ok_or_else(|| err(format!("`{}` is not a label", label.trim())))?;
                let (s, t) = (state(src_s)?, state(dst)?);
                edges[s].push(Value::pair(label.clone(), Value::Int(t as i64)));
            } else {
                return Err(err(format!("cannot read `{text}`")));
            }
        }
        let functor = functor.ok_or(CoalgebraParseError { line: 0, message: "missing `functor` line".into() })?;
        let n = states.ok_or(CoalgebraParseError { line: 0, message: "missing `states` line".into() })?;
        let mut structure = Vec::with_capacity(n);
        for (s, (g, es)) in given.into_iter().zip(edges).enumerate() {
            structure.push(match (g, es.is_empty()) {
                (Some(v), true) => v,
                (Some(_), false) => return Err(CoalgebraParseError { line: 0, message: format!("state {s} has both edges and a structure") }),
                (None, _) if edge_labels(&functor).is_some() => Value::set(es),
                (None, _) => return Err(CoalgebraParseError { line: 0, message: format!("state {s} has no structure") }),
            });
        }
        Ok(Coalgebra { functor, states: n, structure })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("functor {}\nstates {}\n", self.functor, self.states);
        for (s, v) in self.structure.iter().enumerate() {
            let _ = writeln!(out, "{s} = {v}");
        }
        out
    }
}
