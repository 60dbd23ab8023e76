//! Terms over an algebraic signature: variables and operation applications.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::parse::ParseError;
use super::term::Name;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgTerm {
    Var(Name),
    Op(Name, Vec<AlgTerm>),
}

impl AlgTerm {
    pub fn var(x: impl Into<Name>) -> AlgTerm {
        AlgTerm::Var(x.into())
    }

    pub fn op(name: impl Into<Name>, args: Vec<AlgTerm>) -> AlgTerm {
        AlgTerm::Op(name.into(), args)
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            AlgTerm::Var(x) => {
                out.insert(x.clone());
            }
            AlgTerm::Op(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Checks every application against `arity`, reporting the first mismatch.
    pub fn check_arities(&self, arity: &BTreeMap<Name, usize>) -> Result<(), String> {
        match self {
            AlgTerm::Var(_) => Ok(()),
            AlgTerm::Op(f, args) => match arity.get(f) {
                None => Err(format!("unknown operation `{f}`")),
                Some(&n) if n != args.len() => {
                    Err(format!("operation `{f}` has arity {n} but is applied to {} arguments", args.len()))
                }
                Some(_) => args.iter().try_for_each(|a| a.check_arities(arity)),
            },
        }
    }

    pub fn subst(&self, env: &BTreeMap<Name, AlgTerm>) -> AlgTerm {
        match self {
            AlgTerm::Var(x) => env.get(x).cloned().unwrap_or_else(|| self.clone()),
            AlgTerm::Op(f, args) => AlgTerm::Op(f.clone(), args.iter().map(|a| a.subst(env)).collect()),
        }
    }
}

impl fmt::Display for AlgTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgTerm::Var(x) => write!(f, "{x}"),
            AlgTerm::Op(g, args) if args.is_empty() => write!(f, "{g}()"),
            AlgTerm::Op(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Parses `x`, `f()`, `f(t, u)`. Identifiers followed by `(` are operations.
pub fn parse_alg_term(src: &str) -> Result<AlgTerm, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut pos = 0;
    let t = alg(&chars, &mut pos)?;
    skip_ws(&chars, &mut pos);
    if pos < chars.len() {
        return Err(err_at(&chars, pos, "trailing input"));
    }
    Ok(t)
}

fn err_at(chars: &[char], pos: usize, msg: &str) -> ParseError {
    let before = &chars[..pos.min(chars.len())];
    let line = 1 + before.iter().filter(|c| **c == '\n').count();
    let col = 1 + before.iter().rev().take_while(|c| **c != '\n').count();
    ParseError { line, col, message: msg.to_string() }
}

fn skip_ws(chars: &[char], pos: &mut usize) {
    while *pos < chars.len() && chars[*pos].is_whitespace() {
        *pos += 1;
    }
}

fn alg(chars: &[char], pos: &mut usize) -> Result<AlgTerm, ParseError> {
    skip_ws(chars, pos);
    let start = *pos;
    while *pos < chars.len() && (chars[*pos].is_alphanumeric() || chars[*pos] == '_' || chars[*pos] == '\'') {
        *pos += 1;
    }
    if start == *pos {
        return Err(err_at(chars, start, "expected a variable or operation"));
    }
    let mut name: String = chars[start..*pos].iter().collect();
    let indexed = chars.get(*pos) == Some(&'[');
    if indexed {
        // an indexed operation family such as `mix[p]`
        let close = chars[*pos..].iter().position(|c| *c == ']').map(|i| *pos + i);
        let Some(close) = close else {
            return Err(err_at(chars, *pos, "unclosed `[`"));
        };
        name.extend(chars[*pos..=close].iter().filter(|c| !c.is_whitespace()));
        *pos = close + 1;
    }
    skip_ws(chars, pos);
    if chars.get(*pos) != Some(&'(') {
        if indexed {
            return Err(err_at(chars, *pos, "an indexed operation needs arguments"));
        }
        return Ok(AlgTerm::Var(name));
    }
    *pos += 1;
    let mut args = Vec::new();
    skip_ws(chars, pos);
    if chars.get(*pos) == Some(&')') {
        *pos += 1;
        return Ok(AlgTerm::Op(name, args));
    }
    loop {
        args.push(alg(chars, pos)?);
        skip_ws(chars, pos);
        match chars.get(*pos) {
            Some(',') => *pos += 1,
            Some(')') => {
                *pos += 1;
                return Ok(AlgTerm::Op(name, args));
            }
            _ => return Err(err_at(chars, *pos, "expected `,` or `)`")),
        }
    }
}
