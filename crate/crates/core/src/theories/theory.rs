//! Signatures with equations, read from `.thy` files.
//!
//! ```text
//! # comment
//! builtin semilattice
//! op join/2
//! op bot/0
//! eq join(x, y) = join(y, x)
//! eq join(x, bot) = x
//! ```
//!
//! Declared constants may be written without parentheses; any other bare
//! identifier is a variable.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Builtin, TheoryError};
use crate::syntax::{parse_alg_term, AlgTerm, Name};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theory {
    pub name: String,
    pub ops: BTreeMap<Name, usize>,
    pub equations: Vec<(AlgTerm, AlgTerm)>,
    /// Free models come from the builtin normal forms when set.
    pub builtin: Option<Builtin>,
}

/// An equation whose sides have different variables.
pub fn is_drop_equation(lhs: &AlgTerm, rhs: &AlgTerm) -> bool {
    lhs.vars() != rhs.vars()
}

fn resolve_constants(t: AlgTerm, ops: &BTreeMap<Name, usize>) -> AlgTerm {
    match t {
        AlgTerm::Var(x) if ops.get(&x) == Some(&0) => AlgTerm::Op(x, vec![]),
        AlgTerm::Var(x) => AlgTerm::Var(x),
        AlgTerm::Op(f, args) => AlgTerm::Op(f, args.into_iter().map(|a| resolve_constants(a, ops)).collect()),
    }
}

impl Theory {
    pub fn has_drop_equations(&self) -> bool {
        self.equations.iter().any(|(l, r)| is_drop_equation(l, r))
    }

    pub fn drop_equations(&self) -> Vec<&(AlgTerm, AlgTerm)> {
        self.equations.iter().filter(|(l, r)| is_drop_equation(l, r)).collect()
    }

    /// The presentation of a builtin theory.
    pub fn builtin(b: Builtin) -> Theory {
        let (ops, eqs) = b.presentation();
        let ops: BTreeMap<Name, usize> = ops.into_iter().map(|(o, n)| (o.to_string(), n)).collect();
        let parse = |s: &str| resolve_constants(parse_alg_term(s).expect("builtin presentation"), &ops);
        let equations = eqs.into_iter().map(|(l, r)| (parse(l), parse(r))).collect();
        Theory { name: b.name().to_string(), ops, equations, builtin: Some(b) }
    }

    pub fn parse(name: &str, src: &str) -> Result<Theory, TheoryError> {
        let mut ops = BTreeMap::new();
        let mut raw_eqs = Vec::new();
        let mut builtin = None;
        for (i, line) in src.lines().enumerate() {
            let line_no = i + 1;
            let err = |message: String| TheoryError::Parse { line: line_no, message };
            let line = line.split('#').next().unwrap_or("");
            let line = line.split("--").next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match kw {
                "op" => {
                    let (op, n) = rest.rsplit_once('/').ok_or_else(|| err(format!("expected `op name/arity`, found `{rest}`")))?;
                    let op = op.trim();
                    if op.is_empty() || !op.chars().all(|c| c.is_alphanumeric() || "_'[]".contains(c)) {
                        return Err(err(format!("bad operation name `{op}`")));
                    }
                    let n: usize = n.trim().parse().map_err(|_| err(format!("bad arity `{}`", n.trim())))?;
                    if ops.insert(op.to_string(), n).is_some() {
                        return Err(err(format!("operation `{op}` declared twice")));
                    }
                }
                "eq" => {
                    let (l, r) = rest.split_once('=').ok_or_else(|| err("expected `eq lhs = rhs`".into()))?;
                    let l = parse_alg_term(l).map_err(|e| err(e.message))?;
                    let r = parse_alg_term(r).map_err(|e| err(e.message))?;
                    raw_eqs.push((line_no, l, r));
                }
                "builtin" => {
                    builtin = Some(Builtin::from_name(rest).ok_or_else(|| err(format!("unknown builtin theory `{rest}`")))?);
                }
                _ => return Err(err(format!("unknown directive `{kw}`"))),
            }
        }
        let mut equations = Vec::new();
        for (line, l, r) in raw_eqs {
            let (l, r) = (resolve_constants(l, &ops), resolve_constants(r, &ops));
            for t in [&l, &r] {
                t.check_arities(&ops).map_err(|message| TheoryError::Parse { line, message })?;
                if let Some(x) = t.vars().into_iter().find(|x| !x.chars().next().is_some_and(char::is_lowercase)) {
                    return Err(TheoryError::Parse { line, message: format!("variable `{x}` must start with a lowercase letter") });
                }
            }
            equations.push((l, r));
        }
        Ok(Theory { name: name.to_string(), ops, equations, builtin })
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        self.equations.iter().flat_map(|(l, r)| l.vars().into_iter().chain(r.vars())).collect()
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(b) = self.builtin {
            writeln!(f, "builtin {}", b.name())?;
        }
        for (op, n) in &self.ops {
            writeln!(f, "op {op}/{n}")?;
        }
        for (l, r) in &self.equations {
            writeln!(f, "eq {l} = {r}")?;
        }
        Ok(())
    }
}
