//! Checking whole `.clott` files.

use serde::Serialize;

use super::context::Entry;
use super::{Checker, Context, Conv, TypeError};
use crate::syntax::{parse_file, Item, ParseError, Term};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ItemOutcome {
    Ok,
    /// A conversion query answered `apart`.
    NotEqual,
    TypeError { rule: String, message: String },
    Unknown { message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ItemReport {
    pub line: usize,
    pub kind: &'static str,
    pub subject: String,
    #[serde(flatten)]
    pub outcome: ItemOutcome,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FileReport {
    pub fuel: usize,
    pub items: Vec<ItemReport>,
}

impl FileReport {
    /// 0 when everything checks, 1 on a type error, 3 when only fuel ran out.
    pub fn exit_code(&self) -> i32 {
        let failed = |o: &ItemOutcome| matches!(o, ItemOutcome::TypeError { .. } | ItemOutcome::NotEqual);
        if self.items.iter().any(|i| failed(&i.outcome)) {
            1
        } else if self.items.iter().any(|i| matches!(i.outcome, ItemOutcome::Unknown { .. })) {
            3
        } else {
            0
        }
    }
}

fn outcome(e: TypeError) -> ItemOutcome {
    match e {
        TypeError::Rule { rule, message } => ItemOutcome::TypeError { rule: rule.to_string(), message },
        e @ TypeError::FuelExhausted { .. } => ItemOutcome::Unknown { message: e.to_string() },
    }
}

impl Checker {
    fn fresh_name(&self, n: &str) -> Result<(), TypeError> {
        if self.ctx.position(n).is_some() {
            return Err(TypeError::rule("context", format!("`{n}` is already declared")));
        }
        Ok(())
    }

    fn run_item(&mut self, item: &Item) -> Result<ItemOutcome, TypeError> {
        match item {
            Item::Clock(k) => {
                self.fresh_name(k)?;
                self.ctx.push(Entry::Clock(k.clone()));
            }
            Item::Tick(a, k) => {
                self.fresh_name(a)?;
                if !self.ctx.is_clock(k) {
                    return Err(TypeError::rule("context", format!("`{k}` is not a clock in scope")));
                }
                self.ctx.push(Entry::Tick { name: a.clone(), clock: k.clone() });
            }
            Item::Assume(x, a) => {
                self.fresh_name(x)?;
                let ty = self.check_type(a)?;
                self.ctx.push(Entry::Var { name: x.clone(), ty, value: None });
            }
            Item::Def(x, a, t) => {
                self.fresh_name(x)?;
                let ty = self.check_type(a)?;
                self.check(t, &ty)?;
                self.ctx.push(Entry::Var { name: x.clone(), ty, value: Some(t.clone()) });
            }
            Item::Check(t, a) => {
                let ty = self.check_type(a)?;
                self.check(t, &ty)?;
            }
            Item::Conv(t, u) => {
                let (l, r) = self.elaborate_pair(t, u)?;
                return Ok(match self.convert(&l, &r) {
                    Conv::Equal => ItemOutcome::Ok,
                    Conv::Apart => ItemOutcome::NotEqual,
                    Conv::Unknown => ItemOutcome::Unknown { message: format!("fuel {} exhausted", self.fuel) },
                });
            }
        }
        Ok(ItemOutcome::Ok)
    }

    /// Types both sides of a conversion query at a common type, or as types.
    fn elaborate_pair(&mut self, t: &Term, u: &Term) -> Result<(Term, Term), TypeError> {
        if let Ok(l) = self.check_type(t) {
            if self.infer(t).is_err() {
                let r = self.check_type(u)?;
                return Ok((l, r));
            }
        }
        let ty = self.infer(t)?;
        self.check(u, &ty)?;
        Ok((t.clone(), u.clone()))
    }
}

fn describe(item: &Item) -> (&'static str, String) {
    match item {
        Item::Clock(k) => ("clock", k.clone()),
        Item::Tick(a, k) => ("tick", format!("{a} : {k}")),
        Item::Assume(x, a) => ("assume", format!("{x} : {a}")),
        Item::Def(x, a, _) => ("def", format!("{x} : {a}")),
        Item::Check(t, a) => ("check", format!("{t} : {a}")),
        Item::Conv(t, u) => ("conv", format!("{t} = {u}")),
    }
}

/// Parses and checks a `.clott` source, continuing past failing items.
pub fn check_source(src: &str, fuel: usize) -> Result<FileReport, ParseError> {
    let items = parse_file(src)?;
    let mut c = Checker::new(Context::new(), fuel);
    let mut report = FileReport { fuel, items: Vec::new() };
    for located in &items {
        let (kind, subject) = describe(&located.item);
        let outcome = c.run_item(&located.item).unwrap_or_else(outcome);
        report.items.push(ItemReport { line: located.line, kind, subject, outcome });
    }
    Ok(report)
}
