use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::{Name, Term};

#[derive(Clone, Debug, PartialEq)]
pub enum Entry {
    /// `x : A`, optionally with a definition `x := t`.
    Var { name: Name, ty: Term, value: Option<Term> },
    Clock(Name),
    Tick { name: Name, clock: Name },
}

impl Entry {
    pub fn name(&self) -> &Name {
        match self {
            Entry::Var { name, .. } | Entry::Clock(name) | Entry::Tick { name, .. } => name,
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Var { name, ty, value: None } => write!(f, "{name} : {ty}"),
            Entry::Var { name, ty, value: Some(v) } => write!(f, "{name} : {ty} := {v}"),
            Entry::Clock(k) => write!(f, "{k} : clock"),
            Entry::Tick { name, clock } => write!(f, "{name} : {clock}"),
        }
    }
}

/// An ordered telescope of assumptions.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Context {
    pub entries: Vec<Entry>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, e: Entry) {
        self.entries.push(e);
    }

    pub fn pop(&mut self) -> Option<Entry> {
        self.entries.pop()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn with_clock(mut self, k: &str) -> Self {
        self.push(Entry::Clock(k.into()));
        self
    }

    pub fn with_tick(mut self, a: &str, k: &str) -> Self {
        self.push(Entry::Tick { name: a.into(), clock: k.into() });
        self
    }

    pub fn with_var(mut self, x: &str, ty: Term) -> Self {
        self.push(Entry::Var { name: x.into(), ty, value: None });
        self
    }

    pub fn names(&self) -> BTreeSet<Name> {
        self.entries.iter().map(|e| e.name().clone()).collect()
    }

    pub fn position(&self, n: &str) -> Option<usize> {
        self.entries.iter().rposition(|e| e.name() == n)
    }

    pub fn var(&self, x: &str) -> Option<(&Term, Option<&Term>)> {
        self.entries.iter().rev().find_map(|e| match e {
            Entry::Var { name, ty, value } if name == x => Some((ty, value.as_ref())),
            _ => None,
        })
    }

    pub fn definition(&self, x: &str) -> Option<&Term> {
        self.var(x).and_then(|(_, v)| v)
    }

    pub fn is_clock(&self, k: &str) -> bool {
        self.entries.iter().any(|e| matches!(e, Entry::Clock(n) if n == k))
    }

    /// Position and clock of a tick assumption.
    pub fn tick(&self, a: &str) -> Option<(usize, &Name)> {
        self.entries.iter().enumerate().rev().find_map(|(i, e)| match e {
            Entry::Tick { name, clock } if name == a => Some((i, clock)),
            _ => None,
        })
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}
