//! Free names, capture-avoiding substitution and α-equivalence.

use std::collections::BTreeSet;

use super::term::{Abs, Clocks, Kind, Name, Part, PartMapper, Term};

/// Free names of a term, split by kind.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeNames {
    pub vars: BTreeSet<Name>,
    pub clocks: BTreeSet<Name>,
    pub ticks: BTreeSet<Name>,
}

impl FreeNames {
    pub fn of_kind(&self, kind: Kind) -> &BTreeSet<Name> {
        match kind {
            Kind::Var => &self.vars,
            Kind::Clock => &self.clocks,
            Kind::Tick => &self.ticks,
        }
    }

    fn insert(&mut self, kind: Kind, n: &str) {
        let set = match kind {
            Kind::Var => &mut self.vars,
            Kind::Clock => &mut self.clocks,
            Kind::Tick => &mut self.ticks,
        };
        set.insert(n.to_string());
    }

    pub fn contains(&self, kind: Kind, n: &str) -> bool {
        self.of_kind(kind).contains(n)
    }

    /// Every free name regardless of kind.
    pub fn all(&self) -> BTreeSet<Name> {
        self.vars.iter().chain(&self.clocks).chain(&self.ticks).cloned().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty() && self.clocks.is_empty() && self.ticks.is_empty()
    }
}

pub fn free_names(t: &Term) -> FreeNames {
    fn go(t: &Term, bound: &mut Vec<(Kind, Name)>, out: &mut FreeNames) {
        for (k, n) in t.names() {
            if !bound.iter().any(|(bk, bn)| *bk == k && bn == n) {
                out.insert(k, n);
            }
        }
        for p in t.parts() {
            match p {
                Part::Term(c) => go(c, bound, out),
                Part::Bind(k, abs) => {
                    bound.push((k, abs.name.clone()));
                    go(&abs.body, bound, out);
                    bound.pop();
                }
            }
        }
    }
    let mut out = FreeNames::default();
    go(t, &mut Vec::new(), &mut out);
    out
}

pub fn occurs_free(t: &Term, kind: Kind, n: &str) -> bool {
    free_names(t).contains(kind, n)
}

/// Every name mentioned anywhere in `t`, bound or free, of any kind.
pub fn all_names(t: &Term) -> BTreeSet<Name> {
    fn go(t: &Term, out: &mut BTreeSet<Name>) {
        for (_, n) in t.names() {
            out.insert(n.clone());
        }
        for p in t.parts() {
            match p {
                Part::Term(c) => go(c, out),
                Part::Bind(_, abs) => {
                    out.insert(abs.name.clone());
                    go(&abs.body, out);
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    go(t, &mut out);
    out
}

/// A name derived from `base` that is not in `avoid`.
pub fn fresh(base: &str, avoid: &BTreeSet<Name>) -> Name {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '\'');
    let stem = if stem.is_empty() || stem == "_" { "v" } else { stem };
    if base != "_" && !avoid.contains(base) {
        return base.to_string();
    }
    (0..)
        .map(|i| format!("{stem}{i}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded name supply")
}

enum Replacement<'a> {
    Term(&'a Term),
    Name(&'a str),
}

struct Subst<'a> {
    kind: Kind,
    target: &'a str,
    repl: Replacement<'a>,
    repl_free: BTreeSet<Name>,
}

impl Subst<'_> {
    fn apply(&mut self, t: &Term) -> Term {
        if let (Kind::Var, Term::Var(y), Replacement::Term(u)) = (self.kind, t, &self.repl) {
            if y == self.target {
                return (*u).clone();
            }
        }
        t.map_parts(self)
    }
}

impl PartMapper for Subst<'_> {
    fn name(&mut self, kind: Kind, name: &Name) -> Name {
        match &self.repl {
            Replacement::Name(m) if kind == self.kind && name == self.target => m.to_string(),
            _ => name.clone(),
        }
    }

    fn term(&mut self, t: &Term) -> Term {
        self.apply(t)
    }

    fn bind(&mut self, kind: Kind, abs: &Abs) -> Abs {
        if kind == self.kind && abs.name == self.target {
            return abs.clone();
        }
        if !occurs_free(&abs.body, self.kind, self.target) {
            return abs.clone();
        }
        if self.repl_free.contains(&abs.name) {
            let mut avoid = self.repl_free.clone();
            avoid.extend(all_names(&abs.body));
            avoid.insert(self.target.to_string());
            let renamed = fresh(&abs.name, &avoid);
            let body = rename(&abs.body, kind, &abs.name, &renamed);
            return Abs { name: renamed, body: Box::new(self.apply(&body)) };
        }
        Abs { name: abs.name.clone(), body: Box::new(self.apply(&abs.body)) }
    }
}

fn rename(t: &Term, kind: Kind, from: &str, to: &str) -> Term {
    match kind {
        Kind::Var => subst(t, from, &Term::Var(to.to_string())),
        _ => {
            let mut repl_free = BTreeSet::new();
            repl_free.insert(to.to_string());
            Subst { kind, target: from, repl: Replacement::Name(to), repl_free }.apply(t)
        }
    }
}

/// `t[u/x]`, capture-avoiding.
pub fn subst(t: &Term, x: &str, u: &Term) -> Term {
    let repl_free = free_names(u).all();
    Subst { kind: Kind::Var, target: x, repl: Replacement::Term(u), repl_free }.apply(t)
}

/// `t[k'/k]` on clock names.
pub fn subst_clock(t: &Term, from: &str, to: &str) -> Term {
    rename(t, Kind::Clock, from, to)
}

/// `t[b/a]` on tick names.
pub fn subst_tick(t: &Term, from: &str, to: &str) -> Term {
    rename(t, Kind::Tick, from, to)
}

/// Instantiates a binder's body with a name of the binder's kind.
pub fn instantiate_name(abs: &Abs, kind: Kind, to: &str) -> Term {
    if abs.name == to {
        return (*abs.body).clone();
    }
    rename(&abs.body, kind, &abs.name, to)
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Key<'a> {
    Bound(usize),
    Free(&'a str),
}

type Env<'a> = Vec<(Kind, &'a str, &'a str)>;

fn key_left<'a>(env: &Env<'a>, kind: Kind, n: &'a str) -> Key<'a> {
    match env.iter().rposition(|(k, l, _)| *k == kind && *l == n) {
        Some(i) => Key::Bound(i),
        None => Key::Free(n),
    }
}

fn key_right<'a>(env: &Env<'a>, kind: Kind, n: &'a str) -> Key<'a> {
    match env.iter().rposition(|(k, _, r)| *k == kind && *r == n) {
        Some(i) => Key::Bound(i),
        None => Key::Free(n),
    }
}

fn clock_groups(t: &Term) -> Option<Vec<&Clocks>> {
    match t {
        Term::Univ(d) | Term::Prop(d) | Term::El(d, _) | Term::Prf(d, _) => Some(vec![d]),
        Term::Incl(d1, d2, _) => Some(vec![d1, d2]),
        _ => None,
    }
}

/// Structural equality up to renaming of bound names.
pub fn alpha_eq(t: &Term, u: &Term) -> bool {
    fn go<'a>(t: &'a Term, u: &'a Term, env: &mut Env<'a>) -> bool {
        if std::mem::discriminant(t) != std::mem::discriminant(u) {
            return false;
        }
        if let (Some(gt), Some(gu)) = (clock_groups(t), clock_groups(u)) {
            for (dt, du) in gt.iter().zip(&gu) {
                let mut kt: Vec<Key<'a>> = dt.names().iter().map(|n| key_left(env, Kind::Clock, n)).collect();
                let mut ku: Vec<Key<'a>> = du.names().iter().map(|n| key_right(env, Kind::Clock, n)).collect();
                kt.sort();
                ku.sort();
                if kt != ku {
                    return false;
                }
            }
        } else {
            let (nt, nu) = (t.names(), u.names());
            if nt.len() != nu.len() {
                return false;
            }
            for ((k1, n1), (k2, n2)) in nt.into_iter().zip(nu) {
                if k1 != k2 || key_left(env, k1, n1) != key_right(env, k2, n2) {
                    return false;
                }
            }
        }
        let (pt, pu) = (t.parts(), u.parts());
        if pt.len() != pu.len() {
            return false;
        }
        for (a, b) in pt.into_iter().zip(pu) {
            let ok = match (a, b) {
                (Part::Term(x), Part::Term(y)) => go(x, y, env),
                (Part::Bind(k1, x), Part::Bind(k2, y)) if k1 == k2 => {
                    env.push((k1, x.name.as_str(), y.name.as_str()));
                    let r = go(&x.body, &y.body, env);
                    env.pop();
                    r
                }
                _ => false,
            };
            if !ok {
                return false;
            }
        }
        true
    }
    go(t, u, &mut Vec::new())
}
