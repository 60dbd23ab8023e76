//! Abstract syntax of clocked type theory terms and types.
//!
//! Terms and types share one syntactic category. Every binder is an [`Abs`]
//! whose kind (variable, clock or tick) is fixed by its position in the
//! enclosing constructor, so the generic traversals in this module never
//! need to inspect the constructor to know what a binder binds.

use std::fmt;

pub type Name = String;

/// A sorted, duplicate-free set of clock names annotating a universe.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clocks(Vec<Name>);

impl Clocks {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<Name>,
    {
        let mut v: Vec<Name> = names.into_iter().map(Into::into).collect();
        v.sort();
        v.dedup();
        Clocks(v)
    }

    pub fn empty() -> Self {
        Clocks(Vec::new())
    }

    pub fn names(&self) -> &[Name] {
        &self.0
    }

    pub fn contains(&self, k: &str) -> bool {
        self.0.binary_search_by(|n| n.as_str().cmp(k)).is_ok()
    }

    pub fn is_subset(&self, other: &Clocks) -> bool {
        self.0.iter().all(|k| other.contains(k))
    }

    pub fn with(&self, k: &str) -> Clocks {
        Clocks::new(self.0.iter().cloned().chain(std::iter::once(k.to_string())))
    }

    pub fn without(&self, k: &str) -> Clocks {
        Clocks(self.0.iter().filter(|n| *n != k).cloned().collect())
    }
}

impl fmt::Display for Clocks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.join(" "))
    }
}

/// What sort of name a binder or an occurrence refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Var,
    Clock,
    Tick,
}

/// A single-name binder together with its scope.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Abs {
    pub name: Name,
    pub body: Box<Term>,
}

impl Abs {
    pub fn new(name: impl Into<Name>, body: Term) -> Self {
        Abs { name: name.into(), body: Box::new(body) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Name),
    /// `(t : A)`
    Ann(Box<Term>, Box<Term>),
    /// `fun x -> t`, optionally annotated with the domain.
    Lam(Option<Box<Term>>, Abs),
    App(Box<Term>, Box<Term>),
    Pi(Box<Term>, Abs),
    Sigma(Box<Term>, Abs),
    Pair(Box<Term>, Box<Term>),
    Fst(Box<Term>),
    Snd(Box<Term>),
    Sum(Box<Term>, Box<Term>),
    Inl(Box<Term>),
    Inr(Box<Term>),
    Case(Box<Term>, Abs, Abs),
    Unit,
    Star,
    Empty,
    Absurd(Box<Term>, Box<Term>),
    Id(Box<Term>, Box<Term>, Box<Term>),
    Refl(Box<Term>),
    /// `later (a : k) -> A`, binding the tick `a`.
    Later(Name, Abs),
    /// `tick a : k -> t`; the clock may be left for checking mode.
    TickLam(Option<Name>, Abs),
    /// `t [a]`
    TickApp(Box<Term>, Name),
    /// `forall-clk k -> A`
    Forall(Abs),
    /// `clock k -> t`
    ClockLam(Abs),
    /// `t @ k`
    ClockApp(Box<Term>, Name),
    /// The guarded fixed point combinator, optionally naming its clock.
    Fix(Option<Name>),
    Univ(Clocks),
    El(Clocks, Box<Term>),
    /// Universe inclusion `In{D}{D'} t`.
    Incl(Clocks, Clocks, Box<Term>),
    Prop(Clocks),
    Prf(Clocks, Box<Term>),
    CPi(Box<Term>, Abs),
    CSigma(Box<Term>, Abs),
    CSum(Box<Term>, Box<Term>),
    CUnit,
    CEmpty,
    CId(Box<Term>, Box<Term>, Box<Term>),
    /// Code for later, shared by type and proposition universes.
    CLater(Name, Abs),
    /// Code for clock quantification, shared by both universes.
    CForall(Abs),
    PTop,
    PBot,
    PAnd(Box<Term>, Box<Term>),
    POr(Box<Term>, Box<Term>),
    PExists(Box<Term>, Abs),
    PAll(Box<Term>, Abs),
    PEq(Box<Term>, Box<Term>),
    /// Tick irrelevance applied to a delayed term.
    Tirr(Box<Term>),
    /// Clock irrelevance at a type.
    Cirr(Box<Term>),
    /// The force isomorphism, binding the clock of its type family.
    Force(Abs),
}

/// A child position of a term node.
pub enum Part<'a> {
    Term(&'a Term),
    Bind(Kind, &'a Abs),
}

/// Rebuilds a node from transformed pieces; see [`Term::map_parts`].
pub trait PartMapper {
    fn name(&mut self, kind: Kind, name: &Name) -> Name;
    fn term(&mut self, t: &Term) -> Term;
    fn bind(&mut self, kind: Kind, abs: &Abs) -> Abs;
}

fn b(t: Term) -> Box<Term> {
    Box::new(t)
}

impl Term {
    pub fn var(x: impl Into<Name>) -> Term {
        Term::Var(x.into())
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(b(f), b(a))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn lam(x: impl Into<Name>, body: Term) -> Term {
        Term::Lam(None, Abs::new(x, body))
    }

    pub fn arrow(a: Term, bty: Term) -> Term {
        Term::Pi(b(a), Abs::new("_", bty))
    }

    pub fn pi(x: impl Into<Name>, a: Term, bty: Term) -> Term {
        Term::Pi(b(a), Abs::new(x, bty))
    }

    pub fn sigma(x: impl Into<Name>, a: Term, bty: Term) -> Term {
        Term::Sigma(b(a), Abs::new(x, bty))
    }

    pub fn prod(a: Term, bty: Term) -> Term {
        Term::Sigma(b(a), Abs::new("_", bty))
    }

    pub fn id(a: Term, t: Term, u: Term) -> Term {
        Term::Id(b(a), b(t), b(u))
    }

    /// Non-dependent later `later k A`.
    pub fn later(k: impl Into<Name>, a: Term) -> Term {
        Term::Later(k.into(), Abs::new("_", a))
    }

    pub fn later_dep(k: impl Into<Name>, tick: impl Into<Name>, a: Term) -> Term {
        Term::Later(k.into(), Abs::new(tick, a))
    }

    pub fn tick_lam(tick: impl Into<Name>, k: Option<&str>, body: Term) -> Term {
        Term::TickLam(k.map(str::to_string), Abs::new(tick, body))
    }

    pub fn tick_app(t: Term, tick: impl Into<Name>) -> Term {
        Term::TickApp(b(t), tick.into())
    }

    pub fn forall_clk(k: impl Into<Name>, a: Term) -> Term {
        Term::Forall(Abs::new(k, a))
    }

    pub fn clock_lam(k: impl Into<Name>, t: Term) -> Term {
        Term::ClockLam(Abs::new(k, t))
    }

    pub fn clock_app(t: Term, k: impl Into<Name>) -> Term {
        Term::ClockApp(b(t), k.into())
    }

    pub fn el(d: Clocks, t: Term) -> Term {
        Term::El(d, b(t))
    }

    /// The free-name slots occurring directly at this node.
    pub fn names(&self) -> Vec<(Kind, &Name)> {
        use Term::*;
        match self {
            Var(x) => vec![(Kind::Var, x)],
            Later(k, _) | CLater(k, _) => vec![(Kind::Clock, k)],
            TickLam(Some(k), _) => vec![(Kind::Clock, k)],
            TickApp(_, a) => vec![(Kind::Tick, a)],
            ClockApp(_, k) => vec![(Kind::Clock, k)],
            Fix(Some(k)) => vec![(Kind::Clock, k)],
            Univ(d) | Prop(d) | El(d, _) | Prf(d, _) => d.0.iter().map(|k| (Kind::Clock, k)).collect(),
            Incl(d1, d2, _) => d1.0.iter().chain(d2.0.iter()).map(|k| (Kind::Clock, k)).collect(),
            _ => Vec::new(),
        }
    }

    /// Direct children of this node, in a fixed left-to-right order.
    pub fn parts(&self) -> Vec<Part<'_>> {
        use Part::{Bind, Term as T};
        use Term::*;
        match self {
            Var(_) | Unit | Star | Empty | Univ(_) | Prop(_) | CUnit | CEmpty | PTop | PBot | Fix(_) => vec![],
            Ann(t, a) => vec![T(t), T(a)],
            Lam(ann, abs) => {
                let mut v: Vec<Part<'_>> = ann.iter().map(|t| T(t)).collect();
                v.push(Bind(Kind::Var, abs));
                v
            }
            App(f, a) | Pair(f, a) | Sum(f, a) | Absurd(f, a) | CSum(f, a) | PAnd(f, a) | POr(f, a) | PEq(f, a) => {
                vec![T(f), T(a)]
            }
            Pi(a, abs) | Sigma(a, abs) | CPi(a, abs) | CSigma(a, abs) | PExists(a, abs) | PAll(a, abs) => {
                vec![T(a), Bind(Kind::Var, abs)]
            }
            Fst(t) | Snd(t) | Inl(t) | Inr(t) | Refl(t) | TickApp(t, _) | ClockApp(t, _) | El(_, t) | Prf(_, t)
            | Incl(_, _, t) | Tirr(t) | Cirr(t) => vec![T(t)],
            Case(s, l, r) => vec![T(s), Bind(Kind::Var, l), Bind(Kind::Var, r)],
            Id(a, t, u) | CId(a, t, u) => vec![T(a), T(t), T(u)],
            Later(_, abs) | TickLam(_, abs) | CLater(_, abs) => vec![Bind(Kind::Tick, abs)],
            Forall(abs) | ClockLam(abs) | CForall(abs) | Force(abs) => vec![Bind(Kind::Clock, abs)],
        }
    }

    /// Rebuilds this node with every name slot, child and binder passed
    /// through `m`. The node shape is preserved.
    pub fn map_parts(&self, m: &mut dyn PartMapper) -> Term {
        use Term::*;
        let t = |m: &mut dyn PartMapper, x: &Term| Box::new(m.term(x));
        let cl = |m: &mut dyn PartMapper, d: &Clocks| Clocks::new(d.0.iter().map(|k| m.name(Kind::Clock, k)));
        match self {
            Var(x) => Var(m.name(Kind::Var, x)),
            Unit => Unit,
            Star => Star,
            Empty => Empty,
            CUnit => CUnit,
            CEmpty => CEmpty,
            PTop => PTop,
            PBot => PBot,
            Univ(d) => Univ(cl(m, d)),
            Prop(d) => Prop(cl(m, d)),
            Fix(k) => Fix(k.as_ref().map(|k| m.name(Kind::Clock, k))),
            Ann(x, a) => Ann(t(m, x), t(m, a)),
            Lam(ann, abs) => {
                let ann = ann.as_ref().map(|x| t(m, x));
                Lam(ann, m.bind(Kind::Var, abs))
            }
            App(f, a) => App(t(m, f), t(m, a)),
            Pair(f, a) => Pair(t(m, f), t(m, a)),
            Sum(f, a) => Sum(t(m, f), t(m, a)),
            Absurd(f, a) => Absurd(t(m, f), t(m, a)),
            CSum(f, a) => CSum(t(m, f), t(m, a)),
            PAnd(f, a) => PAnd(t(m, f), t(m, a)),
            POr(f, a) => POr(t(m, f), t(m, a)),
            PEq(f, a) => PEq(t(m, f), t(m, a)),
            Pi(a, abs) => Pi(t(m, a), m.bind(Kind::Var, abs)),
            Sigma(a, abs) => Sigma(t(m, a), m.bind(Kind::Var, abs)),
            CPi(a, abs) => CPi(t(m, a), m.bind(Kind::Var, abs)),
            CSigma(a, abs) => CSigma(t(m, a), m.bind(Kind::Var, abs)),
            PExists(a, abs) => PExists(t(m, a), m.bind(Kind::Var, abs)),
            PAll(a, abs) => PAll(t(m, a), m.bind(Kind::Var, abs)),
            Fst(x) => Fst(t(m, x)),
            Snd(x) => Snd(t(m, x)),
            Inl(x) => Inl(t(m, x)),
            Inr(x) => Inr(t(m, x)),
            Refl(x) => Refl(t(m, x)),
            Tirr(x) => Tirr(t(m, x)),
            Cirr(x) => Cirr(t(m, x)),
            TickApp(x, a) => {
                let x = t(m, x);
                TickApp(x, m.name(Kind::Tick, a))
            }
            ClockApp(x, k) => {
                let x = t(m, x);
                ClockApp(x, m.name(Kind::Clock, k))
            }
            El(d, x) => {
                let d = cl(m, d);
                El(d, t(m, x))
            }
            Prf(d, x) => {
                let d = cl(m, d);
                Prf(d, t(m, x))
            }
            Incl(d1, d2, x) => {
                let d1 = cl(m, d1);
                let d2 = cl(m, d2);
                Incl(d1, d2, t(m, x))
            }
            Case(s, l, r) => {
                let s = t(m, s);
                let l = m.bind(Kind::Var, l);
                Case(s, l, m.bind(Kind::Var, r))
            }
            Id(a, x, y) => Id(t(m, a), t(m, x), t(m, y)),
            CId(a, x, y) => CId(t(m, a), t(m, x), t(m, y)),
            Later(k, abs) => {
                let k = m.name(Kind::Clock, k);
                Later(k, m.bind(Kind::Tick, abs))
            }
            CLater(k, abs) => {
                let k = m.name(Kind::Clock, k);
                CLater(k, m.bind(Kind::Tick, abs))
            }
            TickLam(k, abs) => {
                let k = k.as_ref().map(|k| m.name(Kind::Clock, k));
                TickLam(k, m.bind(Kind::Tick, abs))
            }
            Forall(abs) => Forall(m.bind(Kind::Clock, abs)),
            ClockLam(abs) => ClockLam(m.bind(Kind::Clock, abs)),
            CForall(abs) => CForall(m.bind(Kind::Clock, abs)),
            Force(abs) => Force(m.bind(Kind::Clock, abs)),
        }
    }

    /// Number of nodes; used to bound random generation and reductions.
    pub fn size(&self) -> usize {
        1 + self
            .parts()
            .iter()
            .map(|p| match p {
                Part::Term(t) => t.size(),
                Part::Bind(_, a) => a.body.size(),
            })
            .sum::<usize>()
    }
}
