//! Canonical printing. The output parses back to an α-equivalent term.

use std::fmt;

use super::subst::occurs_free;
use super::term::{Abs, Kind, Term};

// Precedence levels, loosest first; they mirror the parser's layers.
const BINDER: u8 = 0;
const OR: u8 = 1;
const AND: u8 = 2;
const SUM: u8 = 3;
const PROD: u8 = 4;
const EQ: u8 = 5;
const APP: u8 = 6;
const ARG: u8 = 7;
const ATOM: u8 = 8;

fn dependent(abs: &Abs, kind: Kind) -> bool {
    occurs_free(&abs.body, kind, &abs.name)
}

fn level(t: &Term) -> u8 {
    use Term::*;
    match t {
        Lam(..) | TickLam(..) | ClockLam(_) | Forall(_) | CForall(_) | Force(_) | Case(..) | PExists(..)
        | PAll(..) => BINDER,
        Pi(..) | CPi(..) => BINDER,
        Later(_, abs) | CLater(_, abs) => {
            if dependent(abs, Kind::Tick) {
                BINDER
            } else {
                APP
            }
        }
        Sigma(_, abs) | CSigma(_, abs) => {
            if dependent(abs, Kind::Var) {
                BINDER
            } else {
                PROD
            }
        }
        POr(..) => OR,
        PAnd(..) => AND,
        Sum(..) | CSum(..) => SUM,
        PEq(..) => EQ,
        App(..) | Fst(_) | Snd(_) | Inl(_) | Inr(_) | Refl(_) | Tirr(_) | Cirr(_) | El(..) | Prf(..) | Incl(..)
        | Id(..) | CId(..) | Absurd(..) => APP,
        TickApp(..) | ClockApp(..) => ARG,
        Var(_) | Ann(..) | Pair(..) | Unit | Star | Empty | CUnit | CEmpty | PTop | PBot | Univ(_) | Prop(_)
        | Fix(_) => ATOM,
    }
}

struct P<'a>(&'a Term, u8);

impl fmt::Display for P<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let P(t, ctx) = *self;
        if level(t) < ctx {
            write!(f, "(")?;
            write_term(f, t)?;
            write!(f, ")")
        } else {
            write_term(f, t)
        }
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
    use Term::*;
    match t {
        Var(x) => write!(f, "{x}"),
        Ann(t, a) => write!(f, "({} : {})", P(t, BINDER), P(a, BINDER)),
        Lam(None, abs) => write!(f, "fun {} -> {}", abs.name, P(&abs.body, BINDER)),
        Lam(Some(a), abs) => write!(f, "fun ({} : {}) -> {}", abs.name, P(a, BINDER), P(&abs.body, BINDER)),
        App(g, a) => write!(f, "{} {}", P(g, APP), P(a, ARG)),
        Pi(a, abs) | CPi(a, abs) => {
            let code = if matches!(t, CPi(..)) { "^" } else { "" };
            if dependent(abs, Kind::Var) {
                write!(f, "{code}Pi ({} : {}) -> {}", abs.name, P(a, BINDER), P(&abs.body, BINDER))
            } else {
                write!(f, "{} {code}-> {}", P(a, OR), P(&abs.body, BINDER))
            }
        }
        Sigma(a, abs) | CSigma(a, abs) => {
            let code = if matches!(t, CSigma(..)) { "^" } else { "" };
            if dependent(abs, Kind::Var) {
                write!(f, "{code}Sigma ({} : {}) * {}", abs.name, P(a, BINDER), P(&abs.body, BINDER))
            } else {
                write!(f, "{} {code}* {}", P(a, EQ), P(&abs.body, PROD))
            }
        }
        Pair(a, b) => write!(f, "({}, {})", P(a, BINDER), P(b, BINDER)),
        Fst(t) => write!(f, "fst {}", P(t, ARG)),
        Snd(t) => write!(f, "snd {}", P(t, ARG)),
        Inl(t) => write!(f, "inl {}", P(t, ARG)),
        Inr(t) => write!(f, "inr {}", P(t, ARG)),
        Refl(t) => write!(f, "refl {}", P(t, ARG)),
        Tirr(t) => write!(f, "tirr {}", P(t, ARG)),
        Cirr(t) => write!(f, "cirr {}", P(t, ARG)),
        Sum(a, b) => write!(f, "{} + {}", P(a, PROD), P(b, SUM)),
        CSum(a, b) => write!(f, "{} ^+ {}", P(a, PROD), P(b, SUM)),
        PAnd(a, b) => write!(f, "{} /\\ {}", P(a, SUM), P(b, AND)),
        POr(a, b) => write!(f, "{} \\/ {}", P(a, AND), P(b, OR)),
        PEq(a, b) => write!(f, "{} == {}", P(a, APP), P(b, APP)),
        Case(s, l, r) => {
            // a binder form in the left branch would swallow the `|`
            write!(
                f,
                "case {} of inl {} -> {} | inr {} -> {}",
                P(s, BINDER),
                l.name,
                P(&l.body, OR),
                r.name,
                P(&r.body, BINDER)
            )
        }
        Unit => write!(f, "Unit"),
        Star => write!(f, "tt"),
        Empty => write!(f, "Empty"),
        CUnit => write!(f, "^Unit"),
        CEmpty => write!(f, "^Empty"),
        PTop => write!(f, "top"),
        PBot => write!(f, "bot"),
        Absurd(a, t) => write!(f, "absurd {} {}", P(a, ARG), P(t, ARG)),
        Id(a, t, u) => write!(f, "Id {} {} {}", P(a, ARG), P(t, ARG), P(u, ARG)),
        CId(a, t, u) => write!(f, "^Id {} {} {}", P(a, ARG), P(t, ARG), P(u, ARG)),
        Later(k, abs) | CLater(k, abs) => {
            let code = if matches!(t, CLater(..)) { "^" } else { "" };
            if dependent(abs, Kind::Tick) {
                write!(f, "{code}later ({} : {k}) -> {}", abs.name, P(&abs.body, BINDER))
            } else {
                write!(f, "{code}later {k} {}", P(&abs.body, ARG))
            }
        }
        TickLam(Some(k), abs) => write!(f, "tick {} : {k} -> {}", abs.name, P(&abs.body, BINDER)),
        TickLam(None, abs) => write!(f, "tick {} -> {}", abs.name, P(&abs.body, BINDER)),
        TickApp(t, a) => {
            if matches!(**t, Fix(None)) {
                write!(f, "(fix)[{a}]")
            } else {
                write!(f, "{}[{a}]", P(t, ARG))
            }
        }
        ClockApp(t, k) => write!(f, "{} @{k}", P(t, ARG)),
        Forall(abs) => write!(f, "forall-clk {} -> {}", abs.name, P(&abs.body, BINDER)),
        CForall(abs) => write!(f, "^forall-clk {} -> {}", abs.name, P(&abs.body, BINDER)),
        ClockLam(abs) => write!(f, "clock {} -> {}", abs.name, P(&abs.body, BINDER)),
        Force(abs) => write!(f, "force {} -> {}", abs.name, P(&abs.body, BINDER)),
        PExists(a, abs) => write!(f, "exists ({} : {}) -> {}", abs.name, P(a, BINDER), P(&abs.body, BINDER)),
        PAll(a, abs) => write!(f, "all ({} : {}) -> {}", abs.name, P(a, BINDER), P(&abs.body, BINDER)),
        Fix(None) => write!(f, "fix"),
        Fix(Some(k)) => write!(f, "fix[{k}]"),
        Univ(d) => write!(f, "U{d}"),
        Prop(d) => write!(f, "Prop{d}"),
        El(d, t) => write!(f, "El{d} {}", P(t, ARG)),
        Prf(d, t) => write!(f, "Prf{d} {}", P(t, ARG)),
        Incl(d1, d2, t) => write!(f, "In{d1}{d2} {}", P(t, ARG)),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self)
    }
}
