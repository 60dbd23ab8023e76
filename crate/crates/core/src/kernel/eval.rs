//! Weak-head reduction and conversion.

use std::collections::BTreeSet;

use super::{Checker, Conv, Whnf};
use crate::syntax::subst::instantiate_name;
use crate::syntax::term::Part;
use crate::syntax::{alpha_eq, free_names, fresh, subst, Abs, Clocks, Kind, Name, Term};

/// Raised when the reduction step limit is hit.
#[derive(Debug)]
pub(crate) struct OutOfSteps;

type R<T> = Result<T, OutOfSteps>;

fn bx(t: Term) -> Box<Term> {
    Box::new(t)
}

fn open(abs: &Abs, u: &Term) -> Term {
    subst(&abs.body, &abs.name, u)
}

/// A binder's clock renamed away from `avoid`, as a (name, body) pair.
fn clock_away(abs: &Abs, avoid: &Clocks) -> (Name, Term) {
    if !avoid.contains(&abs.name) {
        return (abs.name.clone(), (*abs.body).clone());
    }
    let mut used: BTreeSet<Name> = free_names(&abs.body).all();
    used.extend(avoid.names().iter().cloned());
    let k = fresh(&abs.name, &used);
    let body = instantiate_name(abs, Kind::Clock, &k);
    (k, body)
}

/// `El_Δ` of a code in weak-head form, when it computes.
fn decode_el(d: &Clocks, c: &Term) -> Option<Term> {
    use Term::*;
    let el = |t: &Term| El(d.clone(), bx(t.clone()));
    Some(match c {
        CPi(a, abs) => Pi(bx(el(a)), Abs::new(abs.name.clone(), el(&abs.body))),
        CSigma(a, abs) => Sigma(bx(el(a)), Abs::new(abs.name.clone(), el(&abs.body))),
        CSum(a, b) => Sum(bx(el(a)), bx(el(b))),
        CUnit => Unit,
        CEmpty => Empty,
        CId(a, t, u) => Id(bx(el(a)), t.clone(), u.clone()),
        CLater(k, abs) => Later(k.clone(), Abs::new(abs.name.clone(), el(&abs.body))),
        CForall(abs) => {
            let (k, body) = clock_away(abs, d);
            Forall(Abs::new(k.clone(), El(d.with(&k), bx(body))))
        }
        Incl(d0, _, s) => El(d0.clone(), s.clone()),
        _ => return None,
    })
}

/// `Prf_Δ` of a proposition in weak-head form, when it computes.
/// Disjunction, existentials and equality stay opaque.
fn decode_prf(d: &Clocks, p: &Term) -> Option<Term> {
    use Term::*;
    let prf = |t: &Term| Prf(d.clone(), bx(t.clone()));
    Some(match p {
        PTop => Unit,
        PBot => Empty,
        PAnd(a, b) => Term::prod(prf(a), prf(b)),
        PAll(a, abs) => Pi(bx(El(d.clone(), a.clone())), Abs::new(abs.name.clone(), prf(&abs.body))),
        CLater(k, abs) => Later(k.clone(), Abs::new(abs.name.clone(), prf(&abs.body))),
        CForall(abs) => {
            let (k, body) = clock_away(abs, d);
            Forall(Abs::new(k.clone(), Prf(d.with(&k), bx(body))))
        }
        Incl(d0, _, s) => Prf(d0.clone(), s.clone()),
        _ => return None,
    })
}

/// Pushes `In_{Δ⊆Δ'}` through a code in weak-head form.
fn commute_incl(d1: &Clocks, d2: &Clocks, c: &Term) -> Option<Term> {
    use Term::*;
    let inc = |t: &Term| Incl(d1.clone(), d2.clone(), bx(t.clone()));
    let under = |abs: &Abs| Abs::new(abs.name.clone(), inc(&abs.body));
    Some(match c {
        Incl(d0, _, s) => Incl(d0.clone(), d2.clone(), s.clone()),
        CPi(a, abs) => CPi(bx(inc(a)), under(abs)),
        CSigma(a, abs) => CSigma(bx(inc(a)), under(abs)),
        CSum(a, b) => CSum(bx(inc(a)), bx(inc(b))),
        CUnit => CUnit,
        CEmpty => CEmpty,
        CId(a, t, u) => CId(bx(inc(a)), t.clone(), u.clone()),
        CLater(k, abs) => CLater(k.clone(), under(abs)),
        CForall(abs) => {
            let both = Clocks::new(d1.names().iter().chain(d2.names()).cloned());
            let (k, body) = clock_away(abs, &both);
            CForall(Abs::new(k.clone(), Incl(d1.with(&k), d2.with(&k), bx(body))))
        }
        PTop => PTop,
        PBot => PBot,
        PAnd(a, b) => PAnd(bx(inc(a)), bx(inc(b))),
        POr(a, b) => POr(bx(inc(a)), bx(inc(b))),
        PExists(a, abs) => PExists(bx(inc(a)), under(abs)),
        PAll(a, abs) => PAll(bx(inc(a)), under(abs)),
        PEq(u, s) => PEq(u.clone(), s.clone()),
        _ => return None,
    })
}

fn worst(a: Conv, b: Conv) -> Conv {
    match (a, b) {
        (Conv::Apart, _) | (_, Conv::Apart) => Conv::Apart,
        (Conv::Unknown, _) | (_, Conv::Unknown) => Conv::Unknown,
        _ => Conv::Equal,
    }
}

impl Checker {
    fn step(&self) -> R<()> {
        let s = self.steps.get();
        if s >= super::STEP_LIMIT {
            return Err(OutOfSteps);
        }
        self.steps.set(s + 1);
        Ok(())
    }

    /// Weak-head reduction without unfolding guarded fixed points.
    pub(crate) fn whnf_core(&self, t: &Term) -> R<Term> {
        use Term::*;
        let mut t = t.clone();
        loop {
            self.step()?;
            let next = match &t {
                Var(x) => match self.ctx.definition(x) {
                    Some(v) => v.clone(),
                    None => return Ok(t),
                },
                Ann(e, _) => (**e).clone(),
                App(f, a) => match self.whnf_core(f)? {
                    Lam(_, abs) => open(&abs, a),
                    f2 => return Ok(App(bx(f2), a.clone())),
                },
                Fst(p) => match self.whnf_core(p)? {
                    Pair(a, _) => *a,
                    p2 => return Ok(Fst(bx(p2))),
                },
                Snd(p) => match self.whnf_core(p)? {
                    Pair(_, b) => *b,
                    p2 => return Ok(Snd(bx(p2))),
                },
                Case(s, l, r) => match self.whnf_core(s)? {
                    Inl(a) => open(l, &a),
                    Inr(b) => open(r, &b),
                    s2 => return Ok(Case(bx(s2), l.clone(), r.clone())),
                },
                TickApp(f, b) => match self.whnf_core(f)? {
                    TickLam(_, abs) => instantiate_name(&abs, Kind::Tick, b),
                    f2 => return Ok(TickApp(bx(f2), b.clone())),
                },
                ClockApp(f, k) => match self.whnf_core(f)? {
                    ClockLam(abs) => instantiate_name(&abs, Kind::Clock, k),
                    f2 => return Ok(ClockApp(bx(f2), k.clone())),
                },
                El(d, c) => {
                    let c2 = self.whnf_core(c)?;
                    match decode_el(d, &c2) {
                        Some(x) => x,
                        None => return Ok(El(d.clone(), bx(c2))),
                    }
                }
                Prf(d, p) => {
                    let p2 = self.whnf_core(p)?;
                    match decode_prf(d, &p2) {
                        Some(x) => x,
                        None => return Ok(Prf(d.clone(), bx(p2))),
                    }
                }
                Incl(d1, d2, c) => {
                    if d1 == d2 {
                        (**c).clone()
                    } else {
                        let c2 = self.whnf_core(c)?;
                        match commute_incl(d1, d2, &c2) {
                            Some(x @ Incl(..)) => x,
                            Some(x) => return Ok(x),
                            None => return Ok(Incl(d1.clone(), d2.clone(), bx(c2))),
                        }
                    }
                }
                _ => return Ok(t),
            };
            t = next;
        }
    }

    /// Unfolds the guarded fixed point blocking a stuck term, if there is one:
    /// `fix f` becomes `f (tick a -> fix f)`.
    pub(crate) fn unfold_head(&self, t: &Term) -> Option<Term> {
        use Term::*;
        match t {
            App(f, a) => {
                if let Fix(k) = &**f {
                    let tick = fresh("a", &free_names(a).all());
                    let delayed = TickLam(k.clone(), Abs::new(tick, Term::app(Fix(k.clone()), (**a).clone())));
                    return Some(Term::app((**a).clone(), delayed));
                }
                self.unfold_head(f).map(|f2| App(bx(f2), a.clone()))
            }
            Fst(p) => self.unfold_head(p).map(|p| Fst(bx(p))),
            Snd(p) => self.unfold_head(p).map(|p| Snd(bx(p))),
            Case(s, l, r) => self.unfold_head(s).map(|s| Case(bx(s), l.clone(), r.clone())),
            TickApp(f, b) => self.unfold_head(f).map(|f| TickApp(bx(f), b.clone())),
            ClockApp(f, k) => self.unfold_head(f).map(|f| ClockApp(bx(f), k.clone())),
            El(d, c) => self.unfold_head(c).map(|c| El(d.clone(), bx(c))),
            Prf(d, c) => self.unfold_head(c).map(|c| Prf(d.clone(), bx(c))),
            Incl(d1, d2, c) => self.unfold_head(c).map(|c| Incl(d1.clone(), d2.clone(), bx(c))),
            _ => None,
        }
    }

    fn take_fuel(&self) -> bool {
        let b = self.budget.get();
        if b == 0 {
            return false;
        }
        self.budget.set(b - 1);
        true
    }

    /// Weak-head normal form, unfolding fixed points while the budget lasts.
    pub(crate) fn whnf_fuelled(&self, t: &Term) -> Whnf {
        let mut cur = match self.whnf_core(t) {
            Ok(x) => x,
            Err(OutOfSteps) => return Whnf::Exhausted(t.clone()),
        };
        while let Some(next) = self.unfold_head(&cur) {
            if !self.take_fuel() {
                return Whnf::Exhausted(cur);
            }
            cur = match self.whnf_core(&next) {
                Ok(x) => x,
                Err(OutOfSteps) => return Whnf::Exhausted(next),
            };
        }
        Whnf::Normal(cur)
    }

    fn avoid(&self, ts: &[&Term]) -> BTreeSet<Name> {
        let mut s = self.ctx.names();
        for t in ts {
            s.extend(free_names(t).all());
        }
        s
    }

    pub(crate) fn conv(&self, t: &Term, u: &Term) -> Conv {
        if alpha_eq(t, u) {
            return Conv::Equal;
        }
        let (t1, u1) = match (self.whnf_core(t), self.whnf_core(u)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return Conv::Unknown,
        };
        let r = self.conv_whnf(&t1, &u1);
        if r == Conv::Equal {
            return r;
        }
        let (ut, uu) = (self.unfold_head(&t1), self.unfold_head(&u1));
        if ut.is_none() && uu.is_none() {
            return r;
        }
        if !self.take_fuel() {
            return Conv::Unknown;
        }
        self.conv(&ut.unwrap_or(t1), &uu.unwrap_or(u1))
    }

    fn conv_bodies(&self, kind: Kind, a: &Abs, b: &Abs) -> Conv {
        let n = fresh(&a.name, &self.avoid(&[&a.body, &b.body]));
        let (x, y) = if kind == Kind::Var {
            let v = Term::Var(n);
            (open(a, &v), open(b, &v))
        } else {
            (instantiate_name(a, kind, &n), instantiate_name(b, kind, &n))
        };
        self.conv(&x, &y)
    }

    /// η-expands `other` against a binder of the given kind.
    fn conv_eta(&self, kind: Kind, abs: &Abs, other: &Term) -> Conv {
        let n = fresh(&abs.name, &self.avoid(&[&abs.body, other]));
        let (body, applied) = match kind {
            Kind::Var => (open(abs, &Term::Var(n.clone())), Term::app(other.clone(), Term::Var(n))),
            Kind::Tick => (instantiate_name(abs, kind, &n), Term::tick_app(other.clone(), n)),
            Kind::Clock => (instantiate_name(abs, kind, &n), Term::clock_app(other.clone(), n)),
        };
        self.conv(&body, &applied)
    }

    fn conv_whnf(&self, t: &Term, u: &Term) -> Conv {
        use Term::*;
        match (t, u) {
            (Lam(_, a), Lam(_, b)) => return self.conv_bodies(Kind::Var, a, b),
            (Lam(_, a), o) | (o, Lam(_, a)) => return self.conv_eta(Kind::Var, a, o),
            (TickLam(_, a), TickLam(_, b)) => return self.conv_bodies(Kind::Tick, a, b),
            (TickLam(_, a), o) | (o, TickLam(_, a)) => return self.conv_eta(Kind::Tick, a, o),
            (ClockLam(a), ClockLam(b)) => return self.conv_bodies(Kind::Clock, a, b),
            (ClockLam(a), o) | (o, ClockLam(a)) => return self.conv_eta(Kind::Clock, a, o),
            (Pair(a, b), Pair(c, d)) => return worst(self.conv(a, c), self.conv(b, d)),
            (Pair(a, b), o) | (o, Pair(a, b)) => {
                let l = self.conv(a, &Fst(bx(o.clone())));
                return worst(l, self.conv(b, &Snd(bx(o.clone()))));
            }
            (Fix(_), Fix(_)) => return Conv::Equal,
            _ => {}
        }
        if std::mem::discriminant(t) != std::mem::discriminant(u) || t.names() != u.names() {
            return Conv::Apart;
        }
        let mut acc = Conv::Equal;
        for (p, q) in t.parts().into_iter().zip(u.parts()) {
            let r = match (p, q) {
                (Part::Term(x), Part::Term(y)) => self.conv(x, y),
                (Part::Bind(k, a), Part::Bind(_, b)) => self.conv_bodies(k, a, b),
                _ => Conv::Apart,
            };
            acc = worst(acc, r);
            if acc == Conv::Apart {
                break;
            }
        }
        acc
    }
}
