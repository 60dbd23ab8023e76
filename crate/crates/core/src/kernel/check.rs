use std::collections::BTreeSet;

use super::axioms::{cirr_type, force_type, tirr_type};
use super::context::Entry;
use super::{Checker, Context, Conv, TResult, TypeError};
use crate::syntax::subst::instantiate_name;
use crate::syntax::{free_names, fresh, occurs_free, subst, Abs, Clocks, Kind, Name, Term};

fn open(abs: &Abs, u: &Term) -> Term {
    subst(&abs.body, &abs.name, u)
}

fn err<T>(rule: &'static str, message: impl Into<String>) -> TResult<T> {
    Err(TypeError::rule(rule, message))
}

/// The body of a binder that does not use its bound name.
fn non_dependent(abs: &Abs, kind: Kind) -> Option<&Term> {
    (!occurs_free(&abs.body, kind, &abs.name)).then_some(&*abs.body)
}

impl Checker {
    fn with<T>(&mut self, e: Entry, f: impl FnOnce(&mut Self) -> TResult<T>) -> TResult<T> {
        self.ctx.push(e);
        let r = f(self);
        self.ctx.pop();
        r
    }

    fn with_var<T>(&mut self, x: &str, ty: Term, f: impl FnOnce(&mut Self) -> TResult<T>) -> TResult<T> {
        self.with(Entry::Var { name: x.into(), ty, value: None }, f)
    }

    fn with_clock<T>(&mut self, k: &str, f: impl FnOnce(&mut Self) -> TResult<T>) -> TResult<T> {
        self.with(Entry::Clock(k.into()), f)
    }

    fn with_tick<T>(&mut self, a: &str, k: &str, f: impl FnOnce(&mut Self) -> TResult<T>) -> TResult<T> {
        self.with(Entry::Tick { name: a.into(), clock: k.into() }, f)
    }

    /// Opens a binder with a name that is new to the context.
    fn enter(&self, kind: Kind, abs: &Abs) -> (Name, Term) {
        let names = self.ctx.names();
        if abs.name != "_" && !names.contains(&abs.name) {
            return (abs.name.clone(), (*abs.body).clone());
        }
        let mut avoid = names;
        avoid.extend(free_names(&abs.body).all());
        let n = fresh(&abs.name, &avoid);
        let body = match kind {
            Kind::Var => open(abs, &Term::Var(n.clone())),
            _ => instantiate_name(abs, kind, &n),
        };
        (n, body)
    }

    fn require_clock(&self, rule: &'static str, k: &str) -> TResult<()> {
        if self.ctx.is_clock(k) {
            Ok(())
        } else {
            err(rule, format!("`{k}` is not a clock in scope"))
        }
    }

    fn require_clocks(&self, rule: &'static str, d: &Clocks) -> TResult<()> {
        d.names().iter().try_for_each(|k| self.require_clock(rule, k))
    }

    pub(crate) fn require_conv(&self, rule: &'static str, expected: &Term, found: &Term) -> TResult<()> {
        match self.convert(expected, found) {
            Conv::Equal => Ok(()),
            Conv::Apart => err(rule, format!("expected `{expected}`, found `{found}`")),
            Conv::Unknown => Err(TypeError::FuelExhausted { lhs: expected.to_string(), rhs: found.to_string() }),
        }
    }

    fn ctx_names(&self) -> BTreeSet<Name> {
        self.ctx.names()
    }

    /// Validates a context entry by entry, leaving it as the session context.
    pub fn check_entries(&mut self, ctx: &Context) -> TResult<()> {
        for e in &ctx.entries {
            if self.ctx.position(e.name()).is_some() {
                return err("context", format!("`{}` is declared twice", e.name()));
            }
            match e {
                Entry::Clock(_) => {}
                Entry::Tick { name, clock } => {
                    if !self.ctx.is_clock(clock) {
                        return err("context", format!("tick `{name}` refers to `{clock}`, which is not an earlier clock"));
                    }
                }
                Entry::Var { name, ty, value } => {
                    let ty = self.check_type(ty)?;
                    if let Some(v) = value {
                        self.check(v, &ty)?;
                    }
                    self.ctx.push(Entry::Var { name: name.clone(), ty, value: value.clone() });
                    continue;
                }
            }
            self.ctx.push(e.clone());
        }
        Ok(())
    }

    /// Checks that `a` is a type and returns it with `El`/`Prf` made explicit.
    pub fn check_type(&mut self, a: &Term) -> TResult<Term> {
        use Term::*;
        Ok(match a {
            Pi(dom, abs) | Sigma(dom, abs) => {
                let dom = self.check_type(dom)?;
                let (n, body) = self.enter(Kind::Var, abs);
                let body = self.with_var(&n, dom.clone(), |s| s.check_type(&body))?;
                let abs = Abs::new(n, body);
                if matches!(a, Pi(..)) {
                    Pi(Box::new(dom), abs)
                } else {
                    Sigma(Box::new(dom), abs)
                }
            }
            Sum(l, r) => Sum(Box::new(self.check_type(l)?), Box::new(self.check_type(r)?)),
            Unit | Empty => a.clone(),
            Id(ty, t, u) => {
                let ty = self.check_type(ty)?;
                self.check(t, &ty)?;
                self.check(u, &ty)?;
                Id(Box::new(ty), t.clone(), u.clone())
            }
            Later(k, abs) => {
                self.require_clock("later", k)?;
                let (n, body) = self.enter(Kind::Tick, abs);
                let body = self.with_tick(&n, k, |s| s.check_type(&body))?;
                Later(k.clone(), Abs::new(n, body))
            }
            Forall(abs) => {
                let (n, body) = self.enter(Kind::Clock, abs);
                let body = self.with_clock(&n, |s| s.check_type(&body))?;
                Forall(Abs::new(n, body))
            }
            Univ(d) | Prop(d) => {
                self.require_clocks("universe", d)?;
                a.clone()
            }
            El(d, t) => {
                self.require_clocks("el", d)?;
                self.check(t, &Univ(d.clone()))?;
                a.clone()
            }
            Prf(d, t) => {
                self.require_clocks("prf", d)?;
                self.check(t, &Prop(d.clone()))?;
                a.clone()
            }
            _ => {
                let ty = self.infer(a)?;
                match self.head(&ty) {
                    Univ(d) => El(d, Box::new(a.clone())),
                    Prop(d) => Prf(d, Box::new(a.clone())),
                    other => return err("type", format!("`{a}` is not a type; it has type `{other}`")),
                }
            }
        })
    }

    pub fn infer(&mut self, t: &Term) -> TResult<Term> {
        use Term::*;
        match t {
            Var(x) => match self.ctx.var(x) {
                Some((ty, _)) => Ok(ty.clone()),
                None if self.ctx.position(x).is_some() => err("var", format!("`{x}` is a clock or tick, not a term")),
                None => err("var", format!("unbound variable `{x}`")),
            },
            Ann(e, a) => {
                let a = self.check_type(a)?;
                self.check(e, &a)?;
                Ok(a)
            }
            Lam(Some(a), abs) => {
                let a = self.check_type(a)?;
                let (n, body) = self.enter(Kind::Var, abs);
                let b = self.with_var(&n, a.clone(), |s| s.infer(&body))?;
                Ok(Pi(Box::new(a), Abs::new(n, b)))
            }
            Lam(None, _) => err("lambda", format!("cannot infer the type of `{t}`; annotate the binder")),
            App(f, a) => {
                if let Fix(k) = &**f {
                    return self.infer_fix_app(k.as_deref(), a);
                }
                let fty = self.infer(f)?;
                match self.head(&fty) {
                    Pi(dom, abs) => {
                        self.check(a, &dom)?;
                        Ok(open(&abs, a))
                    }
                    other => err("app", format!("`{f}` has type `{other}`, which is not a function type")),
                }
            }
            Pair(a, b) => Ok(Term::prod(self.infer(a)?, self.infer(b)?)),
            Fst(p) | Snd(p) => {
                let pty = self.infer(p)?;
                match self.head(&pty) {
                    Sigma(a, abs) => Ok(if matches!(t, Fst(_)) { *a } else { open(&abs, &Fst(p.clone())) }),
                    other => err("projection", format!("`{p}` has type `{other}`, which is not a Σ-type")),
                }
            }
            Inl(_) | Inr(_) => err("sum", format!("cannot infer the type of `{t}`; annotate it")),
            Case(s, l, r) => {
                let (a, b) = self.infer_scrutinee(s)?;
                let (n1, l1) = self.enter(Kind::Var, l);
                let c = self.with_var(&n1, a, |s| s.infer(&l1))?;
                if occurs_free(&c, Kind::Var, &n1) {
                    return err("case", "the branch type depends on the bound variable; annotate the case");
                }
                let (n2, r1) = self.enter(Kind::Var, r);
                self.with_var(&n2, b, |s| s.check(&r1, &c))?;
                Ok(c)
            }
            Star => Ok(Unit),
            Refl(x) => {
                let a = self.infer(x)?;
                Ok(Term::id(a, (**x).clone(), (**x).clone()))
            }
            Absurd(a, e) => {
                let a = self.check_type(a)?;
                self.check(e, &Empty)?;
                Ok(a)
            }
            TickLam(Some(k), abs) => {
                self.require_clock("tick-abs", k)?;
                let (n, body) = self.enter(Kind::Tick, abs);
                let ty = self.with_tick(&n, k, |s| s.infer(&body))?;
                Ok(Later(k.clone(), Abs::new(n, ty)))
            }
            TickLam(None, _) => err("tick-abs", format!("cannot infer the clock of `{t}`; write `tick a : k -> ...`")),
            TickApp(e, b) => self.infer_tick_app(e, b),
            ClockLam(abs) => {
                let (n, body) = self.enter(Kind::Clock, abs);
                let ty = self.with_clock(&n, |s| s.infer(&body))?;
                Ok(Forall(Abs::new(n, ty)))
            }
            ClockApp(e, k) => {
                self.require_clock("clock-app", k)?;
                let ety = self.infer(e)?;
                match self.head(&ety) {
                    Forall(abs) => Ok(instantiate_name(&abs, Kind::Clock, k)),
                    other => err("clock-app", format!("`{e}` has type `{other}`, which is not a clock quantification")),
                }
            }
            Fix(_) => err("fix", "cannot infer the type of a bare `fix`; annotate it or apply it"),
            Univ(_) | Prop(_) | Pi(..) | Sigma(..) | Sum(..) | Unit | Empty | Id(..) | Later(..) | Forall(_)
            | El(..) | Prf(..) => err("type", format!("`{t}` is a type, not a term; use a code")),
            Incl(d1, d2, c) => {
                self.require_clocks("inclusion", d1)?;
                self.require_clocks("inclusion", d2)?;
                if !d1.is_subset(d2) {
                    return err("inclusion", format!("{d1} is not a subset of {d2}"));
                }
                let cty = self.infer(c)?;
                match self.head(&cty) {
                    Univ(d) if d == *d1 => Ok(Univ(d2.clone())),
                    Prop(d) if d == *d1 => Ok(Prop(d2.clone())),
                    other => err("inclusion", format!("`{c}` has type `{other}`, expected a universe indexed by {d1}")),
                }
            }
            Tirr(e) => {
                let ety = self.infer(e)?;
                match self.head(&ety) {
                    Later(k, abs) => match non_dependent(&abs, Kind::Tick) {
                        Some(a) => Ok(tirr_type(&k, a, e, &self.ctx_names())),
                        None => err("tirr", "tick irrelevance applies to non-dependent later types"),
                    },
                    other => err("tirr", format!("`{e}` has type `{other}`, expected a later type")),
                }
            }
            Cirr(a) => {
                let a = self.check_type(a)?;
                Ok(cirr_type(&a, &self.ctx_names()))
            }
            Force(abs) => {
                let (n, body) = self.enter(Kind::Clock, abs);
                let a = self.with_clock(&n, |s| s.check_type(&body))?;
                Ok(force_type(&n, &a, &self.ctx_names()))
            }
            CUnit | CEmpty => Ok(Univ(Clocks::empty())),
            PTop | PBot => Ok(Prop(Clocks::empty())),
            CPi(a, _) | CSigma(a, _) | CSum(a, _) | CId(a, _, _) | PExists(a, _) | PAll(a, _) => {
                let d = self.infer_univ(a)?;
                let u = if matches!(t, PExists(..) | PAll(..)) { Prop(d.clone()) } else { Univ(d.clone()) };
                self.check_code(t, &d, matches!(u, Prop(_)))?;
                Ok(u)
            }
            PAnd(p, _) | POr(p, _) => {
                let pty = self.infer(p)?;
                match self.head(&pty) {
                    Prop(d) => {
                        self.check_code(t, &d, true)?;
                        Ok(Prop(d))
                    }
                    other => err("prop", format!("`{p}` has type `{other}`, expected a universe of propositions")),
                }
            }
            PEq(u, s) => {
                let ty = self.infer(u)?;
                self.check(s, &ty)?;
                match self.small_clocks(&ty) {
                    Some(d) => Ok(Prop(d)),
                    None => err("prop-eq", format!("`{ty}` is not the decoding of a code")),
                }
            }
            CLater(k, abs) => {
                self.require_clock("later-code", k)?;
                let (n, body) = self.enter(Kind::Tick, abs);
                let ty = self.with_tick(&n, k, |s| s.infer(&body))?;
                match self.head(&ty) {
                    Univ(d) | Prop(d) if !d.contains(k) => {
                        err("later-code", format!("the clock `{k}` is not in {d}"))
                    }
                    u @ (Univ(_) | Prop(_)) => Ok(u),
                    other => err("later-code", format!("`{body}` has type `{other}`, expected a universe")),
                }
            }
            CForall(abs) => {
                let (n, body) = self.enter(Kind::Clock, abs);
                let ty = self.with_clock(&n, |s| s.infer(&body))?;
                match self.head(&ty) {
                    Univ(d) => Ok(Univ(d.without(&n))),
                    Prop(d) => Ok(Prop(d.without(&n))),
                    other => err("forall-code", format!("`{body}` has type `{other}`, expected a universe")),
                }
            }
        }
    }

    fn infer_univ(&mut self, a: &Term) -> TResult<Clocks> {
        let ty = self.infer(a)?;
        match self.head(&ty) {
            Term::Univ(d) => Ok(d),
            other => err("code", format!("`{a}` has type `{other}`, expected a universe of types")),
        }
    }

    fn infer_scrutinee(&mut self, s: &Term) -> TResult<(Term, Term)> {
        let sty = self.infer(s)?;
        match self.head(&sty) {
            Term::Sum(a, b) => Ok((*a, *b)),
            other => err("case", format!("`{s}` has type `{other}`, which is not a sum")),
        }
    }

    fn infer_fix_app(&mut self, k: Option<&str>, g: &Term) -> TResult<Term> {
        let gty = self.infer(g)?;
        let (clock, a) = self.fix_step_type(&gty)?;
        if k.is_some_and(|k| k != clock) {
            return err("fix", format!("`fix[{}]` used at clock `{clock}`", k.unwrap_or_default()));
        }
        self.require_clock("fix", &clock)?;
        Ok(a)
    }

    /// Splits `▷κ A → A` into `κ` and `A`.
    fn fix_step_type(&self, ty: &Term) -> TResult<(Name, Term)> {
        let shape = || err("fix", format!("expected a function `later k A -> A`, found `{ty}`"));
        let Term::Pi(dom, abs) = self.head(ty) else { return shape() };
        let Some(a2) = non_dependent(&abs, Kind::Var) else { return shape() };
        let Term::Later(k, labs) = self.head(&dom) else { return shape() };
        let Some(a1) = non_dependent(&labs, Kind::Tick) else { return shape() };
        self.require_conv("fix", a1, a2)?;
        Ok((k, a2.clone()))
    }

    fn check_fix(&mut self, k: Option<&str>, ty: &Term) -> TResult<()> {
        let shape = || err("fix", format!("`fix` must be used at `(later k A -> A) -> A`, not `{ty}`"));
        let Term::Pi(dom, abs) = self.head(ty) else { return shape() };
        let Some(a) = non_dependent(&abs, Kind::Var) else { return shape() };
        let (clock, a2) = self.fix_step_type(&dom)?;
        if k.is_some_and(|k| k != clock) {
            return shape();
        }
        self.require_clock("fix", &clock)?;
        self.require_conv("fix", a, &a2)
    }

    /// Tick application, typing the function in the context before the tick.
    fn infer_tick_app(&mut self, e: &Term, b: &str) -> TResult<Term> {
        let Some((i, clock)) = self.ctx.tick(b) else {
            return err("tick-app", format!("`{b}` is not a tick in scope"));
        };
        let clock = clock.clone();
        let fv = free_names(e).all();
        if let Some(n) = self.ctx.entries[i..].iter().map(Entry::name).find(|n| fv.contains(*n)) {
            return err("tick-app", format!("`{e}` mentions `{n}`, which is not in scope before the tick `{b}`"));
        }
        let tail = self.ctx.entries.split_off(i);
        let r = self.infer(e);
        self.ctx.entries.extend(tail);
        let ety = r?;
        match self.head(&ety) {
            Term::Later(k, abs) if k == clock => Ok(instantiate_name(&abs, Kind::Tick, b)),
            Term::Later(k, _) => err("tick-app", format!("`{e}` is delayed on `{k}` but `{b}` is a tick on `{clock}`")),
            other => err("tick-app", format!("`{e}` has type `{other}`, which is not a later type")),
        }
    }

    /// The least clock set whose universe contains the type, if it is small.
    pub(crate) fn small_clocks(&self, ty: &Term) -> Option<Clocks> {
        use Term::*;
        let union = |a: Clocks, b: Clocks| Clocks::new(a.names().iter().chain(b.names()).cloned());
        match self.head(ty) {
            El(d, _) => Some(d),
            Unit | Empty => Some(Clocks::empty()),
            Sum(a, b) => Some(union(self.small_clocks(&a)?, self.small_clocks(&b)?)),
            Pi(a, abs) | Sigma(a, abs) => {
                let (_, body) = self.enter(Kind::Var, &abs);
                Some(union(self.small_clocks(&a)?, self.small_clocks(&body)?))
            }
            Id(a, _, _) => self.small_clocks(&a),
            Later(k, abs) => {
                let (_, body) = self.enter(Kind::Tick, &abs);
                Some(self.small_clocks(&body)?.with(&k))
            }
            Forall(abs) => {
                let (n, body) = self.enter(Kind::Clock, &abs);
                Some(self.small_clocks(&body)?.without(&n))
            }
            _ => None,
        }
    }

    pub fn check(&mut self, t: &Term, ty: &Term) -> TResult<()> {
        use Term::*;
        let h = self.head(ty);
        match (t, &h) {
            (Lam(ann, abs), Pi(dom, pabs)) => {
                if let Some(a) = ann {
                    let a = self.check_type(a)?;
                    self.require_conv("lambda", dom, &a)?;
                }
                let (n, body) = self.enter(Kind::Var, abs);
                let cod = open(pabs, &Var(n.clone()));
                self.with_var(&n, (**dom).clone(), |s| s.check(&body, &cod))
            }
            (Pair(a, b), Sigma(dom, abs)) => {
                self.check(a, dom)?;
                self.check(b, &open(abs, a))
            }
            (Inl(a), Sum(l, _)) => self.check(a, l),
            (Inr(b), Sum(_, r)) => self.check(b, r),
            (TickLam(k, abs), Later(clock, labs)) => {
                if k.as_ref().is_some_and(|k| k != clock) {
                    return err("tick-abs", format!("tick abstraction on `{}` checked against a later on `{clock}`", k.as_deref().unwrap_or_default()));
                }
                let (n, body) = self.enter(Kind::Tick, abs);
                let cod = instantiate_name(labs, Kind::Tick, &n);
                self.with_tick(&n, clock, |s| s.check(&body, &cod))
            }
            (ClockLam(abs), Forall(fabs)) => {
                let (n, body) = self.enter(Kind::Clock, abs);
                let cod = instantiate_name(fabs, Kind::Clock, &n);
                self.with_clock(&n, |s| s.check(&body, &cod))
            }
            (Fix(k), _) => self.check_fix(k.as_deref(), &h),
            (Case(s, l, r), _) => {
                let (a, b) = self.infer_scrutinee(s)?;
                let (n1, l1) = self.enter(Kind::Var, l);
                self.with_var(&n1, a, |s| s.check(&l1, &h))?;
                let (n2, r1) = self.enter(Kind::Var, r);
                self.with_var(&n2, b, |s| s.check(&r1, &h))
            }
            (Refl(x), Id(a, u, v)) => {
                self.check(x, a)?;
                self.require_conv("refl", u, x)?;
                self.require_conv("refl", v, x)
            }
            (_, Univ(d)) if is_code(t) => self.check_code(t, d, false),
            (_, Prop(d)) if is_code(t) => self.check_code(t, d, true),
            _ => {
                let found = self.infer(t)?;
                self.require_conv("conversion", &h, &found)
            }
        }
    }

    /// Checks a code against `U_Δ` (or `Prop_Δ` when `prop` is set).
    fn check_code(&mut self, t: &Term, d: &Clocks, prop: bool) -> TResult<()> {
        use Term::*;
        let univ = if prop { Prop(d.clone()) } else { Univ(d.clone()) };
        let el = |a: &Term| El(d.clone(), Box::new(a.clone()));
        match (t, prop) {
            (CPi(a, abs) | CSigma(a, abs), false) => {
                self.check(a, &univ)?;
                let (n, body) = self.enter(Kind::Var, abs);
                self.with_var(&n, el(a), |s| s.check(&body, &univ))
            }
            (CSum(a, b), false) => {
                self.check(a, &univ)?;
                self.check(b, &univ)
            }
            (CUnit | CEmpty, false) | (PTop | PBot, true) => Ok(()),
            (CId(a, x, y), false) => {
                self.check(a, &univ)?;
                self.check(x, &el(a))?;
                self.check(y, &el(a))
            }
            (CLater(k, abs), _) => {
                self.require_clock("later-code", k)?;
                if !d.contains(k) {
                    return err("later-code", format!("the clock `{k}` is not in {d}"));
                }
                let (n, body) = self.enter(Kind::Tick, abs);
                self.with_tick(&n, k, |s| s.check(&body, &univ))
            }
            (CForall(abs), _) => {
                let (n, body) = self.enter(Kind::Clock, abs);
                let inner = if prop { Prop(d.with(&n)) } else { Univ(d.with(&n)) };
                self.with_clock(&n, |s| s.check(&body, &inner))
            }
            (PAnd(p, q) | POr(p, q), true) => {
                self.check(p, &univ)?;
                self.check(q, &univ)
            }
            (PExists(a, abs) | PAll(a, abs), true) => {
                self.check(a, &Univ(d.clone()))?;
                let (n, body) = self.enter(Kind::Var, abs);
                self.with_var(&n, el(a), |s| s.check(&body, &univ))
            }
            (PEq(u, s), true) => {
                let ty = self.infer(u)?;
                self.check(s, &ty)?;
                match self.small_clocks(&ty) {
                    Some(d0) if d0.is_subset(d) => Ok(()),
                    Some(d0) => err("prop-eq", format!("`{ty}` lives in the universe for {d0}, not {d}")),
                    None => err("prop-eq", format!("`{ty}` is not the decoding of a code")),
                }
            }
            _ => {
                let what = if prop { "proposition" } else { "type code" };
                err("code", format!("`{t}` is not a {what} for {d}"))
            }
        }
    }
}

fn is_code(t: &Term) -> bool {
    use Term::*;
    matches!(
        t,
        CPi(..)
            | CSigma(..)
            | CSum(..)
            | CUnit
            | CEmpty
            | CId(..)
            | CLater(..)
            | CForall(_)
            | PTop
            | PBot
            | PAnd(..)
            | POr(..)
            | PExists(..)
            | PAll(..)
            | PEq(..)
    )
}
