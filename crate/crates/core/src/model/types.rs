//! Model-level type expressions and their evaluation to finite presheaves.
//!
//! A type is evaluated in a context of `d` clocks, i.e. as a presheaf over
//! `∫Clk^d`. `later[i]` delays along the `i`-th clock of the context,
//! `forall` binds a new last clock, `mu[i]` ties a recursive knot that may
//! only be used under `later[i]`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use super::category::Site;
use super::presheaf::FinPresheaf;
use super::ModelError;
use crate::coalgebra::functor::{atom_value, FunctorExpr};
use crate::syntax::parse::ParseError;
use crate::syntax::prefix::{parse_prefix, Prefix};
use crate::theories::{Budget, Builtin};
use crate::value::Value;

/// Predicates on the elements of a family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PredExpr {
    True,
    False,
    /// On pairs: both components agree.
    EqPair,
    /// On integers `x`: the stage of context clock `i` is at most `x`.
    StageAtMost(usize),
    And(Box<PredExpr>, Box<PredExpr>),
    Or(Box<PredExpr>, Box<PredExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeExprM {
    Const(Vec<Value>),
    /// The recursion variable of the nearest `Mu`.
    Var,
    Prod(Box<TypeExprM>, Box<TypeExprM>),
    Sum(Box<TypeExprM>, Box<TypeExprM>),
    Arrow(Box<TypeExprM>, Box<TypeExprM>),
    Later(usize, Box<TypeExprM>),
    Forall(Box<TypeExprM>),
    Mu(usize, Box<TypeExprM>),
    Theory(Builtin, Box<TypeExprM>),
    Top,
    Bot,
    And(Box<TypeExprM>, Box<TypeExprM>),
    Or(Box<TypeExprM>, Box<TypeExprM>),
    Exists(Box<TypeExprM>, PredExpr),
    All(Box<TypeExprM>, PredExpr),
}

use TypeExprM as T;

fn bx(t: TypeExprM) -> Box<TypeExprM> {
    Box::new(t)
}

impl TypeExprM {
    pub fn fin(n: usize) -> TypeExprM {
        T::Const(Value::ints(n))
    }

    pub fn prod(a: TypeExprM, b: TypeExprM) -> TypeExprM {
        T::Prod(bx(a), bx(b))
    }

    pub fn sum(a: TypeExprM, b: TypeExprM) -> TypeExprM {
        T::Sum(bx(a), bx(b))
    }

    pub fn arrow(a: TypeExprM, b: TypeExprM) -> TypeExprM {
        T::Arrow(bx(a), bx(b))
    }

    pub fn later(i: usize, a: TypeExprM) -> TypeExprM {
        T::Later(i, bx(a))
    }

    pub fn forall(a: TypeExprM) -> TypeExprM {
        T::Forall(bx(a))
    }

    pub fn mu(i: usize, body: TypeExprM) -> TypeExprM {
        T::Mu(i, bx(body))
    }

    /// `F` with its argument replaced by `arg`.
    pub fn from_functor(f: &FunctorExpr, arg: &TypeExprM) -> TypeExprM {
        match f {
            FunctorExpr::Const(c) => T::Const(c.clone()),
            FunctorExpr::Id => arg.clone(),
            FunctorExpr::Prod(a, b) => T::prod(T::from_functor(a, arg), T::from_functor(b, arg)),
            FunctorExpr::Sum(a, b) => T::sum(T::from_functor(a, arg), T::from_functor(b, arg)),
            FunctorExpr::Theory(t, a) => T::Theory(*t, bx(T::from_functor(a, arg))),
        }
    }

    /// `μX. F(▷ X)` along context clock `i`.
    pub fn guarded_fixpoint(i: usize, f: &FunctorExpr) -> TypeExprM {
        T::mu(i, T::from_functor(f, &T::later(i, T::Var)))
    }

    /// The delay type `μX. A + ▷X` along context clock `i`.
    pub fn delay(i: usize, a: TypeExprM) -> TypeExprM {
        T::mu(i, T::sum(a, T::later(i, T::Var)))
    }

    fn children(&self) -> Vec<&TypeExprM> {
        match self {
            T::Const(_) | T::Var | T::Top | T::Bot => vec![],
            T::Prod(a, b) | T::Sum(a, b) | T::Arrow(a, b) | T::And(a, b) | T::Or(a, b) => vec![a, b],
            T::Later(_, a) | T::Forall(a) | T::Mu(_, a) | T::Theory(_, a) | T::Exists(a, _) | T::All(a, _) => vec![a],
        }
    }

    /// Deepest nesting of `forall`.
    pub fn forall_depth(&self) -> usize {
        let below = self.children().iter().map(|c| c.forall_depth()).max().unwrap_or(0);
        below + usize::from(matches!(self, T::Forall(_)))
    }

    fn has_arrow(&self) -> bool {
        matches!(self, T::Arrow(..)) || self.children().iter().any(|c| c.has_arrow())
    }

    /// Checks clock indices and that recursion variables are guarded.
    /// `guard` is the clock of the enclosing `mu` and whether a matching
    /// `later` has been passed.
    pub fn check_scope(&self, clocks: usize) -> Result<(), ModelError> {
        self.scope(clocks, None)
    }

    fn scope(&self, d: usize, guard: Option<(usize, bool)>) -> Result<(), ModelError> {
        let bad = |m: String| Err(ModelError::Invalid(m));
        match self {
            T::Var => match guard {
                None => bad("recursion variable outside `mu`".into()),
                Some((_, false)) => bad("recursion variable not under `later` on the recursion clock".into()),
                Some((_, true)) => Ok(()),
            },
            T::Later(i, a) => {
                if *i >= d {
                    return bad(format!("clock index {i} with only {d} clocks in context"));
                }
                let g = guard.map(|(k, ok)| (k, ok || k == *i));
                a.scope(d, g)
            }
            T::Mu(i, a) => {
                if *i >= d {
                    return bad(format!("clock index {i} with only {d} clocks in context"));
                }
                a.scope(d, Some((*i, false)))
            }
            T::Forall(a) => {
                if guard.is_some() && a.mentions_var() {
                    return bad("recursion variable under `forall`".into());
                }
                a.scope(d + 1, guard)
            }
            T::Arrow(a, b) => {
                if a.mentions_var() {
                    return bad("recursion variable in the domain of an arrow".into());
                }
                a.scope(d, guard)?;
                b.scope(d, guard)
            }
            T::Exists(a, p) | T::All(a, p) => {
                p.scope(d)?;
                a.scope(d, guard)
            }
            _ => self.children().iter().try_for_each(|c| c.scope(d, guard)),
        }
    }

    fn mentions_var(&self) -> bool {
        match self {
            T::Var => true,
            T::Mu(..) => false,
            _ => self.children().iter().any(|c| c.mentions_var()),
        }
    }

    pub fn parse(src: &str) -> Result<TypeExprM, ParseError> {
        TypeExprM::from_prefix(&parse_prefix(src)?)
    }

    fn from_prefix(p: &Prefix) -> Result<TypeExprM, ParseError> {
        let index = |p: &Prefix| -> Result<usize, ParseError> {
            match &p.index {
                None => Ok(0),
                Some(s) => s.parse().map_err(|_| p.error(format!("bad clock index `{s}`"))),
            }
        };
        let one = |p: &Prefix| -> Result<TypeExprM, ParseError> { TypeExprM::from_prefix(&p.arity(1)?[0]) };
        let two = |p: &Prefix| -> Result<(TypeExprM, TypeExprM), ParseError> {
            let a = p.arity(2)?;
            Ok((TypeExprM::from_prefix(&a[0])?, TypeExprM::from_prefix(&a[1])?))
        };
        if let Ok(n) = p.head.parse::<usize>() {
            p.arity(0)?;
            return Ok(T::fin(n));
        }
        Ok(match p.head.as_str() {
            "X" => T::Var,
            "top" => T::Top,
            "bot" => T::Bot,
            "const" => {
                let atoms = p.atoms.as_ref().ok_or_else(|| p.error("`const` needs a set of atoms"))?;
                let mut vs: Vec<Value> = atoms.iter().map(|a| atom_value(a)).collect();
                vs.sort();
                vs.dedup();
                T::Const(vs)
            }
            "prod" => two(p).map(|(a, b)| T::prod(a, b))?,
            "sum" => two(p).map(|(a, b)| T::sum(a, b))?,
            "arrow" => two(p).map(|(a, b)| T::arrow(a, b))?,
            "and" => two(p).map(|(a, b)| T::And(bx(a), bx(b)))?,
            "or" => two(p).map(|(a, b)| T::Or(bx(a), bx(b)))?,
            "later" => T::later(index(p)?, one(p)?),
            "mu" => T::mu(index(p)?, one(p)?),
            "forall" => T::forall(one(p)?),
            "delay" => T::delay(index(p)?, one(p)?),
            "exists" | "all" => {
                let a = p.arity(2)?;
                let ty = TypeExprM::from_prefix(&a[0])?;
                let pred = PredExpr::from_prefix(&a[1])?;
                if p.head == "exists" {
                    T::Exists(bx(ty), pred)
                } else {
                    T::All(bx(ty), pred)
                }
            }
            h => match Builtin::from_name(h) {
                Some(b) => T::Theory(b, bx(one(p)?)),
                None => return Err(p.error(format!("unknown type former `{h}`"))),
            },
        })
    }
}

impl PredExpr {
    fn from_prefix(p: &Prefix) -> Result<PredExpr, ParseError> {
        Ok(match p.head.as_str() {
            "true" => PredExpr::True,
            "false" => PredExpr::False,
            "eq" => PredExpr::EqPair,
            "stage_le" => {
                let i = match &p.index {
                    None => 0,
                    Some(s) => s.parse().map_err(|_| p.error(format!("bad clock index `{s}`")))?,
                };
                PredExpr::StageAtMost(i)
            }
            "and" | "or" => {
                let a = p.arity(2)?;
                let (l, r) = (Box::new(PredExpr::from_prefix(&a[0])?), Box::new(PredExpr::from_prefix(&a[1])?));
                if p.head == "and" {
                    PredExpr::And(l, r)
                } else {
                    PredExpr::Or(l, r)
                }
            }
            h => return Err(p.error(format!("unknown predicate `{h}`"))),
        })
    }

    fn scope(&self, d: usize) -> Result<(), ModelError> {
        match self {
            PredExpr::StageAtMost(i) if *i >= d => Err(ModelError::Invalid(format!("clock index {i} with only {d} clocks in context"))),
            PredExpr::And(a, b) | PredExpr::Or(a, b) => {
                a.scope(d)?;
                b.scope(d)
            }
            _ => Ok(()),
        }
    }

    /// Truth at an object of the site, for one element of the family.
    pub fn holds(&self, site: &Site, obj: usize, v: &Value) -> Result<bool, ModelError> {
        Ok(match self {
            PredExpr::True => true,
            PredExpr::False => false,
            PredExpr::EqPair => match v {
                Value::Pair(a, b) => a == b,
                v => return Err(ModelError::Invalid(format!("`eq` applied to {v}, which is not a pair"))),
            },
            PredExpr::StageAtMost(i) => match v {
                Value::Int(x) => {
                    let o = &site.objs[obj];
                    (o.time.stage(o.chi[*i]) as i64) <= *x
                }
                v => return Err(ModelError::Invalid(format!("`stage_le` applied to {v}, which is not a number"))),
            },
            PredExpr::And(a, b) => a.holds(site, obj, v)? && b.holds(site, obj, v)?,
            PredExpr::Or(a, b) => a.holds(site, obj, v)? || b.holds(site, obj, v)?,
        })
    }
}

impl fmt::Display for PredExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredExpr::True => write!(f, "true"),
            PredExpr::False => write!(f, "false"),
            PredExpr::EqPair => write!(f, "eq"),
            PredExpr::StageAtMost(0) => write!(f, "stage_le"),
            PredExpr::StageAtMost(i) => write!(f, "stage_le[{i}]"),
            PredExpr::And(a, b) => write!(f, "and({a}, {b})"),
            PredExpr::Or(a, b) => write!(f, "or({a}, {b})"),
        }
    }
}

fn indexed(f: &mut fmt::Formatter<'_>, head: &str, i: usize, a: &TypeExprM) -> fmt::Result {
    if i == 0 {
        write!(f, "{head}({a})")
    } else {
        write!(f, "{head}[{i}]({a})")
    }
}

impl fmt::Display for TypeExprM {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            T::Const(c) if *c == Value::ints(c.len()) => write!(f, "{}", c.len()),
            T::Const(c) => {
                let s: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                write!(f, "const{{{}}}", s.join(", "))
            }
            T::Var => write!(f, "X"),
            T::Top => write!(f, "top"),
            T::Bot => write!(f, "bot"),
            T::Prod(a, b) => write!(f, "prod({a}, {b})"),
            T::Sum(a, b) => write!(f, "sum({a}, {b})"),
            T::Arrow(a, b) => write!(f, "arrow({a}, {b})"),
            T::And(a, b) => write!(f, "and({a}, {b})"),
            T::Or(a, b) => write!(f, "or({a}, {b})"),
            T::Later(i, a) => indexed(f, "later", *i, a),
            T::Mu(i, a) => indexed(f, "mu", *i, a),
            T::Forall(a) => write!(f, "forall({a})"),
            T::Theory(b, a) => write!(f, "{}({a})", b.short()),
            T::Exists(a, p) => write!(f, "exists({a}, {p})"),
            T::All(a, p) => write!(f, "all({a}, {p})"),
        }
    }
}

/// Evaluates type expressions over a fixed clock pool and truncation bound,
/// sharing the enumerated sites.
pub struct Evaluator {
    pub pool: usize,
    pub bound: usize,
    pub budget: Budget,
    /// Search nodes allowed when enumerating natural transformations.
    pub nat_budget: usize,
    sites: RefCell<HashMap<(usize, usize), Rc<Site>>>,
}

fn chain_limit(x: &FinPresheaf, chain: &[usize], limit: usize) -> Result<Vec<Value>, ModelError> {
    let site = &x.site;
    let mut families: Vec<Vec<usize>> = vec![Vec::new()];
    for (j, &oj) in chain.iter().enumerate() {
        let restrict: Vec<usize> = chain[..j].iter().map(|&oi| site.restriction(oj, oi).expect("chain restriction")).collect();
        let mut next = Vec::new();
        for fam in &families {
            for e in 0..x.fibers[oj].len() {
                if restrict.iter().enumerate().all(|(i, &r)| x.actions[r][e] == fam[i]) {
                    let mut f2 = fam.clone();
                    f2.push(e);
                    next.push(f2);
                }
            }
        }
        if next.len() > limit {
            return Err(ModelError::Budget(format!("limit with more than {limit} compatible families")));
        }
        families = next;
    }
    let mut out: Vec<Value> = families
        .into_iter()
        .map(|fam| Value::Tuple(fam.iter().zip(chain).map(|(&e, &o)| x.fibers[o][e].clone()).collect()))
        .collect();
    out.sort();
    Ok(out)
}

fn tuple_items(v: &Value) -> &[Value] {
    match v {
        Value::Tuple(xs) => xs,
        v => panic!("{v} is not a compatible family"),
    }
}

impl Evaluator {
    pub fn new(pool: usize, bound: usize) -> Evaluator {
        Evaluator { pool, bound, budget: Budget::default(), nat_budget: 2_000_000, sites: RefCell::new(HashMap::new()) }
    }

    /// The site of `d` clocks over objects with at most `m` clocks.
    pub fn site(&self, d: usize, m: usize) -> Result<Rc<Site>, ModelError> {
        if let Some(s) = self.sites.borrow().get(&(d, m)) {
            return Ok(s.clone());
        }
        let s = Rc::new(Site::new(self.pool, self.bound, d, m)?);
        self.sites.borrow_mut().insert((d, m), s.clone());
        Ok(s)
    }

    /// Evaluates a type in a context of `d` clocks. Each `forall` needs a
    /// fresh clock, so the result lives on objects with at most
    /// `pool − depth` clocks.
    pub fn eval_type(&self, e: &TypeExprM, d: usize) -> Result<FinPresheaf, ModelError> {
        e.check_scope(d)?;
        let depth = e.forall_depth();
        let needed = depth + usize::from(d > 0);
        if needed > self.pool {
            return Err(ModelError::FreshClockExhausted(format!("{e} needs {depth} fresh clock(s) beyond the context, pool has {}", self.pool)));
        }
        self.eval(e, d, self.pool - depth, None)
    }

    fn eval(&self, e: &TypeExprM, d: usize, m: usize, var: Option<&FinPresheaf>) -> Result<FinPresheaf, ModelError> {
        let site = || self.site(d, m);
        match e {
            T::Const(c) => Ok(FinPresheaf::constant(site()?, c)),
            T::Top => Ok(FinPresheaf::constant(site()?, &[Value::Unit])),
            T::Bot => Ok(FinPresheaf::constant(site()?, &[])),
            T::Var => var.cloned().ok_or_else(|| ModelError::Invalid("recursion variable outside `mu`".into())),
            T::Prod(a, b) => Ok(self.product(&self.eval(a, d, m, var)?, &self.eval(b, d, m, var)?)),
            T::Sum(a, b) => Ok(self.sum(&self.eval(a, d, m, var)?, &self.eval(b, d, m, var)?)),
            T::Arrow(a, b) => self.exponential(&self.eval(a, d, m, var)?, &self.eval(b, d, m, var)?),
            T::Later(i, a) => self.later(&self.eval(a, d, m, var)?, *i),
            T::Forall(a) => {
                let inner = self.eval(a, d + 1, m + 1, None)?;
                self.forall(&inner, &site()?)
            }
            T::Theory(b, a) => self.theory(*b, &self.eval(a, d, m, var)?),
            T::Mu(_, body) => self.mu(body, d, m),
            T::And(a, b) => {
                let (x, y) = (self.eval(a, d, m, var)?, self.eval(b, d, m, var)?);
                let truth = (0..x.fibers.len()).map(|o| !x.fibers[o].is_empty() && !y.fibers[o].is_empty()).collect();
                prop(site()?, truth)
            }
            T::Or(a, b) => {
                let (x, y) = (self.eval(a, d, m, var)?, self.eval(b, d, m, var)?);
                let truth = (0..x.fibers.len()).map(|o| !x.fibers[o].is_empty() || !y.fibers[o].is_empty()).collect();
                prop(site()?, truth)
            }
            T::Exists(a, p) => {
                let x = self.eval(a, d, m, var)?;
                self.exists(&x, p)
            }
            T::All(a, p) => {
                let x = self.eval(a, d, m, var)?;
                self.all(&x, p)
            }
        }
    }

    pub fn product(&self, a: &FinPresheaf, b: &FinPresheaf) -> FinPresheaf {
        let fibers = (0..a.fibers.len())
            .map(|o| a.fibers[o].iter().flat_map(|x| b.fibers[o].iter().map(move |y| Value::pair(x.clone(), y.clone()))).collect())
            .collect();
        FinPresheaf::build(a.site.clone(), fibers, |m, v| match v {
            Value::Pair(x, y) => Value::pair(a.act(m, x), b.act(m, y)),
            _ => unreachable!(),
        })
    }

    pub fn sum(&self, a: &FinPresheaf, b: &FinPresheaf) -> FinPresheaf {
        let fibers = (0..a.fibers.len())
            .map(|o| a.fibers[o].iter().cloned().map(Value::inl).chain(b.fibers[o].iter().cloned().map(Value::inr)).collect())
            .collect();
        FinPresheaf::build(a.site.clone(), fibers, |m, v| match v {
            Value::Inl(x) => Value::inl(a.act(m, x)),
            Value::Inr(y) => Value::inr(b.act(m, y)),
            _ => unreachable!(),
        })
    }

    /// `(▷X)(E, θ, χ) = lim_{α < θ(χ_i)} X(E, θ[χ_i ↦ α], χ)`.
    pub fn later(&self, x: &FinPresheaf, i: usize) -> Result<FinPresheaf, ModelError> {
        let site = x.site.clone();
        if i >= site.arity {
            return Err(ModelError::Invalid(format!("clock index {i} with only {} clocks in context", site.arity)));
        }
        let chains: Vec<Vec<usize>> = site
            .objs
            .iter()
            .map(|o| {
                let l = o.chi[i];
                (0..o.time.stage(l)).map(|a| super::presheaf::site_obj(&site, &o.time.with(l, a), &o.chi).unwrap()).collect()
            })
            .collect();
        let fibers = chains.iter().map(|c| chain_limit(x, c, self.budget.max_elems)).collect::<Result<Vec<_>, _>>()?;
        let s2 = site.clone();
        Ok(FinPresheaf::build(site, fibers, |m, v| {
            let mor = &s2.mors[m];
            let target = &chains[mor.dst];
            let items = tuple_items(v);
            Value::Tuple(
                target
                    .iter()
                    .enumerate()
                    .map(|(b, &ob)| {
                        let k = s2.find_mor(chains[mor.src][b], ob, &mor.sigma).expect("delayed action");
                        x.act(k, &items[b])
                    })
                    .collect(),
            )
        }))
    }

    /// `∀(A)(E, θ, χ) = lim_{α < N} A(E + λ_E, θ[λ_E ↦ α], χ λ_E)` for `A`
    /// over one more clock, onto the site `target`.
    pub fn forall(&self, a: &FinPresheaf, target: &Rc<Site>) -> Result<FinPresheaf, ModelError> {
        let src = &a.site;
        if src.arity != target.arity + 1 || src.max_clocks < target.max_clocks + 1 {
            return Err(ModelError::Invalid("forall: the family is not over one more clock".into()));
        }
        let mut chains = Vec::with_capacity(target.objs.len());
        let mut fresh = Vec::with_capacity(target.objs.len());
        for o in &target.objs {
            let l = o.time.fresh().ok_or_else(|| ModelError::FreshClockExhausted(o.to_string()))?;
            let chi: Vec<usize> = o.chi.iter().copied().chain([l]).collect();
            let chain = (0..self.bound)
                .map(|al| super::presheaf::site_obj(src, &o.time.with(l, al), &chi).ok_or_else(|| ModelError::FreshClockExhausted(o.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            chains.push(chain);
            fresh.push(l);
        }
        let fibers = chains.iter().map(|c| chain_limit(a, c, self.budget.max_elems)).collect::<Result<Vec<_>, _>>()?;
        Ok(FinPresheaf::build(target.clone(), fibers, |m, v| {
            let mor = &target.mors[m];
            let mut sigma = mor.sigma.clone();
            sigma[fresh[mor.src]] = Some(fresh[mor.dst]);
            let items = tuple_items(v);
            Value::Tuple(
                (0..self.bound)
                    .map(|al| {
                        let k = src.find_mor(chains[mor.src][al], chains[mor.dst][al], &sigma).expect("extended action");
                        a.act(k, &items[al])
                    })
                    .collect(),
            )
        }))
    }

    /// A builtin monad applied fiberwise.
    pub fn theory(&self, b: Builtin, x: &FinPresheaf) -> Result<FinPresheaf, ModelError> {
        let fibers = x.fibers.iter().map(|f| b.carrier(f, &self.budget)).collect::<Result<Vec<_>, _>>().map_err(|e| ModelError::Budget(e.to_string()))?;
        Ok(FinPresheaf::build(x.site.clone(), fibers, |m, v| b.map(v, &|e| x.act(m, e))))
    }

    /// The fixpoint of a guarded body, by iterating from the terminal
    /// presheaf: stage `k` is final after `k + 1` rounds, so `N` rounds
    /// reach every stage. One more round would only confirm this, at the
    /// cost of applying the body to the largest fibers again. Under an
    /// arrow a fiber also looks at later objects, so there we iterate to
    /// equality.
    fn mu(&self, body: &TypeExprM, d: usize, m: usize) -> Result<FinPresheaf, ModelError> {
        let mut x = FinPresheaf::constant(self.site(d, m)?, &[Value::Unit]);
        for _ in 0..self.bound {
            x = self.eval(body, d, m, Some(&x))?;
        }
        if !body.has_arrow() {
            return Ok(x);
        }
        for _ in 0..=self.bound {
            let next = self.eval(body, d, m, Some(&x))?;
            if next.fibers == x.fibers && next.actions == x.actions {
                return Ok(next);
            }
            x = next;
        }
        Err(ModelError::Invalid(format!("{body} did not stabilise")))
    }

    pub fn exists(&self, x: &FinPresheaf, p: &PredExpr) -> Result<FinPresheaf, ModelError> {
        let mut truth = Vec::with_capacity(x.fibers.len());
        for (o, fib) in x.fibers.iter().enumerate() {
            let mut any = false;
            for v in fib {
                if p.holds(&x.site, o, v)? {
                    any = true;
                    break;
                }
            }
            truth.push(any);
        }
        prop(x.site.clone(), truth)
    }

    /// Holds at `c` when the predicate holds for every element at every
    /// later object `c → c'`.
    pub fn all(&self, x: &FinPresheaf, p: &PredExpr) -> Result<FinPresheaf, ModelError> {
        let site = &x.site;
        let mut here = Vec::with_capacity(x.fibers.len());
        for (o, fib) in x.fibers.iter().enumerate() {
            let mut every = true;
            for v in fib {
                if !p.holds(site, o, v)? {
                    every = false;
                    break;
                }
            }
            here.push(every);
        }
        let truth = (0..x.fibers.len()).map(|o| site.out[o].iter().all(|&f| here[site.mors[f].dst])).collect();
        prop(site.clone(), truth)
    }

    /// `B^A`: natural families of maps `A(c') → B(c')` indexed by the
    /// morphisms `c → c'`, found by search with propagation.
    pub fn exponential(&self, a: &FinPresheaf, b: &FinPresheaf) -> Result<FinPresheaf, ModelError> {
        let site = a.site.clone();
        let position: Vec<HashMap<usize, usize>> =
            site.out.iter().map(|outs| outs.iter().enumerate().map(|(p, &f)| (f, p)).collect()).collect();
        let mut fibers = Vec::with_capacity(site.objs.len());
        let mut nodes = 0usize;
        for c in 0..site.objs.len() {
            fibers.push(self.natural_families(a, b, c, &position[c], &mut nodes)?);
        }
        let s2 = site.clone();
        Ok(FinPresheaf::build(site, fibers, |h, v| {
            let mor = &s2.mors[h];
            let items = tuple_items(v);
            Value::Tuple(s2.out[mor.dst].iter().map(|&g| items[position[mor.src][&s2.compose(h, g)]].clone()).collect())
        }))
    }

    fn natural_families(
        &self,
        a: &FinPresheaf,
        b: &FinPresheaf,
        c: usize,
        position: &HashMap<usize, usize>,
        nodes: &mut usize,
    ) -> Result<Vec<Value>, ModelError> {
        let site = &a.site;
        let outs = &site.out[c];
        let mut offset = Vec::with_capacity(outs.len() + 1);
        offset.push(0);
        for &f in outs {
            offset.push(offset.last().unwrap() + a.fibers[site.mors[f].dst].len());
        }
        let nvars = *offset.last().unwrap();
        let var_of = |p: usize, e: usize| offset[p] + e;
        let owner: Vec<(usize, usize)> = (0..outs.len()).flat_map(|p| (0..offset[p + 1] - offset[p]).map(move |e| (p, e))).collect();
        let mut assign: Vec<Option<usize>> = vec![None; nvars];
        let mut solutions = Vec::new();

        // Assigns and propagates; returns false on conflict. Newly set
        // variables are pushed on `trail`.
        let propagate = |assign: &mut Vec<Option<usize>>, trail: &mut Vec<usize>, v0: usize, val0: usize| -> bool {
            let mut queue = vec![(v0, val0)];
            while let Some((v, val)) = queue.pop() {
                match assign[v] {
                    Some(w) if w == val => continue,
                    Some(_) => return false,
                    None => {
                        assign[v] = Some(val);
                        trail.push(v);
                    }
                }
                let (p, e) = owner[v];
                let f = outs[p];
                for &g in &site.out[site.mors[f].dst] {
                    let gf = site.compose(f, g);
                    queue.push((var_of(position[&gf], a.actions[g][e]), b.actions[g][val]));
                }
            }
            true
        };

        fn search(
            next: usize,
            assign: &mut Vec<Option<usize>>,
            domain: &dyn Fn(usize) -> usize,
            propagate: &dyn Fn(&mut Vec<Option<usize>>, &mut Vec<usize>, usize, usize) -> bool,
            out: &mut Vec<Vec<usize>>,
            nodes: &mut usize,
            limit: usize,
        ) -> Result<(), ModelError> {
            let Some(v) = (next..assign.len()).find(|&v| assign[v].is_none()) else {
                out.push(assign.iter().map(|x| x.unwrap()).collect());
                return Ok(());
            };
            for val in 0..domain(v) {
                *nodes += 1;
                if *nodes > limit {
                    return Err(ModelError::Budget(format!("natural transformation search beyond {limit} nodes")));
                }
                let mut trail = Vec::new();
                if propagate(assign, &mut trail, v, val) {
                    search(v + 1, assign, domain, propagate, out, nodes, limit)?;
                }
                for t in trail {
                    assign[t] = None;
                }
            }
            Ok(())
        }

        let domain = |v: usize| b.fibers[site.mors[outs[owner[v].0]].dst].len();
        search(0, &mut assign, &domain, &propagate, &mut solutions, nodes, self.nat_budget)?;
        let mut vals: Vec<Value> = solutions
            .into_iter()
            .map(|s| {
                Value::Tuple(
                    (0..outs.len())
                        .map(|p| {
                            let dst = site.mors[outs[p]].dst;
                            Value::Tuple((offset[p]..offset[p + 1]).map(|v| b.fibers[dst][s[v]].clone()).collect())
                        })
                        .collect(),
                )
            })
            .collect();
        vals.sort();
        Ok(vals)
    }
}

/// A proposition given by its truth value at each object; truth must be
/// preserved along morphisms.
fn prop(site: Rc<Site>, truth: Vec<bool>) -> Result<FinPresheaf, ModelError> {
    for m in &site.mors {
        if truth[m.src] && !truth[m.dst] {
            return Err(ModelError::Invalid(format!("predicate true at {} but false at {}", site.objs[m.src], site.objs[m.dst])));
        }
    }
    let fibers = truth.iter().map(|t| if *t { vec![Value::Unit] } else { vec![] }).collect();
    Ok(FinPresheaf::build(site, fibers, |_, v| v.clone()))
}
