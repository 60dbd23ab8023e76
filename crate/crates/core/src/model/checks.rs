//! Model-level properties checked fiber by fiber.

use std::rc::Rc;

use serde::Serialize;

use super::category::{clock_name, Site};
use super::presheaf::{site_obj, FinPresheaf};
use super::types::Evaluator;
use super::ModelError;
use crate::theories::Builtin;
use crate::value::Value;

/// Where a canonical map fails to be a bijection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub object: String,
    pub detail: String,
}

fn is_bijection(map: &[usize], target_len: usize) -> bool {
    if map.len() != target_len {
        return false;
    }
    let mut seen = vec![false; target_len];
    map.iter().all(|&j| !std::mem::replace(&mut seen[j], true))
}

/// Invariance under clock introduction: every inclusion
/// `(E, θ, χ) → (E + λ, θ[λ ↦ α], χ)` acts bijectively.
pub fn check_invariance(x: &FinPresheaf) -> Result<(), Counterexample> {
    let site = &x.site;
    for (o, obj) in site.objs.iter().enumerate() {
        if obj.time.size() >= site.max_clocks {
            continue;
        }
        let ident: Vec<Option<usize>> = (0..site.pool).map(|l| obj.time.contains(l).then_some(l)).collect();
        for l in (0..site.pool).filter(|l| !obj.time.contains(*l)) {
            for a in 0..site.bound {
                let target = site_obj(site, &obj.time.with(l, a), &obj.chi).expect("extended object");
                let m = site.find_mor(o, target, &ident).expect("inclusion");
                if !is_bijection(&x.actions[m], x.fibers[target].len()) {
                    return Err(Counterexample {
                        object: obj.to_string(),
                        detail: format!(
                            "adding {}:{a} maps {} element(s) to {} non-bijectively",
                            clock_name(l),
                            x.fibers[o].len(),
                            x.fibers[target].len()
                        ),
                    });
                }
            }
        }
    }
    Ok(())
}

/// The same presheaf seen over one more (unused) clock.
pub fn weaken(x: &FinPresheaf, site: Rc<Site>) -> Result<FinPresheaf, ModelError> {
    let old = &x.site;
    if site.arity != old.arity + 1 {
        return Err(ModelError::Invalid("weaken: the site must have one more clock".into()));
    }
    let objs: Vec<usize> = site
        .objs
        .iter()
        .map(|o| site_obj(old, &o.time, &o.chi[..old.arity]).ok_or_else(|| ModelError::Invalid(format!("weaken: {o} is missing"))))
        .collect::<Result<_, _>>()?;
    let fibers = objs.iter().map(|&i| x.fibers[i].clone()).collect();
    let actions = site
        .mors
        .iter()
        .map(|m| x.actions[old.find_mor(objs[m.src], objs[m.dst], &m.sigma).expect("weakened morphism")].clone())
        .collect();
    Ok(FinPresheaf { site, fibers, actions })
}

/// Checks that `f` maps each fiber of `a` bijectively onto the matching
/// fiber of `b` and commutes with the actions.
fn check_iso(a: &FinPresheaf, b: &FinPresheaf, f: &dyn Fn(usize, &Value) -> Value, what: &str) -> Result<(), Counterexample> {
    let site = &a.site;
    let image = |o: usize| -> Vec<usize> {
        a.fibers[o].iter().map(|v| b.index(o, &f(o, v)).unwrap_or_else(|| panic!("{what}: image outside the fiber"))).collect()
    };
    let maps: Vec<Vec<usize>> = (0..site.objs.len()).map(image).collect();
    for (o, map) in maps.iter().enumerate() {
        if !is_bijection(map, b.fibers[o].len()) {
            return Err(Counterexample {
                object: site.objs[o].to_string(),
                detail: format!("{what}: {} element(s) against {}", a.fibers[o].len(), b.fibers[o].len()),
            });
        }
    }
    for (m, mor) in site.mors.iter().enumerate() {
        for (i, &j) in maps[mor.src].iter().enumerate() {
            if b.actions[m][j] != maps[mor.dst][a.actions[m][i]] {
                return Err(Counterexample { object: site.objs[mor.src].to_string(), detail: format!("{what}: not natural") });
            }
        }
    }
    Ok(())
}

fn items(v: &Value) -> &[Value] {
    match v {
        Value::Tuple(xs) => xs,
        v => panic!("{v} is not a compatible family"),
    }
}

/// The canonical map `A → ∀κ.A` for `A` over `site(d, m + 1)`, compared on
/// `site(d, m)`.
pub fn check_clock_irrelevance(ev: &Evaluator, a: &FinPresheaf) -> Result<(), CheckError> {
    let (d, m) = (a.site.arity, a.site.max_clocks);
    if m == 0 {
        return Err(ModelError::FreshClockExhausted("clock irrelevance needs room for a fresh clock".into()).into());
    }
    let wide = ev.site(d + 1, m)?;
    let target = ev.site(d, m - 1)?;
    let all = ev.forall(&weaken(a, wide)?, &target)?;
    let here = a.restrict(target.clone());
    let f = |o: usize, v: &Value| {
        let obj = &target.objs[o];
        let l = obj.time.fresh().unwrap();
        let src = a.site.obj(obj).unwrap();
        let ident: Vec<Option<usize>> = (0..target.pool).map(|k| obj.time.contains(k).then_some(k)).collect();
        Value::Tuple(
            (0..ev.bound)
                .map(|al| {
                    let dst = site_obj(&a.site, &obj.time.with(l, al), &obj.chi).unwrap();
                    a.act(a.site.find_mor(src, dst, &ident).unwrap(), v)
                })
                .collect(),
        )
    };
    check_iso(&here, &all, &f, "A -> forall A").map_err(CheckError::Fails)
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{}: {}", .0.object, .0.detail)]
    Fails(Counterexample),
}

/// `∀(B + C) ≅ ∀B + ∀C` via the canonical map, for `B`, `C` over one more
/// clock than `target`.
pub fn check_forall_sum(ev: &Evaluator, b: &FinPresheaf, c: &FinPresheaf, target: &Rc<Site>) -> Result<(), CheckError> {
    let lhs = ev.sum(&ev.forall(b, target)?, &ev.forall(c, target)?);
    let rhs = ev.forall(&ev.sum(b, c), target)?;
    let f = |_: usize, v: &Value| match v {
        Value::Inl(fam) => Value::Tuple(items(fam).iter().cloned().map(Value::inl).collect()),
        Value::Inr(fam) => Value::Tuple(items(fam).iter().cloned().map(Value::inr).collect()),
        _ => unreachable!(),
    };
    check_iso(&lhs, &rhs, &f, "forall B + forall C -> forall (B + C)").map_err(CheckError::Fails)
}

/// `∀(B × C) ≅ ∀B × ∀C` via the canonical map.
pub fn check_forall_prod(ev: &Evaluator, b: &FinPresheaf, c: &FinPresheaf, target: &Rc<Site>) -> Result<(), CheckError> {
    let lhs = ev.forall(&ev.product(b, c), target)?;
    let rhs = ev.product(&ev.forall(b, target)?, &ev.forall(c, target)?);
    let f = |_: usize, v: &Value| {
        let (l, r): (Vec<Value>, Vec<Value>) = items(v)
            .iter()
            .map(|p| match p {
                Value::Pair(x, y) => ((**x).clone(), (**y).clone()),
                _ => unreachable!(),
            })
            .unzip();
        Value::pair(Value::Tuple(l), Value::Tuple(r))
    };
    check_iso(&lhs, &rhs, &f, "forall (B x C) -> forall B x forall C").map_err(CheckError::Fails)
}

/// `T(∀A) ≅ ∀T(A)` for a builtin theory: a term over families goes to the
/// family of its stagewise images.
pub fn check_forall_theory(ev: &Evaluator, t: Builtin, a: &FinPresheaf, target: &Rc<Site>) -> Result<(), CheckError> {
    let lhs = ev.theory(t, &ev.forall(a, target)?)?;
    let rhs = ev.forall(&ev.theory(t, a)?, target)?;
    let f = |_: usize, v: &Value| Value::Tuple((0..ev.bound).map(|al| t.map(v, &|fam| items(fam)[al].clone())).collect());
    check_iso(&lhs, &rhs, &f, &format!("{} (forall A) -> forall {} A", t.short(), t.short())).map_err(CheckError::Fails)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ForceReport {
    pub iso: bool,
    /// Least `k` at which the restriction from stage `k + 1` to stage `k`
    /// at the fresh clock is not a bijection.
    pub first_failure_stage: Option<usize>,
    /// Whether the stage chain is bijective from `N − 2` upwards.
    pub stabilises: bool,
    /// A failure that would disappear at a limit ordinal.
    pub truncation_artifact: bool,
    pub counterexample: Option<Counterexample>,
}

/// Compares `∀κ.A` with `∀κ.▷κ A` along the canonical map, for `A` over one
/// more clock than `target`.
pub fn check_force(ev: &Evaluator, a: &FinPresheaf, target: &Rc<Site>) -> Result<ForceReport, ModelError> {
    let src = a.site.clone();
    let k = src.arity - 1;
    let all = ev.forall(a, target)?;
    let all_later = ev.forall(&ev.later(a, k)?, target)?;
    let chain = |o: usize| -> Vec<usize> {
        let obj = &target.objs[o];
        let l = obj.time.fresh().unwrap();
        let chi: Vec<usize> = obj.chi.iter().copied().chain([l]).collect();
        (0..ev.bound).map(|al| site_obj(&src, &obj.time.with(l, al), &chi).unwrap()).collect()
    };
    let mut first_failure = None::<usize>;
    let mut stabilises = true;
    for o in 0..target.objs.len() {
        let c = chain(o);
        for s in 0..ev.bound - 1 {
            let r = src.restriction(c[s + 1], c[s]).unwrap();
            if !is_bijection(&a.actions[r], a.fibers[c[s]].len()) {
                first_failure = Some(first_failure.map_or(s, |f| f.min(s)));
                if s + 2 >= ev.bound {
                    stabilises = false;
                }
            }
        }
    }
    // next at stage α: the restrictions of an element to all earlier stages
    let f = |o: usize, v: &Value| {
        let c = chain(o);
        Value::Tuple(
            items(v)
                .iter()
                .enumerate()
                .map(|(al, x)| Value::Tuple((0..al).map(|b| a.act(src.restriction(c[al], c[b]).unwrap(), x)).collect()))
                .collect(),
        )
    };
    let outcome = check_iso(&all, &all_later, &f, "forall A -> forall later A");
    let iso = outcome.is_ok();
    Ok(ForceReport { iso, first_failure_stage: first_failure, stabilises, truncation_artifact: !iso, counterexample: outcome.err() })
}
