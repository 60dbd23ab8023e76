//! Does `∀κ` commute with `∃`? Both sides evaluated at every fiber for a
//! family `X` over the time category and a predicate on `X × Clk`.

use serde::Serialize;

use super::category::{Site, TimeObj};
use super::presheaf::{site_obj, FinPresheaf};
use super::ModelError;
use crate::value::Value;

/// `φ(object, x, λ)` for `x` in the fiber at the object and `λ` one of its
/// clocks.
pub type Predicate<'a> = &'a dyn Fn(&TimeObj, &Value, usize) -> bool;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberOutcome {
    pub object: String,
    /// `∃x. ∀κ. φ(x, κ)`
    pub lhs: bool,
    /// `∀κ. ∃x. φ(x, κ)`
    pub rhs: bool,
    /// The least `x` that works at every stage of the fresh clock.
    #[serde(serialize_with = "crate::model::experiments::show_opt")]
    pub witness: Option<Value>,
}

pub fn show_opt<S: serde::Serializer>(v: &Option<Value>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_some(&v.to_string()),
        None => s.serialize_none(),
    }
}

impl FiberOutcome {
    pub fn commutes(&self) -> bool {
        self.lhs == self.rhs
    }
}

fn inclusion(site: &Site, o: usize, l: usize, a: usize) -> (usize, usize) {
    let obj = &site.objs[o];
    let target = site_obj(site, &obj.time.with(l, a), &obj.chi).expect("extended object");
    let ident: Vec<Option<usize>> = (0..site.pool).map(|k| obj.time.contains(k).then_some(k)).collect();
    (target, site.find_mor(o, target, &ident).expect("inclusion"))
}

/// The predicate must be preserved along morphisms and invariant under
/// clock introduction.
pub fn check_predicate(x: &FinPresheaf, phi: Predicate) -> Result<(), ModelError> {
    let site = &x.site;
    for (m, mor) in site.mors.iter().enumerate() {
        let (src, dst) = (&site.objs[mor.src].time, &site.objs[mor.dst].time);
        for (i, v) in x.fibers[mor.src].iter().enumerate() {
            let w = &x.fibers[mor.dst][x.actions[m][i]];
            for l in src.clocks() {
                if phi(src, v, l) && !phi(dst, w, mor.sigma[l].unwrap()) {
                    return Err(ModelError::Invalid(format!("predicate not natural: true for {v} at {src}, false after moving to {dst}")));
                }
            }
        }
    }
    for (o, obj) in site.objs.iter().enumerate() {
        if obj.time.size() >= site.max_clocks {
            continue;
        }
        for fresh in (0..site.pool).filter(|l| !obj.time.contains(*l)) {
            for a in 0..site.bound {
                let (t, m) = inclusion(site, o, fresh, a);
                for (i, v) in x.fibers[o].iter().enumerate() {
                    let w = &x.fibers[t][x.actions[m][i]];
                    for l in obj.time.clocks() {
                        if phi(&obj.time, v, l) != phi(&site.objs[t].time, w, l) {
                            return Err(ModelError::Invalid(format!("predicate not invariant under adding a clock at {}", obj.time)));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Evaluates both sides at every object with room for a fresh clock.
pub fn exists_forall_experiment(x: &FinPresheaf, phi: Predicate) -> Result<Vec<FiberOutcome>, ModelError> {
    let site = &x.site;
    if site.arity != 0 {
        return Err(ModelError::Invalid("the family must live over the time category itself".into()));
    }
    check_predicate(x, phi)?;
    let mut rows = Vec::new();
    for (o, obj) in site.objs.iter().enumerate() {
        let Some(l) = obj.time.fresh() else { continue };
        let stages: Vec<(usize, usize)> = (0..site.bound).map(|a| inclusion(site, o, l, a)).collect();
        let uniform = |i: usize| {
            stages.iter().all(|&(t, m)| phi(&site.objs[t].time, &x.fibers[t][x.actions[m][i]], l))
        };
        let witness = (0..x.fibers[o].len()).find(|&i| uniform(i)).map(|i| x.fibers[o][i].clone());
        let rhs = stages.iter().all(|&(t, _)| x.fibers[t].iter().any(|v| phi(&site.objs[t].time, v, l)));
        rows.push(FiberOutcome { object: obj.to_string(), lhs: witness.is_some(), rhs, witness });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniqueExistsReport {
    pub hypothesis_holds: bool,
    /// Only meaningful when the hypothesis holds.
    pub commutes: Option<bool>,
    pub rows: Vec<FiberOutcome>,
}

/// Checks the uniqueness hypothesis in its pointwise form (`x = y` or the
/// stage of `λ` is below `n`), then compares both sides.
pub fn unique_exists_check(x: &FinPresheaf, phi: Predicate, n: usize) -> Result<UniqueExistsReport, ModelError> {
    let site = &x.site;
    let mut holds = true;
    'outer: for (o, obj) in site.objs.iter().enumerate() {
        for l in obj.time.clocks() {
            let sat: Vec<&Value> = x.fibers[o].iter().filter(|v| phi(&obj.time, v, l)).collect();
            if sat.len() > 1 && obj.time.stage(l) >= n {
                holds = false;
                break 'outer;
            }
        }
    }
    if !holds {
        return Ok(UniqueExistsReport { hypothesis_holds: false, commutes: None, rows: Vec::new() });
    }
    let rows = exists_forall_experiment(x, phi)?;
    Ok(UniqueExistsReport { hypothesis_holds: true, commutes: Some(rows.iter().all(FiberOutcome::commutes)), rows })
}
