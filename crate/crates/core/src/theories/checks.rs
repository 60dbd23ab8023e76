//! Exhaustive finite checks on free-model functors: supports, monos,
//! pullbacks of monos and the monad laws.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use super::{Budget, Builtin, FreeMonad, TheoryError};
use crate::value::Value;

/// The least `X' ⊆ X` with `v ∈ T(X')`. For truncation the point of
/// `T(X)` lies in the image of every non-empty subset, so there is a least
/// one only when `X` is a singleton.
pub fn minimal_support(b: Builtin, xs: &[Value], v: &Value) -> Option<BTreeSet<Value>> {
    match b {
        Builtin::Truncation if xs.len() == 1 => Some(xs.iter().cloned().collect()),
        Builtin::Truncation => None,
        _ => Some(b.generators(v).into_iter().collect()),
    }
}

fn subsets(xs: &[Value]) -> Vec<Vec<Value>> {
    (0u32..1 << xs.len()).map(|m| (0..xs.len()).filter(|i| m & (1 << i) != 0).map(|i| xs[i].clone()).collect()).collect()
}

/// Minimisation over all subsets: the subsets whose free model contains
/// `v` (through the inclusion), and the one below all others if any.
pub fn brute_minimal_support(t: &FreeMonad, xs: &[Value], v: &Value) -> Result<Option<BTreeSet<Value>>, TheoryError> {
    let mut supports = Vec::new();
    for s in subsets(xs) {
        let image = t.carrier(&s)?.iter().map(|w| t.map(w, &|x| x.clone(), xs)).collect::<Result<Vec<_>, _>>()?;
        if image.contains(v) {
            supports.push(s.into_iter().collect::<BTreeSet<Value>>());
        }
    }
    Ok(supports.iter().find(|s| supports.iter().all(|o| s.is_subset(o))).cloned())
}

/// A commuting square `P → X`, `P → Z`, `f: X → Y`, `Z ⊆ Y` with `P` the
/// preimage of `Z`, on sets of integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Square {
    pub x: usize,
    pub y: usize,
    pub f: Vec<usize>,
    pub z: Vec<usize>,
    pub p: Vec<usize>,
    /// Size of `T(P)`.
    pub lhs: usize,
    /// Size of `T(X) ×_{T(Y)} T(Z)`.
    pub rhs: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PreservationReport {
    pub bound: usize,
    /// Instances examined.
    pub checked: usize,
    pub failures: usize,
    /// The first failure in enumeration order.
    pub first: Option<Square>,
}

impl PreservationReport {
    pub fn ok(&self) -> bool {
        self.failures == 0
    }
}

fn functions(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|f| (0..k).map(move |y| [f.clone(), vec![y]].concat())).collect();
    }
    out
}

fn injective(f: &[usize]) -> bool {
    f.iter().collect::<HashSet<_>>().len() == f.len()
}

fn apply(f: &[usize]) -> impl Fn(&Value) -> Value + '_ {
    move |x| Value::Int(f[x.as_int().expect("integer element") as usize] as i64)
}

/// `T(i)` is injective for every injection `i: X → Y`, `|X| ≤ |Y| ≤ bound`.
pub fn check_preserves_monos(t: &FreeMonad, bound: usize) -> Result<PreservationReport, TheoryError> {
    let mut report = PreservationReport { bound, checked: 0, failures: 0, first: None };
    for k in 0..=bound {
        let ys = Value::ints(k);
        for n in 0..=k {
            let xs = Value::ints(n);
            let tx = t.carrier(&xs)?;
            for f in functions(n, k).into_iter().filter(|f| injective(f)) {
                report.checked += 1;
                let image = tx.iter().map(|v| t.map(v, &apply(&f), &ys)).collect::<Result<BTreeSet<_>, _>>()?;
                if image.len() != tx.len() {
                    report.failures += 1;
                    report.first.get_or_insert(Square {
                        x: n,
                        y: k,
                        f: f.clone(),
                        z: (0..k).collect(),
                        p: (0..n).collect(),
                        lhs: tx.len(),
                        rhs: image.len(),
                        detail: format!("T(f) identifies {} element(s)", tx.len() - image.len()),
                    });
                }
            }
        }
    }
    Ok(report)
}

/// For every `f: X → Y` and `Z ⊆ Y` with `|X|, |Y| ≤ bound`, the map
/// `T(f⁻¹Z) → T(X) ×_{T(Y)} T(Z)` is a bijection.
pub fn check_preserves_pullbacks_of_monos(t: &FreeMonad, bound: usize) -> Result<PreservationReport, TheoryError> {
    let mut report = PreservationReport { bound, checked: 0, failures: 0, first: None };
    let id = |x: &Value| x.clone();
    for n in 0..=bound {
        let xs = Value::ints(n);
        let tx = t.carrier(&xs)?;
        for k in 0..=bound {
            let ys = Value::ints(k);
            for f in functions(n, k) {
                let fx = tx.iter().map(|u| t.map(u, &apply(&f), &ys)).collect::<Result<Vec<_>, _>>()?;
                for zmask in 0u32..1 << k {
                    let z: Vec<usize> = (0..k).filter(|i| zmask & (1 << i) != 0).collect();
                    let zs: Vec<Value> = z.iter().map(|&i| Value::Int(i as i64)).collect();
                    let p: Vec<usize> = (0..n).filter(|&i| z.contains(&f[i])).collect();
                    let ps: Vec<Value> = p.iter().map(|&i| Value::Int(i as i64)).collect();
                    let tz = t.carrier(&zs)?;
                    let mut pullback = BTreeSet::new();
                    for w in &tz {
                        let wy = t.map(w, &id, &ys)?;
                        for (u, fu) in tx.iter().zip(&fx) {
                            if *fu == wy {
                                pullback.insert((u.clone(), w.clone()));
                            }
                        }
                    }
                    let tp = t.carrier(&ps)?;
                    let image = tp
                        .iter()
                        .map(|v| Ok((t.map(v, &id, &xs)?, t.map(v, &apply(&f), &zs)?)))
                        .collect::<Result<BTreeSet<_>, TheoryError>>()?;
                    report.checked += 1;
                    let bijective = image.len() == tp.len() && image == pullback;
                    if !bijective {
                        report.failures += 1;
                        report.first.get_or_insert_with(|| {
                            let missing = pullback.iter().find(|pair| !image.contains(*pair));
                            Square {
                                x: n,
                                y: k,
                                f: f.clone(),
                                z: z.clone(),
                                p: p.clone(),
                                lhs: tp.len(),
                                rhs: pullback.len(),
                                detail: match missing {
                                    Some((u, w)) => format!("({u}, {w}) is in the pullback but not in the image of T(P)"),
                                    None => "T(P) is not mapped injectively".into(),
                                },
                            }
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonadLawReport {
    pub theory: String,
    /// `μ ∘ η_T = id` and `μ ∘ T(η) = id`, all of `T(X)`, `|X| ≤ unit_bound`.
    pub unit_bound: usize,
    pub unit_checked: usize,
    /// `μ ∘ μ_T = μ ∘ T(μ)` on elements of `T(S)` for `S ⊆ T²(X)` with at
    /// most two elements, `|X| ≤ assoc_bound`.
    pub assoc_bound: usize,
    pub assoc_checked: usize,
    pub failure: Option<String>,
}

/// Checks the monad laws of a builtin. The associativity check uses the
/// smaller `assoc_budget` for the inner carriers.
pub fn check_monad_laws(b: Builtin, budget: &Budget, unit_bound: usize, assoc_budget: &Budget, assoc_bound: usize) -> Result<MonadLawReport, TheoryError> {
    let mut r = MonadLawReport { theory: b.name().into(), unit_bound, unit_checked: 0, assoc_bound, assoc_checked: 0, failure: None };
    for n in 0..=unit_bound {
        for v in b.carrier(&Value::ints(n), budget)? {
            r.unit_checked += 1;
            if b.join(&b.unit(&v)) != v {
                r.failure = Some(format!("join(unit({v})) differs"));
                return Ok(r);
            }
            if b.join(&b.map(&v, &|x| b.unit(x))) != v {
                r.failure = Some(format!("join(T(unit)({v})) differs"));
                return Ok(r);
            }
        }
    }
    for n in 0..=assoc_bound {
        let t1 = b.carrier(&Value::ints(n), assoc_budget)?;
        let t2 = b.carrier(&t1, assoc_budget)?;
        let mut seen = BTreeSet::new();
        for i in 0..t2.len() {
            for j in i..t2.len() {
                let s: Vec<Value> = if i == j { vec![t2[i].clone()] } else { vec![t2[i].clone(), t2[j].clone()] };
                for w in b.carrier(&s, assoc_budget)? {
                    if !seen.insert(w.clone()) {
                        continue;
                    }
                    r.assoc_checked += 1;
                    let lhs = b.join(&b.join(&w));
                    let rhs = b.join(&b.map(&w, &|x| b.join(x)));
                    if lhs != rhs {
                        r.failure = Some(format!("associativity fails at {w}"));
                        return Ok(r);
                    }
                }
            }
        }
    }
    Ok(r)
}
