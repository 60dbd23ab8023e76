//! Weak bisimilarity on the truncated delay type, stage by stage.
//!
//! A stage-`k` element is `inl v` or `inr <d_0, .., d_{k-1}>` with `d_j` the
//! delayed element at stage `j`. The relation at stage `k`:
//!
//! - `now a ∼ y` if `y` is `step^n (now b)` for some `n ≤ N` and `a R b`;
//! - `x ∼ now b` symmetrically;
//! - `step x ∼ step y` if `x ∼ y` at every earlier stage.
//!
//! At stage `k` the element `step^(k+1) (now b)` looks like `never`, so a
//! value waiting longer than the stage can see is related to anything that
//! could still produce it.

use serde::Serialize;

use crate::model::delay::{as_now, as_step, Delay};
use crate::value::Value;

pub type Relation<'a> = &'a dyn Fn(&Value, &Value) -> bool;

/// Whether the stage-`k` element `y` can be `step^n (now b)` with `n ≤ steps`
/// and `R(a, b)`; `carrier` supplies the candidates for `b` once the stage
/// runs out.
fn reaches(a: &Value, y: &Value, k: usize, steps: usize, r: Relation, carrier: &[Value], flip: bool) -> bool {
    let rel = |b: &Value| if flip { r(b, a) } else { r(a, b) };
    if let Some(b) = as_now(y) {
        return rel(b);
    }
    let Some(earlier) = as_step(y) else { return false };
    if steps == 0 {
        return false;
    }
    if k == 0 {
        // no earlier stage: every step element looks the same here
        return carrier.iter().any(rel);
    }
    reaches(a, &earlier[k - 1], k - 1, steps - 1, r, carrier, flip)
}

/// `x ∼_k y` for stage-`k` elements, with the existential over steps
/// bounded by `bound`.
pub fn related_at(x: &Value, y: &Value, k: usize, bound: usize, r: Relation, carrier: &[Value]) -> bool {
    if let Some(a) = as_now(x) {
        return reaches(a, y, k, bound, r, carrier, false);
    }
    if let Some(b) = as_now(y) {
        return reaches(b, x, k, bound, r, carrier, true);
    }
    match (as_step(x), as_step(y)) {
        (Some(xs), Some(ys)) => (0..k).all(|j| related_at(&xs[j], &ys[j], j, bound, r, carrier)),
        _ => false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeakBisimReport {
    pub x: String,
    pub y: String,
    pub bound: usize,
    /// The verdict at stages `0..bound`.
    pub stages: Vec<bool>,
    /// All stages at once.
    pub related: bool,
}

/// Compares two delay elements at every stage below `bound`.
pub fn weak_bisim_delay(x: &Delay, y: &Delay, bound: usize, r: Relation, carrier: &[Value]) -> WeakBisimReport {
    let stages: Vec<bool> = (0..bound).map(|k| related_at(&x.at_stage(k), &y.at_stage(k), k, bound, r, carrier)).collect();
    WeakBisimReport { x: x.to_string(), y: y.to_string(), bound, related: stages.iter().all(|b| *b), stages }
}
