//! The fiber of `μX. F(▷X)` at stage `k` against stage `k + 1` of the
//! terminal sequence of `F`, through an explicit bijection.

use serde::Serialize;

use super::{terminal_sequence, FunctorExpr};
use crate::model::category::TimeObj;
use crate::model::presheaf::site_obj;
use crate::model::{Evaluator, ModelError, TypeExprM};
use crate::theories::Budget;
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageLawRow {
    pub stage: usize,
    pub model_size: usize,
    pub terminal_size: usize,
    pub bijective: bool,
    /// Commutes with restriction to the previous stage and the connector.
    pub natural: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageLawReport {
    pub functor: String,
    pub bound: usize,
    pub rows: Vec<StageLawRow>,
}

impl StageLawReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.bijective && r.natural)
    }
}

/// Evaluates the fixpoint over one clock and maps its stage-`k` fiber into
/// `F^(k+1)(1)`: the delayed part of an element is a family over earlier
/// stages, and its last member is sent to stage `k` recursively.
pub fn check_stage_law(f: &FunctorExpr, bound: usize, budget: &Budget) -> Result<StageLawReport, ModelError> {
    let ev = Evaluator::new(1, bound);
    let x = ev.eval_type(&TypeExprM::guarded_fixpoint(0, f), 1)?;
    let site = x.site.clone();
    let seq = terminal_sequence(f, bound, budget, false);
    if seq.stages.len() < bound + 1 {
        return Err(ModelError::Budget(seq.stopped.unwrap_or_default()));
    }
    let objs: Vec<usize> =
        (0..bound).map(|k| site_obj(&site, &TimeObj::empty(1).with(0, k), &[0]).expect("stage object")).collect();
    let mut phi: Vec<Vec<usize>> = Vec::with_capacity(bound);
    let mut rows = Vec::with_capacity(bound);
    for k in 0..bound {
        let fiber = x.fiber(objs[k]);
        let target = &seq.stages[k + 1];
        let mut map = Vec::with_capacity(fiber.len());
        for v in fiber {
            let moved = f.map(v, &|t| {
                if k == 0 {
                    return Value::Int(0);
                }
                let Value::Tuple(items) = t else { panic!("{t} is not a delayed element") };
                let below = x.index(objs[k - 1], &items[k - 1]).expect("earlier stage element");
                Value::Int(phi[k - 1][below] as i64)
            });
            map.push(target.binary_search(&moved).map_err(|_| ModelError::Invalid(format!("{moved} is not in stage {}", k + 1)))?);
        }
        let mut seen = vec![false; target.len()];
        let bijective = map.len() == target.len() && map.iter().all(|&j| !std::mem::replace(&mut seen[j], true));
        let natural = k == 0 || {
            let r = site.restriction(objs[k], objs[k - 1]).expect("restriction");
            (0..fiber.len()).all(|i| seq.connectors[k][map[i]] == phi[k - 1][x.actions[r][i]])
        };
        rows.push(StageLawRow { stage: k, model_size: fiber.len(), terminal_size: target.len(), bijective, natural });
        phi.push(map);
    }
    Ok(StageLawReport { functor: f.to_string(), bound, rows })
}
