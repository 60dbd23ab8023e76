//! The terminal sequence `1 ← F(1) ← F²(1) ← …` and final coalgebras read
//! off a bijective connector.
//!
//! Stage `k + 1` is `F` applied to the indices `0..|stage k|`, so elements
//! stay shallow however deep the sequence goes.

use serde::Serialize;

use super::FunctorExpr;
use crate::theories::{Budget, TheoryError};
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TerminalSeq {
    pub functor: FunctorExpr,
    /// `stages[k] = F^k(1)`, over the indices of the previous stage.
    pub stages: Vec<Vec<Value>>,
    /// `connectors[k]` maps stage `k + 1` to stage `k`, by index.
    pub connectors: Vec<Vec<usize>>,
    /// The least `k` whose outgoing connector `k + 1 → k` is bijective.
    pub converged_at: Option<usize>,
    /// Why the sequence stopped early, if it did.
    pub stopped: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StageRow {
    pub stage: usize,
    pub size: usize,
}

fn bijective(map: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    map.len() == n && map.iter().all(|&j| !std::mem::replace(&mut seen[j], true))
}

impl TerminalSeq {
    pub fn sizes(&self) -> Vec<usize> {
        self.stages.iter().map(Vec::len).collect()
    }

    pub fn table(&self) -> Vec<StageRow> {
        self.stages.iter().enumerate().map(|(stage, s)| StageRow { stage, size: s.len() }).collect()
    }

    /// The composite connector from stage `hi` down to stage `lo`.
    pub fn projection(&self, hi: usize, lo: usize) -> Vec<usize> {
        let mut map: Vec<usize> = (0..self.stages[hi].len()).collect();
        for k in (lo..hi).rev() {
            map = map.iter().map(|&i| self.connectors[k][i]).collect();
        }
        map
    }

    pub fn index(&self, stage: usize, v: &Value) -> Option<usize> {
        self.stages[stage].binary_search(v).ok()
    }
}

fn index_of(stage: &[Value], v: &Value) -> usize {
    stage.binary_search(v).unwrap_or_else(|_| panic!("{v} is missing from its stage"))
}

/// Computes stages `0..=max_steps`, stopping at the budget. With
/// `stop_on_convergence` the sequence ends one stage after the first
/// bijective connector.
pub fn terminal_sequence(f: &FunctorExpr, max_steps: usize, budget: &Budget, stop_on_convergence: bool) -> TerminalSeq {
    let mut seq = TerminalSeq { functor: f.clone(), stages: vec![vec![Value::Unit]], connectors: Vec::new(), converged_at: None, stopped: None };
    for k in 0..max_steps {
        let prev = seq.stages[k].len();
        if f.size_hint(prev, budget) > budget.max_elems as u128 {
            seq.stopped = Some(format!("stage {} would exceed {} elements", k + 1, budget.max_elems));
            break;
        }
        let next = match f.eval(&Value::ints(prev), budget) {
            Ok(s) => s,
            Err(TheoryError::BudgetExceeded { what, limit }) => {
                seq.stopped = Some(format!("stage {}: {what} is larger than {limit}", k + 1));
                break;
            }
            Err(e) => {
                seq.stopped = Some(e.to_string());
                break;
            }
        };
        // p_0 is the unique map to 1, p_{k+1} = F(p_k)
        let conn: Vec<usize> = if k == 0 {
            vec![0; next.len()]
        } else {
            let below = &seq.connectors[k - 1];
            let lower = &seq.stages[k];
            next.iter()
                .map(|v| index_of(lower, &f.map(v, &|x| Value::Int(below[x.as_int().unwrap() as usize] as i64))))
                .collect()
        };
        let done = bijective(&conn, prev);
        seq.stages.push(next);
        seq.connectors.push(conn);
        if done && seq.converged_at.is_none() {
            seq.converged_at = Some(k);
            if stop_on_convergence {
                break;
            }
        }
    }
    seq
}

/// A coalgebra `ξ: n → F(n)` on the states `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coalgebra {
    pub functor: FunctorExpr,
    pub states: usize,
    pub structure: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FinalError {
    #[error("the terminal sequence did not converge within {steps} steps ({reason})")]
    NotConverged { steps: usize, reason: String },
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

#[derive(Clone, Debug, Serialize)]
pub struct FinalityReport {
    /// Coalgebras examined, on every state count up to `max_states`.
    pub checked: usize,
    pub max_states: usize,
    /// A coalgebra with zero or several morphisms into the candidate.
    pub failure: Option<String>,
}

impl Coalgebra {
    /// The converged stage with the inverse connector as structure.
    pub fn final_from(seq: &TerminalSeq) -> Result<Coalgebra, FinalError> {
        let Some(k) = seq.converged_at else {
            return Err(FinalError::NotConverged {
                steps: seq.connectors.len(),
                reason: seq.stopped.clone().unwrap_or_else(|| "no bijective connector".into()),
            });
        };
        let mut structure = vec![Value::Unit; seq.stages[k].len()];
        for (i, &j) in seq.connectors[k].iter().enumerate() {
            structure[j] = seq.stages[k + 1][i].clone();
        }
        Ok(Coalgebra { functor: seq.functor.clone(), states: seq.stages[k].len(), structure })
    }

    /// Morphisms `h` from `other` with `ξ ∘ h = F(h) ∘ γ`.
    pub fn morphisms_from(&self, other: &Coalgebra) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut h = vec![0usize; other.states];
        if self.states == 0 && other.states > 0 {
            return out;
        }
        loop {
            let ok = (0..other.states).all(|y| {
                self.functor.map(&other.structure[y], &|x| Value::Int(h[x.as_int().unwrap() as usize] as i64)) == self.structure[h[y]]
            });
            if ok {
                out.push(h.clone());
            }
            let mut i = 0;
            while i < h.len() && h[i] + 1 == self.states {
                h[i] = 0;
                i += 1;
            }
            if i == h.len() {
                return out;
            }
            h[i] += 1;
        }
    }

    /// Every coalgebra with at most `max_states` states must have exactly
    /// one morphism into this one.
    pub fn check_finality(&self, max_states: usize, budget: &Budget) -> Result<FinalityReport, TheoryError> {
        let mut report = FinalityReport { checked: 0, max_states, failure: None };
        for n in 0..=max_states {
            let fy = self.functor.eval(&Value::ints(n), budget)?;
            let total = (fy.len() as u128).saturating_pow(n as u32);
            if total > budget.max_elems as u128 {
                return Err(TheoryError::BudgetExceeded { what: format!("coalgebras on {n} states"), limit: budget.max_elems });
            }
            let mut pick = vec![0usize; n];
            loop {
                if fy.is_empty() && n > 0 {
                    break;
                }
                let c = Coalgebra { functor: self.functor.clone(), states: n, structure: pick.iter().map(|&i| fy[i].clone()).collect() };
                report.checked += 1;
                let hs = self.morphisms_from(&c);
                if hs.len() != 1 && report.failure.is_none() {
                    report.failure = Some(format!("{} morphism(s) from the coalgebra {:?}", hs.len(), c.structure.iter().map(|v| v.to_string()).collect::<Vec<_>>()));
                }
                let mut i = 0;
                while i < n && pick[i] + 1 == fy.len() {
                    pick[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
                pick[i] += 1;
            }
        }
        Ok(report)
    }
}
