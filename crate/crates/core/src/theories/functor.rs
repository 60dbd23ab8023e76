//! The free-model functor of a theory, uniformly for builtin normal forms
//! and congruence-closed term graphs.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use super::egraph::{map_value, EGraph};
use super::theory::Theory;
use super::{Budget, Builtin, TheoryError};
use crate::value::Value;

struct Closed {
    graph: EGraph,
    values: BTreeMap<usize, Value>,
}

pub struct FreeMonad {
    pub theory: Theory,
    pub budget: Budget,
    /// Operation layers allowed when building term graphs.
    pub depth: usize,
    graphs: RefCell<HashMap<Vec<Value>, Rc<Closed>>>,
}

impl FreeMonad {
    pub fn new(theory: Theory, budget: Budget, depth: usize) -> FreeMonad {
        FreeMonad { theory, budget, depth, graphs: RefCell::new(HashMap::new()) }
    }

    pub fn builtin(b: Builtin, budget: Budget) -> FreeMonad {
        FreeMonad::new(Theory::builtin(b), budget, 0)
    }

    pub fn name(&self) -> &str {
        &self.theory.name
    }

    fn closed(&self, xs: &[Value]) -> Result<Rc<Closed>, TheoryError> {
        if let Some(c) = self.graphs.borrow().get(xs) {
            return Ok(c.clone());
        }
        let graph = EGraph::build(&self.theory, xs, self.depth, self.budget.max_elems)?;
        if !graph.closed {
            return Err(TheoryError::NotSaturated { depth: self.depth, classes: graph.class_count() });
        }
        let values = graph.classes().into_iter().map(|c| (c, graph.class_value(c))).collect();
        let c = Rc::new(Closed { graph, values });
        self.graphs.borrow_mut().insert(xs.to_vec(), c.clone());
        Ok(c)
    }

    /// `T(xs)` in canonical order. Custom theories fail unless the term
    /// graph closes within the depth budget.
    pub fn carrier(&self, xs: &[Value]) -> Result<Vec<Value>, TheoryError> {
        match self.theory.builtin {
            Some(b) => b.carrier(xs, &self.budget),
            None => {
                let mut out: Vec<Value> = self.closed(xs)?.values.values().cloned().collect();
                out.sort();
                Ok(out)
            }
        }
    }

    /// `T(f)` for `f` into the set `ys`.
    pub fn map(&self, v: &Value, f: &dyn Fn(&Value) -> Value, ys: &[Value]) -> Result<Value, TheoryError> {
        match self.theory.builtin {
            Some(b) => Ok(b.map(v, f)),
            None => {
                let target = self.closed(ys)?;
                let moved = map_value(v, f);
                let c = target
                    .graph
                    .class_of_value(&moved)
                    .ok_or_else(|| TheoryError::Invalid(format!("{moved} is outside the free model")))?;
                Ok(target.values[&c].clone())
            }
        }
    }

    pub fn unit(&self, x: &Value, xs: &[Value]) -> Result<Value, TheoryError> {
        match self.theory.builtin {
            Some(b) => Ok(b.unit(x)),
            None => {
                let g = self.closed(xs)?;
                let c = g.graph.class_of_value(&Value::inl(x.clone())).ok_or_else(|| TheoryError::Invalid(format!("{x} is not a generator")))?;
                Ok(g.values[&c].clone())
            }
        }
    }
}
