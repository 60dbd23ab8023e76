//! Covariant presheaves with finite fibers over a [`Site`].

use std::rc::Rc;

use super::category::{Site, SiteObj, TimeObj};
use crate::value::Value;

#[derive(Clone, Debug)]
pub struct FinPresheaf {
    pub site: Rc<Site>,
    /// Sorted fiber over each object.
    pub fibers: Vec<Vec<Value>>,
    /// For each morphism, the image index of each source element.
    pub actions: Vec<Vec<usize>>,
}

/// Where functoriality breaks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorialityFailure {
    pub first: usize,
    pub second: Option<usize>,
    pub element: Value,
}

impl FinPresheaf {
    /// Builds a presheaf from fibers and an action given on values.
    pub fn build(site: Rc<Site>, fibers: Vec<Vec<Value>>, act: impl Fn(usize, &Value) -> Value) -> FinPresheaf {
        let actions = site
            .mors
            .iter()
            .enumerate()
            .map(|(m, mor)| {
                fibers[mor.src]
                    .iter()
                    .map(|v| {
                        let w = act(m, v);
                        fibers[mor.dst].binary_search(&w).unwrap_or_else(|_| panic!("action leaves the fiber: {w}"))
                    })
                    .collect()
            })
            .collect();
        FinPresheaf { site, fibers, actions }
    }

    /// The same finite set everywhere, with identity actions.
    pub fn constant(site: Rc<Site>, values: &[Value]) -> FinPresheaf {
        let mut vals = values.to_vec();
        vals.sort();
        vals.dedup();
        let fibers = vec![vals; site.objs.len()];
        FinPresheaf::build(site, fibers, |_, v| v.clone())
    }

    /// The presheaf of clocks: the fiber at `(E, θ)` is `E`.
    pub fn clk(site: Rc<Site>) -> FinPresheaf {
        let fibers = site.objs.iter().map(|o| o.time.clocks().into_iter().map(|l| Value::Int(l as i64)).collect()).collect();
        let s2 = site.clone();
        FinPresheaf::build(site, fibers, move |m, v| {
            let l = v.as_int().unwrap() as usize;
            Value::Int(s2.mors[m].sigma[l].unwrap() as i64)
        })
    }

    pub fn fiber(&self, o: usize) -> &[Value] {
        &self.fibers[o]
    }

    pub fn index(&self, o: usize, v: &Value) -> Option<usize> {
        self.fibers[o].binary_search(v).ok()
    }

    /// The action of morphism `m` on a value of its source fiber.
    pub fn act(&self, m: usize, v: &Value) -> Value {
        let src = self.site.mors[m].src;
        let i = self.index(src, v).expect("value not in the source fiber");
        self.fibers[self.site.mors[m].dst][self.actions[m][i]].clone()
    }

    pub fn fiber_at(&self, o: &SiteObj) -> Option<&[Value]> {
        self.site.obj(o).map(|i| self.fiber(i))
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.fibers.iter().map(Vec::len).collect()
    }

    /// Identities act as identities and `X(g∘f) = X(g)∘X(f)` over the whole
    /// composition table.
    pub fn check_functorial(&self) -> Result<(), FunctorialityFailure> {
        let s = &self.site;
        for (o, &id) in s.ident.iter().enumerate() {
            for (i, &j) in self.actions[id].iter().enumerate() {
                if i != j {
                    return Err(FunctorialityFailure { first: id, second: None, element: self.fibers[o][i].clone() });
                }
            }
        }
        for (f, mf) in s.mors.iter().enumerate() {
            for &g in &s.out[mf.dst] {
                let gf = s.compose(f, g);
                for (i, &j) in self.actions[f].iter().enumerate() {
                    if self.actions[g][j] != self.actions[gf][i] {
                        return Err(FunctorialityFailure { first: f, second: Some(g), element: self.fibers[mf.src][i].clone() });
                    }
                }
            }
        }
        Ok(())
    }

    /// Every fiber is empty or a singleton.
    pub fn is_subsingleton(&self) -> bool {
        self.fibers.iter().all(|f| f.len() <= 1)
    }

    /// The same presheaf on the objects with at most `max_clocks` clocks.
    pub fn restrict(&self, site: Rc<Site>) -> FinPresheaf {
        let old = &self.site;
        let obj_map: Vec<usize> = site.objs.iter().map(|o| old.obj(o).expect("restriction to a subcategory")).collect();
        let fibers = obj_map.iter().map(|&i| self.fibers[i].clone()).collect();
        let actions = site
            .mors
            .iter()
            .map(|m| {
                let k = old.find_mor(obj_map[m.src], obj_map[m.dst], &m.sigma).expect("morphism of the subcategory");
                self.actions[k].clone()
            })
            .collect();
        FinPresheaf { site, fibers, actions }
    }
}

/// Finds the object `(E, θ, χ)` of a site.
pub fn site_obj(site: &Site, time: &TimeObj, chi: &[usize]) -> Option<usize> {
    site.obj(&SiteObj { time: time.clone(), chi: chi.to_vec() })
}
