//! The truncated time category and the categories of elements of `Clk^d`
//! over it.
//!
//! Clocks are drawn from a pool `l0, l1, ...`. An object assigns a stage
//! below the bound `N` to each clock in use; a morphism renames clocks
//! without increasing stages.

use std::collections::HashMap;
use std::fmt;

use super::ModelError;

/// An object `(E, θ)`: `theta[l]` is `Some(stage)` exactly for `l ∈ E`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimeObj {
    pub theta: Vec<Option<usize>>,
}

impl TimeObj {
    pub fn empty(pool: usize) -> TimeObj {
        TimeObj { theta: vec![None; pool] }
    }

    pub fn clocks(&self) -> Vec<usize> {
        (0..self.theta.len()).filter(|l| self.theta[*l].is_some()).collect()
    }

    pub fn size(&self) -> usize {
        self.theta.iter().filter(|t| t.is_some()).count()
    }

    pub fn contains(&self, l: usize) -> bool {
        self.theta.get(l).is_some_and(|t| t.is_some())
    }

    /// The stage of a clock in use.
    pub fn stage(&self, l: usize) -> usize {
        self.theta[l].expect("clock not in use")
    }

    /// `θ[l ↦ a]`, adding `l` when it is not yet in use.
    pub fn with(&self, l: usize, a: usize) -> TimeObj {
        let mut t = self.clone();
        t.theta[l] = Some(a);
        t
    }

    /// The least pool clock not in use.
    pub fn fresh(&self) -> Option<usize> {
        self.theta.iter().position(|t| t.is_none())
    }
}

pub fn clock_name(l: usize) -> String {
    format!("l{l}")
}

impl fmt::Display for TimeObj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.clocks().into_iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", clock_name(l), self.stage(l))?;
        }
        write!(f, "}}")
    }
}

/// An object of the category of elements of `Clk^d`: a time object with
/// `d` chosen clocks (not necessarily distinct).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteObj {
    pub time: TimeObj,
    pub chi: Vec<usize>,
}

impl fmt::Display for SiteObj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.time)?;
        if !self.chi.is_empty() {
            let names: Vec<String> = self.chi.iter().map(|l| clock_name(*l)).collect();
            write!(f, " @ {}", names.join(" "))?;
        }
        Ok(())
    }
}

/// `sigma[l]` is the image of `l` for every clock `l` of the source.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mor {
    pub src: usize,
    pub dst: usize,
    pub sigma: Vec<Option<usize>>,
}

/// The full subcategory of `∫Clk^d` over the truncated time category on
/// objects using at most `max_clocks` clocks.
#[derive(Debug)]
pub struct Site {
    pub pool: usize,
    pub bound: usize,
    pub arity: usize,
    pub max_clocks: usize,
    pub objs: Vec<SiteObj>,
    pub mors: Vec<Mor>,
    /// Morphisms out of each object, identity first.
    pub out: Vec<Vec<usize>>,
    pub ident: Vec<usize>,
    obj_index: HashMap<SiteObj, usize>,
    mor_index: HashMap<(usize, usize, Vec<Option<usize>>), usize>,
}

/// Every function from `dom` into `cod`, as `sigma` vectors over the pool.
fn functions(pool: usize, dom: &[usize], cod: &[usize]) -> Vec<Vec<Option<usize>>> {
    let mut out = vec![vec![None; pool]];
    for &x in dom {
        let mut next = Vec::with_capacity(out.len() * cod.len());
        for s in &out {
            for &y in cod {
                let mut s2 = s.clone();
                s2[x] = Some(y);
                next.push(s2);
            }
        }
        out = next;
    }
    out
}

fn time_objects(pool: usize, bound: usize, max_clocks: usize) -> Vec<TimeObj> {
    let mut subsets: Vec<Vec<usize>> = (0u32..1 << pool)
        .map(|m| (0..pool).filter(|l| m & (1 << l) != 0).collect::<Vec<_>>())
        .filter(|e| e.len() <= max_clocks)
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    let mut objs = Vec::new();
    for e in subsets {
        let mut partial = vec![TimeObj::empty(pool)];
        for &l in &e {
            partial = partial.iter().flat_map(|t| (0..bound).map(move |a| t.with(l, a))).collect();
        }
        objs.extend(partial);
    }
    objs
}

impl Site {
    /// The truncated time category itself.
    pub fn time(pool: usize, bound: usize) -> Result<Site, ModelError> {
        Site::new(pool, bound, 0, pool)
    }

    pub fn new(pool: usize, bound: usize, arity: usize, max_clocks: usize) -> Result<Site, ModelError> {
        if pool == 0 || bound < 2 {
            return Err(ModelError::Invalid(format!("need a non-empty pool and bound at least 2 (pool {pool}, bound {bound})")));
        }
        if pool > 6 || max_clocks > pool {
            return Err(ModelError::Invalid(format!("pool {pool} with {max_clocks} clocks per object is out of range")));
        }
        let mut objs = Vec::new();
        for t in time_objects(pool, bound, max_clocks) {
            let clocks = t.clocks();
            if clocks.is_empty() && arity > 0 {
                continue;
            }
            let mut chis = vec![Vec::new()];
            for _ in 0..arity {
                chis = chis.iter().flat_map(|c| clocks.iter().map(move |l| [c.clone(), vec![*l]].concat())).collect();
            }
            objs.extend(chis.into_iter().map(|chi| SiteObj { time: t.clone(), chi }));
        }
        let obj_index: HashMap<SiteObj, usize> = objs.iter().cloned().enumerate().map(|(i, o)| (o, i)).collect();
        let mut mors = Vec::new();
        let mut out = vec![Vec::new(); objs.len()];
        let mut ident = vec![usize::MAX; objs.len()];
        for (s, so) in objs.iter().enumerate() {
            let dom = so.time.clocks();
            for (d, dobj) in objs.iter().enumerate() {
                let cod = dobj.time.clocks();
                for sigma in functions(pool, &dom, &cod) {
                    let monotone = dom.iter().all(|&l| dobj.time.stage(sigma[l].unwrap()) <= so.time.stage(l));
                    let tracks = so.chi.iter().zip(&dobj.chi).all(|(a, b)| sigma[*a] == Some(*b));
                    if monotone && tracks {
                        let is_id = s == d && dom.iter().all(|&l| sigma[l] == Some(l));
                        let idx = mors.len();
                        mors.push(Mor { src: s, dst: d, sigma });
                        if is_id {
                            ident[s] = idx;
                            out[s].insert(0, idx);
                        } else {
                            out[s].push(idx);
                        }
                    }
                }
            }
        }
        let mor_index = mors.iter().enumerate().map(|(i, m)| ((m.src, m.dst, m.sigma.clone()), i)).collect();
        Ok(Site { pool, bound, arity, max_clocks, objs, mors, out, ident, obj_index, mor_index })
    }

    pub fn obj(&self, o: &SiteObj) -> Option<usize> {
        self.obj_index.get(o).copied()
    }

    pub fn find_mor(&self, src: usize, dst: usize, sigma: &[Option<usize>]) -> Option<usize> {
        self.mor_index.get(&(src, dst, sigma.to_vec())).copied()
    }

    /// `g ∘ f` for `f : a → b`, `g : b → c`.
    pub fn compose(&self, f: usize, g: usize) -> usize {
        let (mf, mg) = (&self.mors[f], &self.mors[g]);
        assert_eq!(mf.dst, mg.src, "morphisms are not composable");
        let sigma: Vec<Option<usize>> = mf.sigma.iter().map(|s| s.map(|l| mg.sigma[l].unwrap())).collect();
        self.find_mor(mf.src, mg.dst, &sigma).expect("composition table is closed")
    }

    /// The morphism between two objects over the same clocks that is the
    /// identity on clocks, if it exists.
    pub fn restriction(&self, src: usize, dst: usize) -> Option<usize> {
        let sigma: Vec<Option<usize>> = (0..self.pool).map(|l| self.objs[src].time.contains(l).then_some(l)).collect();
        self.find_mor(src, dst, &sigma)
    }

    /// The number of composable pairs, i.e. entries of the composition table.
    pub fn composable_pairs(&self) -> usize {
        self.mors.iter().map(|m| self.out[m.dst].len()).sum()
    }
}
