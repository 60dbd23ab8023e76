//! Free models of arbitrary theories by congruence closure.
//!
//! Classes of terms over the generators are grown one operation layer at a
//! time and the equations applied until nothing merges. Once a layer adds no
//! new class the graph is closed under the operations and satisfies every
//! equation, so it is the free model and distinct classes are apart. Before
//! that, only merges are trustworthy.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::theory::Theory;
use super::TheoryError;
use crate::syntax::{AlgTerm, Name};
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Equal,
    Apart,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    Gen(usize),
    Op(usize, Vec<usize>),
}

type Bindings = BTreeMap<Name, usize>;

#[derive(Clone, Debug)]
pub struct EGraph {
    ops: Vec<(Name, usize)>,
    op_index: HashMap<Name, usize>,
    equations: Vec<(AlgTerm, AlgTerm)>,
    gens: Vec<Value>,
    parent: Vec<usize>,
    memo: HashMap<Node, usize>,
    /// Operation layers added so far.
    pub depth: usize,
    /// Set once a layer produced no new class.
    pub closed: bool,
    max_nodes: usize,
}

impl EGraph {
    pub fn new(theory: &Theory, gens: &[Value], max_nodes: usize) -> EGraph {
        let ops: Vec<(Name, usize)> = theory.ops.iter().map(|(o, n)| (o.clone(), *n)).collect();
        let op_index = ops.iter().enumerate().map(|(i, (o, _))| (o.clone(), i)).collect();
        let mut g = EGraph {
            ops,
            op_index,
            equations: theory.equations.clone(),
            gens: gens.to_vec(),
            parent: Vec::new(),
            memo: HashMap::new(),
            depth: 0,
            closed: false,
            max_nodes,
        };
        for i in 0..gens.len() {
            g.add_node(Node::Gen(i));
        }
        g
    }

    /// Builds the graph over `gens`, adding at most `depth` layers and
    /// stopping early once closed.
    pub fn build(theory: &Theory, gens: &[Value], depth: usize, max_nodes: usize) -> Result<EGraph, TheoryError> {
        let mut g = EGraph::new(theory, gens, max_nodes);
        g.saturate()?;
        while !g.closed && g.depth < depth {
            g.layer()?;
        }
        Ok(g)
    }

    fn find(&self, mut c: usize) -> usize {
        while self.parent[c] != c {
            c = self.parent[c];
        }
        c
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        self.parent[hi] = lo;
        true
    }

    fn canon(&self, n: &Node) -> Node {
        match n {
            Node::Gen(i) => Node::Gen(*i),
            Node::Op(f, args) => Node::Op(*f, args.iter().map(|&a| self.find(a)).collect()),
        }
    }

    fn add_node(&mut self, n: Node) -> (usize, bool) {
        let n = self.canon(&n);
        if let Some(&c) = self.memo.get(&n) {
            return (self.find(c), false);
        }
        let c = self.parent.len();
        self.parent.push(c);
        self.memo.insert(n, c);
        (c, true)
    }

    /// The classes, by least member id.
    pub fn classes(&self) -> Vec<usize> {
        (0..self.parent.len()).filter(|&c| self.parent[c] == c).collect()
    }

    pub fn class_count(&self) -> usize {
        self.classes().len()
    }

    /// Adds every operation applied to existing classes, then saturates.
    pub fn layer(&mut self) -> Result<(), TheoryError> {
        let classes = self.classes();
        let mut fresh = false;
        for f in 0..self.ops.len() {
            let n = self.ops[f].1;
            if n > 0 && classes.is_empty() {
                continue;
            }
            let count = (classes.len() as u128).saturating_pow(n as u32);
            if self.memo.len() as u128 + count > self.max_nodes as u128 {
                return Err(TheoryError::BudgetExceeded { what: format!("term graph at depth {}", self.depth + 1), limit: self.max_nodes });
            }
            let mut idx = vec![0usize; n];
            loop {
                let args = idx.iter().map(|&i| classes[i]).collect();
                fresh |= self.add_node(Node::Op(f, args)).1;
                // next tuple in lexicographic order
                let mut k = n;
                while k > 0 && idx[k - 1] + 1 == classes.len() {
                    idx[k - 1] = 0;
                    k -= 1;
                }
                if k == 0 {
                    break;
                }
                idx[k - 1] += 1;
            }
        }
        self.depth += 1;
        self.saturate()?;
        if !fresh {
            self.closed = true;
        }
        Ok(())
    }

    /// Restores congruence: equal arguments give equal applications.
    fn rebuild(&mut self) {
        loop {
            let old = std::mem::take(&mut self.memo);
            let mut changed = false;
            for (n, c) in old {
                let n = self.canon(&n);
                match self.memo.get(&n) {
                    Some(&d) => changed |= self.union(c, d),
                    None => {
                        self.memo.insert(n, c);
                    }
                }
            }
            if !changed {
                let memo = std::mem::take(&mut self.memo);
                self.memo = memo.into_iter().map(|(n, c)| (self.canon(&n), self.find(c))).collect();
                return;
            }
        }
    }

    fn class_nodes(&self) -> HashMap<usize, Vec<&Node>> {
        let mut out: HashMap<usize, Vec<&Node>> = HashMap::new();
        for (n, &c) in &self.memo {
            out.entry(c).or_default().push(n);
        }
        out
    }

    fn ematch(&self, index: &HashMap<usize, Vec<&Node>>, pat: &AlgTerm, c: usize, b: Bindings, out: &mut Vec<Bindings>) {
        match pat {
            AlgTerm::Var(x) => match b.get(x) {
                Some(&d) if d != c => {}
                Some(_) => out.push(b),
                None => {
                    let mut b = b;
                    b.insert(x.clone(), c);
                    out.push(b);
                }
            },
            AlgTerm::Op(f, ps) => {
                let Some(&fi) = self.op_index.get(f) else { return };
                for n in index.get(&c).into_iter().flatten() {
                    let Node::Op(g, args) = n else { continue };
                    if *g != fi {
                        continue;
                    }
                    let mut partial = vec![b.clone()];
                    for (p, &a) in ps.iter().zip(args) {
                        let mut next = Vec::new();
                        for pb in partial {
                            self.ematch(index, p, a, pb, &mut next);
                        }
                        partial = next;
                    }
                    out.extend(partial);
                }
            }
        }
    }

    fn lookup(&self, t: &AlgTerm, b: &Bindings) -> Option<usize> {
        match t {
            AlgTerm::Var(x) => b.get(x).copied(),
            AlgTerm::Op(f, args) => {
                let fi = *self.op_index.get(f)?;
                let args = args.iter().map(|a| self.lookup(a, b)).collect::<Option<Vec<_>>>()?;
                self.memo.get(&self.canon(&Node::Op(fi, args))).map(|&c| self.find(c))
            }
        }
    }

    /// Applies the equations, in both directions, until no classes merge.
    fn saturate(&mut self) -> Result<(), TheoryError> {
        loop {
            self.rebuild();
            let classes = self.classes();
            let index = self.class_nodes();
            let mut merges = Vec::new();
            for (l, r) in &self.equations {
                for (pat, other) in [(l, r), (r, l)] {
                    let unbound: Vec<Name> = other.vars().difference(&pat.vars()).cloned().collect();
                    for &c in &classes {
                        let mut found = Vec::new();
                        self.ematch(&index, pat, c, Bindings::new(), &mut found);
                        for b in found {
                            // variables only on the other side range over every class
                            let mut all = vec![b];
                            for x in &unbound {
                                all = all
                                    .into_iter()
                                    .flat_map(|b| {
                                        classes.iter().map(move |&d| {
                                            let mut b = b.clone();
                                            b.insert(x.clone(), d);
                                            b
                                        })
                                    })
                                    .collect();
                            }
                            for b in all {
                                if let Some(d) = self.lookup(other, &b) {
                                    if d != c {
                                        merges.push((c, d));
                                    }
                                }
                            }
                        }
                    }
                }
            }
            let mut changed = false;
            for (a, b) in merges {
                changed |= self.union(a, b);
            }
            if !changed {
                return Ok(());
            }
        }
    }

    fn gen_index(&self, v: &Value) -> Option<usize> {
        self.gens.iter().position(|g| g == v)
    }

    /// Adds a term whose variables name generators (by their printed form).
    pub fn insert(&mut self, t: &AlgTerm) -> Result<usize, TheoryError> {
        let c = self.insert_inner(t)?;
        self.saturate()?;
        Ok(self.find(c))
    }

    fn insert_inner(&mut self, t: &AlgTerm) -> Result<usize, TheoryError> {
        match t {
            AlgTerm::Var(x) => self
                .gens
                .iter()
                .position(|g| g.to_string() == *x)
                .map(|i| self.find(self.memo[&Node::Gen(i)]))
                .ok_or_else(|| TheoryError::Invalid(format!("`{x}` is not a generator"))),
            AlgTerm::Op(f, args) => {
                let fi = *self.op_index.get(f).ok_or_else(|| TheoryError::Invalid(format!("unknown operation `{f}`")))?;
                let args = args.iter().map(|a| self.insert_inner(a)).collect::<Result<Vec<_>, _>>()?;
                Ok(self.add_node(Node::Op(fi, args)).0)
            }
        }
    }

    pub fn verdict(&mut self, t: &AlgTerm, u: &AlgTerm) -> Result<Verdict, TheoryError> {
        let a = self.insert(t)?;
        let b = self.insert(u)?;
        Ok(if self.find(a) == self.find(b) {
            Verdict::Equal
        } else if self.closed {
            Verdict::Apart
        } else {
            Verdict::Unknown
        })
    }

    /// A smallest term in every class, keyed by class.
    pub fn representatives(&self) -> BTreeMap<usize, AlgTerm> {
        let mut best: BTreeMap<usize, (usize, AlgTerm)> = BTreeMap::new();
        loop {
            let mut changed = false;
            for (n, &c) in &self.memo {
                let cand = match n {
                    Node::Gen(i) => (1, AlgTerm::Var(self.gens[*i].to_string())),
                    Node::Op(f, args) => {
                        let Some(parts) = args.iter().map(|a| best.get(a).cloned()).collect::<Option<Vec<_>>>() else { continue };
                        let size = 1 + parts.iter().map(|p| p.0).sum::<usize>();
                        (size, AlgTerm::Op(self.ops[*f].0.clone(), parts.into_iter().map(|p| p.1).collect()))
                    }
                };
                if best.get(&c).is_none_or(|old| cand < *old) {
                    best.insert(c, cand);
                    changed = true;
                }
            }
            if !changed {
                return best.into_iter().map(|(c, (_, t))| (c, t)).collect();
            }
        }
    }

    /// The element of a class, as a value: generators stand for
    /// themselves under `inl`, applications are `inr <op, args..>`.
    pub fn class_value(&self, c: usize) -> Value {
        term_value(&self.representatives()[&self.find(c)], &self.gens)
    }

    /// All elements, sorted.
    pub fn elements(&self) -> Vec<Value> {
        let mut out: Vec<Value> = self.representatives().values().map(|t| term_value(t, &self.gens)).collect();
        out.sort();
        out
    }

    /// The class of an encoded element whose generators are taken from
    /// this graph. Fails if the term leaves the graph.
    pub fn class_of_value(&self, v: &Value) -> Option<usize> {
        match v {
            Value::Inl(g) => self.gen_index(g).map(|i| self.find(self.memo[&Node::Gen(i)])),
            Value::Inr(t) => {
                let Value::Tuple(items) = &**t else { return None };
                let (Value::Atom(f), args) = items.split_first()? else { return None };
                let fi = *self.op_index.get(f)?;
                let args = args.iter().map(|a| self.class_of_value(a)).collect::<Option<Vec<_>>>()?;
                self.memo.get(&self.canon(&Node::Op(fi, args))).map(|&c| self.find(c))
            }
            _ => None,
        }
    }
}

fn term_value(t: &AlgTerm, gens: &[Value]) -> Value {
    match t {
        AlgTerm::Var(x) => Value::inl(gens.iter().find(|g| g.to_string() == *x).cloned().expect("generator")),
        AlgTerm::Op(f, args) => {
            Value::inr(Value::Tuple(std::iter::once(Value::atom(f.clone())).chain(args.iter().map(|a| term_value(a, gens))).collect()))
        }
    }
}

/// Substitutes generators inside an encoded element.
pub fn map_value(v: &Value, f: &dyn Fn(&Value) -> Value) -> Value {
    match v {
        Value::Inl(g) => Value::inl(f(g)),
        Value::Inr(t) => match &**t {
            Value::Tuple(items) => Value::inr(Value::Tuple(
                items.iter().enumerate().map(|(i, x)| if i == 0 { x.clone() } else { map_value(x, f) }).collect(),
            )),
            other => panic!("{other} does not encode a term"),
        },
        other => panic!("{other} does not encode a term"),
    }
}
