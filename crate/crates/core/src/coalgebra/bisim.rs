//! Bisimilarity by partition refinement.

use std::collections::HashMap;

use super::Coalgebra;
use crate::value::Value;

/// Class ids numbered by first occurrence, so equal partitions give equal
/// vectors.
fn renumber<K: std::hash::Hash + Eq>(keys: Vec<K>) -> Vec<usize> {
    let mut ids = HashMap::new();
    keys.into_iter()
        .map(|k| {
            let n = ids.len();
            *ids.entry(k).or_insert(n)
        })
        .collect()
}

/// The class of every state under the largest bisimulation: states are
/// split by their one-step behaviour with successors replaced by classes,
/// until nothing splits. For distributions the map adds up the mass per
/// class exactly.
pub fn bisimilarity_classes(c: &Coalgebra) -> Vec<usize> {
    let mut class = vec![0usize; c.states];
    loop {
        let keys: Vec<(usize, Value)> = (0..c.states)
            .map(|x| (class[x], c.functor.map(&c.structure[x], &|s| Value::Int(class[s.as_int().unwrap() as usize] as i64))))
            .collect();
        let next = renumber(keys);
        let before = class.iter().max().map_or(0, |m| m + 1);
        let after = next.iter().max().map_or(0, |m| m + 1);
        class = next;
        if before == after {
            return class;
        }
    }
}

/// The partition as sorted blocks, ordered by least member.
pub fn blocks(class: &[usize]) -> Vec<Vec<usize>> {
    let n = class.iter().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); n];
    for (x, &k) in class.iter().enumerate() {
        out[k].push(x);
    }
    out.retain(|b| !b.is_empty());
    out.sort();
    out
}

pub fn bisimilarity(c: &Coalgebra) -> Vec<Vec<usize>> {
    blocks(&bisimilarity_classes(c))
}

/// Refinement for `Pf(A × X)` with at most eight states and two labels:
/// `succ[x][a]` is the bit set of `a`-successors of `x`. Returns the class
/// of each state, numbered by first occurrence.
pub fn pf_classes_small(succ: &[[u8; 2]]) -> Vec<u8> {
    let n = succ.len();
    assert!(n <= 8, "at most eight states");
    let mut class = [0u8; 8];
    let mut count = 1;
    loop {
        let mut sig = [(0u8, 0u8, 0u8); 8];
        for x in 0..n {
            let mut s = [0u8; 2];
            for (a, bits) in s.iter_mut().enumerate() {
                let mut m = succ[x][a];
                while m != 0 {
                    *bits |= 1 << class[m.trailing_zeros() as usize];
                    m &= m - 1;
                }
            }
            sig[x] = (class[x], s[0], s[1]);
        }
        let mut next = [0u8; 8];
        let mut seen = [(0u8, 0u8, 0u8); 8];
        let mut found = 0;
        for x in 0..n {
            next[x] = match seen[..found].iter().position(|k| *k == sig[x]) {
                Some(i) => i as u8,
                None => {
                    seen[found] = sig[x];
                    found += 1;
                    (found - 1) as u8
                }
            };
        }
        class = next;
        if found == count || n == 0 {
            return class[..n].to_vec();
        }
        count = found;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalgebra::FunctorExpr;

    fn lts(n: usize, edges: &[(usize, &str, usize)]) -> Coalgebra {
        let mut sets = vec![Vec::new(); n];
        for &(s, a, t) in edges {
            sets[s].push(Value::pair(Value::atom(a), Value::Int(t as i64)));
        }
        Coalgebra {
            functor: FunctorExpr::parse("pf(prod(const{a, b}, id))").unwrap(),
            states: n,
            structure: sets.into_iter().map(Value::set).collect(),
        }
    }

    #[test]
    fn loop_and_unfolded_loop() {
        let c = lts(3, &[(0, "a", 0), (1, "a", 2), (2, "a", 1)]);
        assert_eq!(bisimilarity(&c), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn different_labels_split() {
        let c = lts(2, &[(0, "a", 0), (1, "b", 1)]);
        assert_eq!(bisimilarity(&c), vec![vec![0], vec![1]]);
    }

    #[test]
    fn empty() {
        assert!(bisimilarity(&lts(0, &[])).is_empty());
    }

    #[test]
    fn small_path_agrees() {
        let c = lts(4, &[(0, "a", 1), (1, "b", 1), (2, "a", 3), (3, "b", 3), (3, "a", 0)]);
        let succ: Vec<[u8; 2]> = (0..4)
            .map(|x| {
                let mut m = [0u8; 2];
                if let Value::Set(es) = &c.structure[x] {
                    for e in es {
                        if let Value::Pair(a, t) = e {
                            let li = usize::from(**a == Value::atom("b"));
                            m[li] |= 1 << t.as_int().unwrap();
                        }
                    }
                }
                m
            })
            .collect();
        let fast: Vec<usize> = pf_classes_small(&succ).into_iter().map(usize::from).collect();
        assert_eq!(fast, bisimilarity_classes(&c));
    }
}
