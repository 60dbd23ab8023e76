use std::collections::BTreeMap;

use clott::coalgebra::bisim::{bisimilarity, blocks, pf_classes_small};
use clott::coalgebra::stage_law::check_stage_law;
use clott::coalgebra::terminal::FinalError;
use clott::coalgebra::weak::{related_at, weak_bisim_delay};
use clott::coalgebra::{terminal_sequence, Coalgebra, FunctorExpr};
use clott::model::delay::Delay;
use clott::theories::Budget;
use clott::value::{Rational, Value};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn functor(src: &str) -> FunctorExpr {
    FunctorExpr::parse(src).unwrap()
}

fn seq(src: &str, steps: usize) -> clott::coalgebra::TerminalSeq {
    terminal_sequence(&functor(src), steps, &Budget::default(), false)
}

#[test]
fn powerset_sequence() {
    let s = seq("pf(id)", 5);
    assert_eq!(s.sizes(), vec![1, 2, 4, 16, 65536]);
    assert_eq!(s.converged_at, None);
    assert!(s.stopped.is_some());
    assert!(matches!(Coalgebra::final_from(&s), Err(FinalError::NotConverged { .. })));
}

#[test]
fn labelled_powerset_sequence() {
    let s = seq("pf(prod(const{l}, id))", 4);
    assert_eq!(s.sizes(), vec![1, 2, 4, 16, 65536]);
    let f = functor("pf(prod(const{l}, id))");
    assert_eq!(f.eval(&Value::ints(2), &Budget::default()).unwrap().len(), 4);
    assert_eq!(functor("pf(prod(2, id))").eval(&Value::ints(2), &Budget::default()).unwrap().len(), 16);
}

#[test]
fn sequences_by_recurrence() {
    // |F^(k+1)(1)| from |F^k(1)|
    let cases: [(&str, fn(usize) -> usize); 4] =
        [("sum(1, id)", |n| n + 1), ("prod(2, id)", |n| 2 * n), ("sum(id, id)", |n| 2 * n), ("const{a, b}", |_| 2)];
    for (src, step) in cases {
        let s = seq(src, 6);
        let mut n = 1;
        for (k, &size) in s.sizes().iter().enumerate() {
            assert_eq!(size, n, "{src} at stage {k}");
            n = step(n);
        }
    }
    assert_eq!(seq("const{a, b}", 3).converged_at, Some(1));
    assert_eq!(seq("sum(1, id)", 6).converged_at, None);
}

#[test]
fn connectors_compose() {
    for src in ["pf(id)", "sum(1, prod(2, id))", "df(sum(1, id))", "bag(id)", "list(sum(1, id))"] {
        let f = functor(src);
        let s = terminal_sequence(&f, 4, &Budget { max_elems: 5000, ..Budget::default() }, false);
        for k in 1..s.connectors.len().saturating_sub(1) {
            // F(p_(k-1) ∘ p_k) computed directly against p_k ∘ p_(k+1)
            let q: Vec<usize> = s.connectors[k].iter().map(|&i| s.connectors[k - 1][i]).collect();
            for (i, v) in s.stages[k + 2].iter().enumerate() {
                let direct = f.map(v, &|x| Value::Int(q[x.as_int().unwrap() as usize] as i64));
                assert_eq!(s.index(k, &direct), Some(s.projection(k + 2, k)[i]), "{src} at {k}");
            }
        }
    }
}

fn functions(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|f| (0..k).map(move |y| [f.clone(), vec![y]].concat())).collect();
    }
    out
}

#[test]
fn functor_laws() {
    let budget = Budget::default();
    for src in ["id", "const{a, b}", "prod(2, id)", "sum(1, id)", "pf(prod(const{a, b}, id))", "prod(const{a}, df(id))", "list(sum(id, id))"] {
        let f = functor(src);
        for n in 0..=3 {
            let fx = f.eval(&Value::ints(n), &budget).unwrap();
            for v in &fx {
                assert_eq!(&f.map(v, &|x| x.clone()), v);
            }
            for k in 0..=3 {
                for g in functions(n, k) {
                    for h in functions(k, 2) {
                        let hg: Vec<usize> = g.iter().map(|&y| h[y]).collect();
                        let ap = |m: &[usize]| {
                            let m = m.to_vec();
                            move |x: &Value| Value::Int(m[x.as_int().unwrap() as usize] as i64)
                        };
                        for v in &fx {
                            assert_eq!(f.map(&f.map(v, &ap(&g)), &ap(&h)), f.map(v, &ap(&hg)), "{src}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn finality_of_constant() {
    let s = seq("2", 3);
    let c = Coalgebra::final_from(&s).unwrap();
    let r = c.check_finality(3, &Budget::default()).unwrap();
    assert_eq!(r.failure, None);
    // a candidate that is not final: three points for a two-point constant
    let bad = Coalgebra { functor: functor("2"), states: 3, structure: vec![Value::Int(0), Value::Int(1), Value::Int(1)] };
    assert!(bad.check_finality(1, &Budget::default()).unwrap().failure.is_some());
}

/// Largest bisimulation on `Pf(A × X)` as a greatest fixpoint of pairs.
fn brute_pf(succ: &[Vec<Vec<usize>>]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut r = vec![vec![true; n]; n];
    loop {
        let mut changed = false;
        for x in 0..n {
            for y in 0..n {
                if !r[x][y] {
                    continue;
                }
                let sim = |p: usize, q: usize, r: &Vec<Vec<bool>>| {
                    succ[p].iter().zip(&succ[q]).all(|(sp, sq)| sp.iter().all(|&a| sq.iter().any(|&b| r[a][b])))
                };
                if !(sim(x, y, &r) && sim(y, x, &r.iter().enumerate().map(|(i, _)| (0..n).map(|j| r[j][i]).collect()).collect())) {
                    r[x][y] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut class = vec![usize::MAX; n];
    let mut next = 0;
    for x in 0..n {
        if class[x] == usize::MAX {
            for y in x..n {
                if r[x][y] {
                    class[y] = next;
                }
            }
            next += 1;
        }
    }
    blocks(&class)
}

#[test]
fn refinement_matches_brute_force_on_small_systems() {
    let labels = &[Value::atom("a"), Value::atom("b")];
    for nl in 1..=2 {
        let f = FunctorExpr::parse(if nl == 1 { "pf(prod(const{a}, id))" } else { "pf(prod(const{a, b}, id))" }).unwrap();
        for n in 0..=3 {
            let width = nl * n;
            let total = 1u64 << (width * n);
            for code in 0..total {
                let succ: Vec<Vec<Vec<usize>>> = (0..n)
                    .map(|x| (0..nl).map(|a| (0..n).filter(|y| code >> (x * width + a * n + y) & 1 == 1).collect()).collect())
                    .collect();
                let structure = succ
                    .iter()
                    .map(|s| {
                        Value::set(
                            s.iter()
                                .enumerate()
                                .flat_map(|(a, ys)| ys.iter().map(move |&y| Value::pair(labels[a].clone(), Value::Int(y as i64))))
                                .collect(),
                        )
                    })
                    .collect();
                let c = Coalgebra { functor: f.clone(), states: n, structure };
                let expected = brute_pf(&succ);
                assert_eq!(bisimilarity(&c), expected, "{}", c.to_text());
                let masks: Vec<[u8; 2]> = succ
                    .iter()
                    .map(|s| {
                        let mut m = [0u8; 2];
                        for (a, ys) in s.iter().enumerate() {
                            m[a] = ys.iter().fold(0, |acc, y| acc | 1 << y);
                        }
                        m
                    })
                    .collect();
                let fast: Vec<usize> = pf_classes_small(&masks).into_iter().map(usize::from).collect();
                assert_eq!(blocks(&fast), expected);
            }
        }
    }
}

/// Restricted growth strings: every partition of `0..n` once.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                let m = p.iter().max().map_or(0, |m| m + 1);
                (0..=m).map(move |c| [p.clone(), vec![c]].concat())
            })
            .collect();
    }
    out
}

type Prob = (usize, Vec<(usize, Rational)>);

/// The coarsest partition in which related states have the same label and
/// send the same mass into every block.
fn brute_df(sys: &[Prob]) -> Vec<Vec<usize>> {
    let stable = |p: &[usize]| {
        let mass = |x: usize| {
            let mut m: BTreeMap<usize, Rational> = BTreeMap::new();
            for (y, w) in &sys[x].1 {
                *m.entry(p[*y]).or_default() += *w;
            }
            m
        };
        (0..sys.len()).all(|x| (0..sys.len()).all(|y| p[x] != p[y] || (sys[x].0 == sys[y].0 && mass(x) == mass(y))))
    };
    let all: Vec<Vec<usize>> = partitions(sys.len()).into_iter().filter(|p| stable(p)).collect();
    let coarsest = all.iter().min_by_key(|p| p.iter().max().map_or(0, |m| m + 1)).unwrap();
    // every stable partition refines it
    for p in &all {
        for x in 0..p.len() {
            for y in 0..p.len() {
                assert!(p[x] != p[y] || coarsest[x] == coarsest[y]);
            }
        }
    }
    blocks(coarsest)
}

fn random_df(rng: &mut ChaCha8Rng) -> Vec<Prob> {
    let n = rng.gen_range(1..=6);
    (0..n)
        .map(|_| {
            let label = usize::from(rng.gen_bool(0.3));
            let q = rng.gen_range(1..=4i64);
            let mut weights: BTreeMap<usize, i64> = BTreeMap::new();
            for _ in 0..q {
                *weights.entry(rng.gen_range(0..n)).or_default() += 1;
            }
            (label, weights.into_iter().map(|(y, k)| (y, Rational::new(k, q))).collect())
        })
        .collect()
}

pub fn df_coalgebra(sys: &[Prob]) -> Coalgebra {
    let labels = [Value::atom("a"), Value::atom("b")];
    Coalgebra {
        functor: functor("prod(const{a, b}, df(id))"),
        states: sys.len(),
        structure: sys
            .iter()
            .map(|(l, ws)| Value::pair(labels[*l].clone(), Value::dist(ws.iter().map(|(y, w)| (Value::Int(*y as i64), *w)).collect())))
            .collect(),
    }
}

#[test]
fn probabilistic_refinement_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut merged = 0;
    for _ in 0..200 {
        let sys = random_df(&mut rng);
        let c = df_coalgebra(&sys);
        let got = bisimilarity(&c);
        assert_eq!(got, brute_df(&sys), "{}", c.to_text());
        merged += usize::from(got.len() < sys.len());
    }
    assert!(merged > 20, "too few systems with merged states: {merged}");
}

#[test]
fn stage_law_small() {
    for (src, bound) in [("sum(1, id)", 5), ("prod(2, id)", 4), ("pf(prod(const{l}, id))", 3), ("df(sum(1, id))", 2)] {
        let r = check_stage_law(&functor(src), bound, &Budget::default()).unwrap();
        assert!(r.holds(), "{src}: {r:?}");
    }
}

fn delay() -> impl Strategy<Value = Delay> {
    prop_oneof![(0usize..6, 0i64..3).prop_map(|(n, v)| Delay::steps(n, Value::Int(v))), Just(Delay::Never)]
}

proptest! {
    #[test]
    fn weak_bisimilarity_is_reflexive_and_symmetric(x in delay(), y in delay(), bound in 1usize..6) {
        let carrier = Value::ints(3);
        let eq = |a: &Value, b: &Value| a == b;
        prop_assert!(weak_bisim_delay(&x, &x, bound, &eq, &carrier).related);
        let xy = weak_bisim_delay(&x, &y, bound, &eq, &carrier);
        let yx = weak_bisim_delay(&y, &x, bound, &eq, &carrier);
        prop_assert_eq!(xy.stages, yx.stages);
    }

    #[test]
    fn relation_is_downward_closed_in_stages(x in delay(), y in delay(), bound in 1usize..6) {
        let carrier = Value::ints(3);
        let eq = |a: &Value, b: &Value| a == b;
        let r = weak_bisim_delay(&x, &y, bound, &eq, &carrier);
        for k in 1..bound {
            prop_assert!(!r.stages[k] || r.stages[k - 1]);
        }
    }
}

#[test]
fn now_against_never_depends_on_the_stage() {
    let carrier = Value::ints(2);
    let eq = |a: &Value, b: &Value| a == b;
    let now = Delay::now(Value::Int(0));
    // never at stage k is step^(k+1) of anything, so up to k + 1 <= bound
    for k in 0..5 {
        assert!(related_at(&now.at_stage(k), &Delay::Never.at_stage(k), k, k + 1, &eq, &carrier));
        assert!(!related_at(&now.at_stage(k), &Delay::Never.at_stage(k), k, k, &eq, &carrier));
    }
}
