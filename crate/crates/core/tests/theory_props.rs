use std::collections::{BTreeMap, BTreeSet};

use clott::syntax::{parse_alg_term, AlgTerm};
use clott::theories::builtin::ALL;
use clott::theories::checks::{
    brute_minimal_support, check_monad_laws, check_preserves_monos, check_preserves_pullbacks_of_monos, minimal_support,
};
use clott::theories::{Budget, Builtin, EGraph, FreeMonad, Theory, Verdict};
use clott::value::{Rational, Value};
use proptest::prelude::*;

fn custom(b: Builtin) -> Theory {
    let mut th = Theory::builtin(b);
    th.builtin = None;
    th
}

fn atoms(n: usize) -> Vec<Value> {
    (0..n).map(|i| Value::atom(((b'a' + i as u8) as char).to_string())).collect()
}

#[test]
fn semilattice_counts_agree_with_congruence_closure() {
    for n in 0..=4 {
        let normal = Builtin::Semilattice.carrier(&atoms(n), &Budget::default()).unwrap();
        assert_eq!(normal.len(), 1 << n);
        let g = EGraph::build(&custom(Builtin::Semilattice), &atoms(n), 4, 1 << 20).unwrap();
        assert!(g.closed, "n = {n}");
        assert_eq!(g.class_count(), 1 << n);
    }
}

#[test]
fn commutative_monoid_without_length_cap_stays_open() {
    let g = EGraph::build(&custom(Builtin::CommutativeMonoid), &atoms(1), 3, 1 << 20).unwrap();
    assert!(!g.closed);
}

#[test]
fn monoid_on_nothing() {
    assert_eq!(Builtin::Monoid.carrier(&[], &Budget::default()).unwrap(), vec![Value::List(vec![])]);
}

/// Distinct weight vectors with a common denominator at most `d`, counted
/// on reduced fractions.
fn convex_oracle(n: usize, d: i64) -> usize {
    let mut seen = BTreeSet::new();
    for q in 1..=d {
        let mut ks = vec![vec![]];
        for _ in 0..n {
            ks = ks.into_iter().flat_map(|k: Vec<i64>| (0..=q).map(move |i| [k.clone(), vec![i]].concat())).collect();
        }
        for k in ks.into_iter().filter(|k| k.iter().sum::<i64>() == q) {
            seen.insert(k.iter().map(|&i| Rational::new(i, q)).collect::<Vec<_>>());
        }
    }
    seen.len()
}

#[test]
fn convex_counts() {
    for d in 1..=4 {
        for n in 0..=3 {
            let b = Budget { denom: d, ..Budget::default() };
            let c = Builtin::Convex.carrier(&atoms(n), &b).unwrap();
            assert_eq!(c.len(), convex_oracle(n, d), "n = {n}, d = {d}");
            for v in &c {
                let Value::Dist(ws) = v else { panic!() };
                assert_eq!(ws.iter().map(|(_, p)| *p).sum::<Rational>(), Rational::from_integer(1));
                assert!(ws.iter().all(|(_, p)| *p > Rational::from_integer(0)));
            }
        }
    }
    assert_eq!(convex_oracle(2, 4), 7);
}

fn functions(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|f| (0..k).map(move |y| [f.clone(), vec![y]].concat())).collect();
    }
    out
}

fn apply(f: &[usize]) -> impl Fn(&Value) -> Value + '_ {
    move |x| Value::Int(f[x.as_int().unwrap() as usize] as i64)
}

#[test]
fn functor_laws() {
    let budget = Budget::default();
    for b in ALL {
        for n in 0..=3 {
            let xs = Value::ints(n);
            let tx = b.carrier(&xs, &budget).unwrap();
            for v in &tx {
                assert_eq!(&b.map(v, &|x| x.clone()), v);
            }
            for k in 0..=3 {
                for f in functions(n, k) {
                    let ty = b.carrier(&Value::ints(k), &budget).unwrap();
                    let fv: Vec<Value> = tx.iter().map(|v| b.map(v, &apply(&f))).collect();
                    assert!(fv.iter().all(|w| ty.binary_search(w).is_ok()), "{b}: image outside the carrier");
                    for g in functions(k, 2) {
                        let gf: Vec<usize> = f.iter().map(|&y| g[y]).collect();
                        for (v, w) in tx.iter().zip(&fv) {
                            assert_eq!(b.map(w, &apply(&g)), b.map(v, &apply(&gf)));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn semilattice_map_deduplicates() {
    let v = Value::set(atoms(2));
    let w = Builtin::Semilattice.map(&v, &|_| Value::atom("c"));
    assert_eq!(w, Value::set(vec![Value::atom("c")]));
}

#[test]
fn minimal_supports_match_brute_force() {
    for b in ALL {
        let t = FreeMonad::builtin(b, Budget::default());
        for n in 0..=4 {
            let xs = Value::ints(n);
            for v in t.carrier(&xs).unwrap() {
                let brute = brute_minimal_support(&t, &xs, &v).unwrap();
                let fast = minimal_support(b, &xs, &v);
                assert_eq!(fast, brute, "{b}: {v}");
                if let Some(s) = fast {
                    // no one-element-removed subset still contains v
                    for x in &s {
                        let smaller: Vec<Value> = s.iter().filter(|y| *y != x).cloned().collect();
                        assert!(!t.carrier(&smaller).unwrap().contains(&v));
                    }
                }
            }
        }
    }
    let mix = Value::dist(vec![(Value::atom("a"), Rational::new(1, 2)), (Value::atom("b"), Rational::new(1, 2))]);
    assert_eq!(minimal_support(Builtin::Convex, &atoms(2), &mix).unwrap().len(), 2);
}

#[test]
fn supports_move_along_injections() {
    for b in ALL.into_iter().filter(|b| *b != Builtin::Truncation) {
        for n in 0..=3 {
            for f in functions(n, 3).into_iter().filter(|f| f.iter().collect::<BTreeSet<_>>().len() == f.len()) {
                for v in b.carrier(&Value::ints(n), &Budget::default()).unwrap() {
                    let moved = minimal_support(b, &Value::ints(3), &b.map(&v, &apply(&f))).unwrap();
                    let image: BTreeSet<Value> = minimal_support(b, &Value::ints(n), &v).unwrap().iter().map(apply(&f)).collect();
                    assert_eq!(moved, image);
                }
            }
        }
    }
}

#[test]
fn monos_are_preserved() {
    for b in ALL {
        let r = check_preserves_monos(&FreeMonad::builtin(b, Budget::default()), 3).unwrap();
        assert!(r.ok(), "{b}: {:?}", r.first);
        assert!(r.checked > 0);
    }
}

#[test]
fn pullbacks_of_monos() {
    for b in ALL {
        let budget = if b == Builtin::Convex { Budget { denom: 3, ..Budget::default() } } else { Budget::default() };
        let r = check_preserves_pullbacks_of_monos(&FreeMonad::builtin(b, budget), 3).unwrap();
        assert_eq!(r.ok(), b != Builtin::Truncation, "{b}: {:?}", r.first);
        assert_eq!(Theory::builtin(b).has_drop_equations(), !r.ok());
    }
}

#[test]
fn custom_theories_without_drops_preserve_pullbacks() {
    let t = FreeMonad::new(custom(Builtin::Semilattice), Budget::default(), 4);
    assert!(check_preserves_pullbacks_of_monos(&t, 2).unwrap().ok());
    let t = FreeMonad::new(custom(Builtin::Truncation), Budget::default(), 2);
    assert!(!check_preserves_pullbacks_of_monos(&t, 2).unwrap().ok());
    // an absorbing element is a drop equation that does no harm: supports
    // still exist and move along maps
    let src = "op m/2\nop z/0\neq m(x, m(y, w)) = m(m(x, y), w)\neq m(x, y) = m(y, x)\neq m(x, x) = x\neq m(x, z) = z\n";
    let th = Theory::parse("absorbing", src).unwrap();
    assert!(th.has_drop_equations());
    assert!(check_preserves_pullbacks_of_monos(&FreeMonad::new(th, Budget::default(), 4), 2).unwrap().ok());
    // a unary operation forgetting its argument breaks the square
    let th = Theory::parse("forget", "op f/1\neq f(x) = f(y)\n").unwrap();
    let r = check_preserves_pullbacks_of_monos(&FreeMonad::new(th, Budget::default(), 3), 2).unwrap();
    let sq = r.first.unwrap();
    assert_eq!((sq.x, sq.y, sq.p.len(), sq.lhs, sq.rhs), (1, 2, 0, 0, 1));
}

#[test]
fn monad_laws() {
    let small = Budget { max_len: 2, denom: 3, ..Budget::default() };
    for b in ALL {
        let r = check_monad_laws(b, &Budget::default(), 3, &small, 2).unwrap();
        assert_eq!(r.failure, None, "{b}");
        assert!(r.unit_checked > 0);
    }
}

fn sl_term() -> impl Strategy<Value = AlgTerm> {
    let leaf = prop_oneof![
        Just(AlgTerm::op("bot", vec![])),
        (0..3usize).prop_map(|i| AlgTerm::var(((b'a' + i as u8) as char).to_string())),
    ];
    leaf.prop_recursive(4, 16, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| AlgTerm::op("join", vec![a, b])))
}

fn eval_sl(t: &AlgTerm) -> Value {
    Builtin::Semilattice.interpret(t, &|x| Value::atom(x)).unwrap()
}

proptest! {
    #[test]
    fn congruence_closure_agrees_with_normal_forms(t in sl_term(), u in sl_term()) {
        let mut g = EGraph::build(&custom(Builtin::Semilattice), &atoms(3), 4, 1 << 20).unwrap();
        let v = g.verdict(&t, &u).unwrap();
        let same = eval_sl(&t) == eval_sl(&u);
        prop_assert_eq!(v, if same { Verdict::Equal } else { Verdict::Apart });
    }

    #[test]
    fn open_graphs_never_claim_apart(depth in 0usize..3, t in sl_term(), u in sl_term()) {
        // monoid terms written with the semilattice names
        let mut th = custom(Builtin::Monoid);
        th.ops = [("join".to_string(), 2), ("bot".to_string(), 0)].into_iter().collect::<BTreeMap<_, _>>();
        th.equations = th
            .equations
            .iter()
            .map(|(l, r)| {
                let ren = |s: String| s.replace("mul", "join").replace("e()", "bot()");
                (parse_alg_term(&ren(l.to_string())).unwrap(), parse_alg_term(&ren(r.to_string())).unwrap())
            })
            .collect();
        let mut g = EGraph::build(&th, &atoms(3), depth, 1 << 20).unwrap();
        let v = g.verdict(&t, &u).unwrap();
        let list = |t: &AlgTerm| Builtin::Monoid.interpret(&parse_alg_term(&t.to_string().replace("join", "mul").replace("bot()", "e()")).unwrap(), &|x| Value::atom(x)).unwrap();
        prop_assert_ne!(v, Verdict::Apart);
        if v == Verdict::Equal {
            prop_assert_eq!(list(&t), list(&u));
        }
    }
}
