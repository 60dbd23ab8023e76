use std::collections::BTreeMap;

use clott::model::checks::{check_clock_irrelevance, check_force, check_forall_prod, check_forall_sum, check_invariance};
use clott::model::delay::Delay;
use clott::model::experiments::{exists_forall_experiment, unique_exists_check};
use clott::model::presheaf::site_obj;
use clott::model::{Evaluator, FinPresheaf, ModelError, Site, TypeExprM};
use clott::value::Value;

/// Morphism counts per (source, target) pair, enumerated independently:
/// objects as stage vectors with `N` meaning "clock unused", functions as
/// base-`pool` numbers.
fn brute_force_homs(pool: usize, bound: usize) -> BTreeMap<(Vec<usize>, Vec<usize>), usize> {
    let objects: Vec<Vec<usize>> = (0..(bound + 1).pow(pool as u32))
        .map(|mut code| {
            (0..pool)
                .map(|_| {
                    let s = code % (bound + 1);
                    code /= bound + 1;
                    s
                })
                .collect()
        })
        .collect();
    let mut homs = BTreeMap::new();
    for s in &objects {
        for t in &objects {
            let mut count = 0;
            for code in 0..pool.pow(pool as u32) {
                let image: Vec<usize> = (0..pool).map(|i| (code / pool.pow(i as u32)) % pool).collect();
                // only the values on clocks in use matter; count each function once
                let canonical = (0..pool).all(|i| s[i] < bound || image[i] == 0);
                let ok = (0..pool).filter(|&i| s[i] < bound).all(|i| t[image[i]] < bound && t[image[i]] <= s[i]);
                if canonical && ok {
                    count += 1;
                }
            }
            homs.insert((s.clone(), t.clone()), count);
        }
    }
    homs
}

fn stage_vector(site: &Site, o: usize, bound: usize) -> Vec<usize> {
    site.objs[o].time.theta.iter().map(|t| t.unwrap_or(bound)).collect()
}

#[test]
fn single_clock_bound_two_by_hand() {
    let s = Site::time(1, 2).unwrap();
    assert_eq!(s.objs.len(), 3);
    // ∅ → each object, 1 → 1, 1 → 0, 0 → 0
    assert_eq!(s.mors.len(), 6);
    assert!(s.ident.iter().all(|&i| i < s.mors.len()));
}

#[test]
fn morphisms_match_brute_force() {
    for pool in 1..=3 {
        for bound in 2..=3 {
            let s = Site::time(pool, bound).unwrap();
            let oracle = brute_force_homs(pool, bound);
            let mut counted: BTreeMap<(Vec<usize>, Vec<usize>), usize> = oracle.keys().map(|k| (k.clone(), 0)).collect();
            for m in &s.mors {
                *counted.get_mut(&(stage_vector(&s, m.src, bound), stage_vector(&s, m.dst, bound))).unwrap() += 1;
            }
            assert_eq!(counted, oracle, "pool {pool}, bound {bound}");
        }
    }
}

#[test]
fn composition_is_associative_and_unital() {
    let s = Site::new(2, 3, 1, 2).unwrap();
    for (f, mf) in s.mors.iter().enumerate() {
        assert_eq!(s.compose(s.ident[mf.src], f), f);
        assert_eq!(s.compose(f, s.ident[mf.dst]), f);
        for &g in &s.out[mf.dst] {
            let gf = s.compose(f, g);
            for &h in &s.out[s.mors[g].dst] {
                assert_eq!(s.compose(gf, h), s.compose(f, s.compose(g, h)));
            }
        }
    }
}

fn ev() -> Evaluator {
    Evaluator::new(2, 4)
}

fn eval(src: &str, d: usize) -> FinPresheaf {
    ev().eval_type(&TypeExprM::parse(src).unwrap(), d).unwrap()
}

fn stage_fiber(x: &FinPresheaf, k: usize) -> &[Value] {
    let t = clott::model::TimeObj::empty(x.site.pool).with(0, k);
    x.fiber(site_obj(&x.site, &t, &[0]).unwrap())
}

#[test]
fn finite_products() {
    let x = eval("prod(2, 3)", 0);
    assert!(x.sizes().iter().all(|&n| n == 6));
}

/// Limit of the chain below stage `k` by filtering the full product of the
/// stage fibers.
fn brute_limit(x: &FinPresheaf, k: usize) -> Vec<Vec<Value>> {
    let site = &x.site;
    let objs: Vec<usize> =
        (0..k).map(|j| site_obj(site, &clott::model::TimeObj::empty(site.pool).with(0, j), &[0]).unwrap()).collect();
    let mut tuples: Vec<Vec<Value>> = vec![vec![]];
    for &o in &objs {
        tuples = tuples.iter().flat_map(|t| x.fiber(o).iter().map(move |v| [t.clone(), vec![v.clone()]].concat())).collect();
    }
    tuples
        .into_iter()
        .filter(|t| {
            (0..k).all(|j| (0..j).all(|i| x.act(site.restriction(objs[j], objs[i]).unwrap(), &t[j]) == t[i]))
        })
        .collect()
}

#[test]
fn later_is_the_limit_of_earlier_stages() {
    for src in ["3", "delay(2)", "mu(sum(1, prod(2, later(X))))"] {
        let x = eval(src, 1);
        let lx = ev().later(&x, 0).unwrap();
        for k in 0..4 {
            let expected: Vec<Value> = brute_limit(&x, k).into_iter().map(Value::Tuple).collect();
            let mut got = stage_fiber(&lx, k).to_vec();
            got.sort();
            let mut exp = expected.clone();
            exp.sort();
            assert_eq!(got, exp, "{src} at stage {k}");
        }
        assert_eq!(stage_fiber(&lx, 0).len(), 1);
    }
    let c = eval("later(3)", 1);
    for k in 1..4 {
        assert_eq!(stage_fiber(&c, k).len(), 3);
    }
}

#[test]
fn delay_stage_law() {
    let d = eval("delay(1)", 1);
    for k in 0..4 {
        assert_eq!(stage_fiber(&d, k).len(), k + 2);
    }
    let ld = eval("later(delay(1))", 1);
    for k in 1..4 {
        assert_eq!(stage_fiber(&ld, k).len(), stage_fiber(&d, k - 1).len());
    }
    let elems = [Delay::now(Value::Int(0)), Delay::steps(2, Value::Int(0)), Delay::Never];
    for e in &elems {
        for k in 0..4 {
            assert!(stage_fiber(&d, k).contains(&e.at_stage(k)), "{e} at {k}");
        }
    }
}

const CORPUS_CLOSED: &[&str] = &[
    "2",
    "prod(2, 3)",
    "sum(1, 2)",
    "arrow(2, 2)",
    "forall(later(2))",
    "forall(delay(1))",
    "forall(mu(sum(1, prod(2, later(X)))))",
    "top",
    "bot",
    "exists(3, true)",
    "all(2, false)",
    "forall(exists(4, stage_le))",
    "and(top, forall(later(top)))",
    "or(bot, exists(prod(2, 2), eq))",
    "bag(2)",
];

const CORPUS_CLOCKED: &[&str] = &[
    "later(2)",
    "delay(1)",
    "mu(sum(1, prod(2, later(X))))",
    "later(arrow(2, 2))",
    "arrow(later(2), 2)",
    "pf(later(2))",
    "df(later(2))",
    "exists(prod(delay(1), delay(1)), eq)",
    "all(4, stage_le)",
    "later(exists(4, stage_le))",
];

#[test]
fn every_corpus_type_is_functorial_and_invariant() {
    for (srcs, d) in [(CORPUS_CLOSED, 0), (CORPUS_CLOCKED, 1)] {
        for src in srcs {
            let x = eval(src, d);
            x.check_functorial().unwrap_or_else(|e| panic!("{src}: {e:?}"));
            check_invariance(&x).unwrap_or_else(|e| panic!("{src}: {e:?}"));
        }
    }
}

#[test]
fn clock_presheaf_is_not_invariant() {
    let clk = FinPresheaf::clk(ev().site(0, 2).unwrap());
    clk.check_functorial().unwrap();
    let err = check_invariance(&clk).unwrap_err();
    assert_eq!(err.object, "{}");
}

#[test]
fn constant_types_are_clock_irrelevant() {
    let e = ev();
    for src in ["2", "sum(1, 3)", "forall(later(2))"] {
        let a = e.eval_type(&TypeExprM::parse(src).unwrap(), 0).unwrap();
        // the evaluated type lives on objects with at most `pool − depth` clocks
        check_clock_irrelevance(&e, &a).unwrap_or_else(|err| panic!("{src}: {err}"));
    }
}

#[test]
fn forall_distributes_over_sums_and_products() {
    let e = ev();
    let target = e.site(0, 1).unwrap();
    let pairs = [("2", "3"), ("delay(1)", "later(2)"), ("mu(sum(1, prod(2, later(X))))", "1"), ("later(delay(1))", "pf(later(1))")];
    for (b, c) in pairs {
        let (b, c) = (eval(b, 1), eval(c, 1));
        check_forall_sum(&e, &b, &c, &target).unwrap();
        check_forall_prod(&e, &b, &c, &target).unwrap();
    }
}

#[test]
fn force_verdicts() {
    let e = ev();
    let target = e.site(0, 1).unwrap();
    let constant = check_force(&e, &eval("3", 1), &target).unwrap();
    assert!(constant.iso && constant.stabilises && constant.first_failure_stage.is_none());
    let delay = check_force(&e, &eval("delay(1)", 1), &target).unwrap();
    assert!(!delay.iso && delay.truncation_artifact && !delay.stabilises);
    assert_eq!(delay.first_failure_stage, Some(0));
    let settles = check_force(&e, &eval("later(3)", 1), &target).unwrap();
    assert!(settles.iso && settles.stabilises);
    assert_eq!(settles.first_failure_stage, Some(0));
}

#[test]
fn forall_needs_a_fresh_clock() {
    let e = Evaluator::new(1, 3);
    let err = e.eval_type(&TypeExprM::parse("forall(later(2))").unwrap(), 1).unwrap_err();
    assert!(matches!(err, ModelError::FreshClockExhausted(_)));
    assert!(e.eval_type(&TypeExprM::parse("forall(later(2))").unwrap(), 0).is_ok());
}

#[test]
fn unguarded_recursion_is_rejected() {
    for src in ["mu(sum(1, X))", "later(X)", "mu(forall(later(X)))"] {
        assert!(ev().eval_type(&TypeExprM::parse(src).unwrap(), 1).is_err(), "{src}");
    }
}

#[test]
fn exists_is_a_union() {
    let x = eval("exists(4, stage_le)", 1);
    for k in 0..4 {
        assert_eq!(stage_fiber(&x, k).len(), 1);
    }
    let none = eval("exists(2, stage_le)", 1);
    assert_eq!(stage_fiber(&none, 1).len(), 1);
    assert!(stage_fiber(&none, 2).is_empty());
}

fn ordinal(e: &Evaluator, n: usize) -> FinPresheaf {
    FinPresheaf::constant(e.site(0, e.pool).unwrap(), &Value::ints(n))
}

#[test]
fn example_four_witness_grows_with_the_bound() {
    for n in 3..=8 {
        let e = Evaluator::new(2, n);
        let x = ordinal(&e, n);
        let phi = |o: &clott::model::TimeObj, v: &Value, l: usize| o.stage(l) as i64 <= v.as_int().unwrap();
        let rows = exists_forall_experiment(&x, &phi).unwrap();
        assert!(!rows.is_empty());
        for r in rows {
            assert!(r.lhs && r.rhs);
            assert_eq!(r.witness, Some(Value::Int(n as i64 - 1)));
        }
    }
}

#[test]
fn unique_existence_on_delays() {
    let e = Evaluator::new(2, 4);
    let x = ordinal(&e, 3);
    for (m, n) in [(1, 1), (2, 2), (0, 2), (2, 1)] {
        let target = Delay::steps(m, Value::Int(1));
        let phi = |o: &clott::model::TimeObj, v: &Value, l: usize| {
            let k = o.stage(l);
            Delay::steps(n, v.clone()).at_stage(k) == target.at_stage(k)
        };
        let r = unique_exists_check(&x, &phi, n).unwrap();
        assert!(r.hypothesis_holds, "m {m} n {n}");
        assert_eq!(r.commutes, Some(true));
        assert_eq!(r.rows.iter().all(|row| row.lhs), m == n);
    }
    let two = |_: &clott::model::TimeObj, _: &Value, _: usize| true;
    let r = unique_exists_check(&x, &two, 0).unwrap();
    assert!(!r.hypothesis_holds && r.commutes.is_none());
    let empty = |_: &clott::model::TimeObj, _: &Value, _: usize| false;
    let r = unique_exists_check(&x, &empty, 0).unwrap();
    assert!(r.hypothesis_holds && r.rows.iter().all(|row| !row.lhs && !row.rhs));
}

#[test]
fn parse_print_round_trip() {
    for src in CORPUS_CLOSED.iter().chain(CORPUS_CLOCKED) {
        let t = TypeExprM::parse(src).unwrap();
        assert_eq!(TypeExprM::parse(&t.to_string()).unwrap(), t);
    }
}

#[test]
fn forall_commutes_with_theories() {
    use clott::model::checks::check_forall_theory;
    use clott::theories::Builtin;
    let e = ev();
    let target = e.site(0, 1).unwrap();
    for b in [Builtin::Semilattice, Builtin::Convex, Builtin::Truncation, Builtin::CommutativeMonoid] {
        for src in ["2", "later(2)", "delay(1)"] {
            check_forall_theory(&e, b, &eval(src, 1), &target).unwrap_or_else(|err| panic!("{b} on {src}: {err}"));
        }
    }
}
