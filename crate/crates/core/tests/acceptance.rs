//! Acceptance gate: each criterion prints one PASS/FAIL line with its
//! evidence and wall time. Run with `--nocapture` to see the lines.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clott::coalgebra::bisim::{bisimilarity, bisimilarity_classes, blocks, pf_classes_small};
use clott::coalgebra::stage_law::check_stage_law;
use clott::coalgebra::weak::weak_bisim_delay;
use clott::coalgebra::{terminal_sequence, Coalgebra, FunctorExpr};
use clott::kernel::golden::run_golden_dir;
use clott::kernel::{check_source, ItemOutcome, DEFAULT_FUEL};
use clott::model::checks::{check_forall_prod, check_forall_sum, check_invariance};
use clott::model::delay::Delay;
use clott::model::experiments::{exists_forall_experiment, unique_exists_check};
use clott::model::{Evaluator, FinPresheaf, TimeObj, TypeExprM};
use clott::theories::builtin::ALL;
use clott::theories::checks::{brute_minimal_support, check_preserves_pullbacks_of_monos, minimal_support};
use clott::theories::{Budget, Builtin, EGraph, FreeMonad, Theory};
use clott::value::{Rational, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Fails the criterion with a message unless `cond` holds.
macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

// Runtime limits, checked against wall time of the optimised test build.
const TYPING_LIMIT: Duration = Duration::from_secs(5);
const PULLBACK_LIMIT: Duration = Duration::from_secs(30);
const TERMINAL_LIMIT: Duration = Duration::from_secs(60);
const EXPERIMENT_LIMIT: Duration = Duration::from_secs(30);

/// The typing rules of the two rule figures. Context formation covers the
/// clock and tick entries; `prop` covers the proposition counterparts.
const RULES: &[&str] = &[
    "context",
    "var",
    "tick-abs",
    "tick-app",
    "clock-abs",
    "clock-app",
    "fix",
    "universe",
    "el",
    "later-code",
    "forall-code",
    "inclusion",
    "prop",
];

/// Rules with a side condition that must have a rejecting file.
const SIDE_CONDITIONS: &[&str] =
    &["context", "var", "tick-abs", "tick-app", "clock-app", "fix", "universe", "later-code", "forall-code", "inclusion", "prop"];

fn typing_corpus() -> Outcome {
    let results = run_golden_dir(&corpus().join("golden"), DEFAULT_FUEL).map_err(|e| e.to_string())?;
    if let Some(bad) = results.iter().find(|r| !r.passed) {
        return Err(format!("{}: {}", bad.file, bad.detail));
    }
    let accepted: BTreeSet<&str> = results.iter().filter(|r| r.accepting).map(|r| r.rule.as_str()).collect();
    let rejected: BTreeSet<&str> = results.iter().filter(|r| !r.accepting).map(|r| r.rule.as_str()).collect();
    for rule in RULES {
        ensure!(accepted.contains(rule), "no accepting golden file for `{rule}`");
    }
    for rule in SIDE_CONDITIONS {
        ensure!(rejected.contains(rule), "no rejecting golden file for `{rule}`");
    }
    Ok(format!("{} files, {} rules accepted, {} side conditions rejected", results.len(), RULES.len(), SIDE_CONDITIONS.len()))
}

const DELAY: &str = "clock k.\nassume A : U{k}.\n\
    def D : U{k} = fix (fun (x : later k (U{k})) -> A ^+ ^later (a : k) -> x[a]).\n\
    conv D = A ^+ ^later (a : k) -> D.\n";

fn judgemental_unfolding() -> Outcome {
    let rep = check_source(DELAY, 1).map_err(|e| e.to_string())?;
    ensure!(rep.items.iter().all(|i| i.outcome == ItemOutcome::Ok), "fuel 1: {:?}", rep.items.last());
    let starved = check_source(DELAY, 0).map_err(|e| e.to_string())?;
    ensure!(
        matches!(starved.items.last().map(|i| &i.outcome), Some(ItemOutcome::Unknown { .. })),
        "fuel 0 should leave the query unknown"
    );
    Ok("converts at fuel 1, unknown at fuel 0".into())
}

fn drop_detection() -> Outcome {
    let mut seen = Vec::new();
    for (file, expect) in [("semilattice.thy", false), ("convex.thy", false), ("truncation.thy", true)] {
        let src = std::fs::read_to_string(corpus().join("theories").join(file)).map_err(|e| e.to_string())?;
        let th = Theory::parse(file.trim_end_matches(".thy"), &src).map_err(|e| e.to_string())?;
        ensure!(th.has_drop_equations() == expect, "{file}: drop equations {}", th.has_drop_equations());
        seen.push(format!("{file}: {}", th.drop_equations().len()));
    }
    for b in [Builtin::Semilattice, Builtin::Convex, Builtin::Truncation] {
        ensure!(Theory::builtin(b).has_drop_equations() == (b == Builtin::Truncation), "builtin {b}");
    }
    Ok(seen.join(", "))
}

/// Squares `f: X → Y`, `Z ⊆ Y` with `|X|, |Y| ≤ bound` where `X` and `Z`
/// are nonempty and the preimage of `Z` is empty.
fn empty_preimage_squares(bound: usize) -> usize {
    let mut count = 0;
    for n in 1..=bound {
        for k in 0..=bound {
            for code in 0..k.pow(n as u32) {
                let image: u32 = (0..n).map(|i| 1u32 << ((code / k.pow(i as u32)) % k)).fold(0, |a, b| a | b);
                count += (1u32..1 << k).filter(|z| z & image == 0).count();
            }
        }
    }
    count
}

fn pullback_counterexample() -> Outcome {
    let trunc = check_preserves_pullbacks_of_monos(&FreeMonad::builtin(Builtin::Truncation, Budget::default()), 3)
        .map_err(|e| e.to_string())?;
    let sq = trunc.first.clone().ok_or("truncation passed")?;
    ensure!(
        (sq.x, sq.y, sq.f.as_slice(), sq.z.as_slice(), sq.p.len(), sq.lhs, sq.rhs) == (1, 2, &[0][..], &[1][..], 0, 0, 1),
        "first truncation failure is {sq:?}"
    );
    let expected = empty_preimage_squares(3);
    ensure!(trunc.failures == expected, "truncation fails on {} squares, expected {expected}", trunc.failures);
    let mut passed = Vec::new();
    for b in [Builtin::Semilattice, Builtin::Convex, Builtin::Monoid, Builtin::CommutativeMonoid] {
        let budget = if b == Builtin::Convex { Budget { denom: 3, ..Budget::default() } } else { Budget::default() };
        let r = check_preserves_pullbacks_of_monos(&FreeMonad::builtin(b, budget), 3).map_err(|e| e.to_string())?;
        ensure!(r.ok(), "{b}: {:?}", r.first);
        passed.push(format!("{b} {}", r.checked));
    }
    Ok(format!(
        "truncation fails on {} of {} squares, first X=1 Y=2 Z={{1}} P=∅; passes: {}",
        trunc.failures,
        trunc.checked,
        passed.join(", ")
    ))
}

fn atoms(n: usize) -> Vec<Value> {
    (0..n).map(|i| Value::atom(((b'a' + i as u8) as char).to_string())).collect()
}

fn free_model_counts() -> Outcome {
    let mut th = Theory::builtin(Builtin::Semilattice);
    th.builtin = None;
    let mut sizes = Vec::new();
    for n in 0..=4 {
        let normal = Builtin::Semilattice.carrier(&atoms(n), &Budget::default()).map_err(|e| e.to_string())?.len();
        let g = EGraph::build(&th, &atoms(n), 4, 1 << 20).map_err(|e| e.to_string())?;
        ensure!(g.closed, "n = {n}: congruence closure did not saturate");
        ensure!(normal == 1 << n && g.class_count() == 1 << n, "n = {n}: {normal} normal forms, {} classes", g.class_count());
        sizes.push(normal.to_string());
    }
    Ok(format!("|T(X)| = {} for |X| = 0..4", sizes.join(", ")))
}

fn minimal_supports() -> Outcome {
    let mut checked = 0;
    for b in ALL {
        let t = FreeMonad::builtin(b, Budget::default());
        for n in 0..=4 {
            let xs = Value::ints(n);
            for v in t.carrier(&xs).map_err(|e| e.to_string())? {
                let brute = brute_minimal_support(&t, &xs, &v).map_err(|e| e.to_string())?;
                ensure!(minimal_support(b, &xs, &v) == brute, "{b}: {v}");
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} elements over five theories"))
}

fn terminal_sequences() -> Outcome {
    let budget = Budget::default();
    let pf = terminal_sequence(&FunctorExpr::parse("pf(id)").unwrap(), 4, &budget, false);
    ensure!(pf.sizes() == [1, 2, 4, 16, 65536], "Pf sizes {:?}", pf.sizes());
    let c = terminal_sequence(&FunctorExpr::parse("const{a, b, c}").unwrap(), 4, &budget, true);
    ensure!(c.converged_at == Some(1), "constant converges at {:?}", c.converged_at);
    let mut laws = Vec::new();
    for src in ["sum(1, id)", "prod(2, id)", "pf(prod(const{l}, id))"] {
        let r = check_stage_law(&FunctorExpr::parse(src).unwrap(), 4, &budget).map_err(|e| e.to_string())?;
        ensure!(r.holds(), "{src}: {:?}", r.rows);
        let sizes: Vec<String> = r.rows.iter().map(|row| row.model_size.to_string()).collect();
        laws.push(format!("{src} [{}]", sizes.join(" ")));
    }
    Ok(format!("Pf 1 2 4 16 65536; constant at 1; stage law {}", laws.join(", ")))
}

// --- bisimilarity -----------------------------------------------------------

/// Largest bisimulation on a labelled system given by successor masks, as
/// a greatest fixed point: start from all pairs and drop a pair while one
/// side has a move the other cannot match inside the relation.
fn brute_pf(succ: &[[u8; 2]]) -> [u8; 8] {
    let n = succ.len();
    let mut r = [0u8; 8];
    for row in r.iter_mut().take(n) {
        *row = ((1u16 << n) - 1) as u8;
    }
    let sim = |r: &[u8; 8], x: usize, y: usize| {
        (0..2).all(|a| {
            let mut m = succ[x][a];
            while m != 0 {
                if r[m.trailing_zeros() as usize] & succ[y][a] == 0 {
                    return false;
                }
                m &= m - 1;
            }
            true
        })
    };
    loop {
        let mut changed = false;
        for x in 0..n {
            for y in 0..n {
                if r[x] >> y & 1 == 1 && !(sim(&r, x, y) && sim(&r, y, x)) {
                    r[x] &= !(1 << y);
                    r[y] &= !(1 << x);
                    changed = true;
                }
            }
        }
        if !changed {
            return r;
        }
    }
}

fn agrees(succ: &[[u8; 2]]) -> bool {
    let class = pf_classes_small(succ);
    let r = brute_pf(succ);
    (0..succ.len()).all(|x| (0..succ.len()).all(|y| (r[x] >> y & 1 == 1) == (class[x] == class[y])))
}

fn pf_coalgebra(succ: &[[u8; 2]]) -> Coalgebra {
    let labels = &[Value::atom("a"), Value::atom("b")];
    let structure = succ
        .iter()
        .map(|m| {
            Value::set(
                (0..2)
                    .flat_map(|a| {
                        (0..8).filter(move |t| m[a] >> t & 1 == 1).map(move |t| Value::pair(labels[a].clone(), Value::Int(t)))
                    })
                    .collect(),
            )
        })
        .collect();
    Coalgebra { functor: FunctorExpr::parse("pf(prod(const{a, b}, id))").unwrap(), states: succ.len(), structure }
}

fn generic_agrees(succ: &[[u8; 2]]) -> bool {
    let fast: Vec<usize> = pf_classes_small(succ).into_iter().map(usize::from).collect();
    bisimilarity_classes(&pf_coalgebra(succ)) == fast
}

/// One system per orbit under renaming states and swapping the two labels,
/// possibly several: the per-state move counts `(#a, #b)` are nondecreasing
/// and there are no more `a`-moves than `b`-moves overall.
fn for_each_representative(n: usize, f: &mut dyn FnMut(&[[u8; 2]])) {
    let width = n + 1;
    let mut groups: Vec<Vec<[u8; 2]>> = vec![Vec::new(); width * width];
    for a in 0..1u16 << n {
        for b in 0..1u16 << n {
            groups[a.count_ones() as usize * width + b.count_ones() as usize].push([a as u8, b as u8]);
        }
    }
    fn go(i: usize, n: usize, min_key: usize, sums: (usize, usize), groups: &[Vec<[u8; 2]>], sys: &mut Vec<[u8; 2]>, f: &mut dyn FnMut(&[[u8; 2]])) {
        if i == n {
            if sums.0 <= sums.1 {
                f(sys);
            }
            return;
        }
        let width = n + 1;
        for key in min_key..groups.len() {
            let s = (sums.0 + key / width, sums.1 + key % width);
            for v in &groups[key] {
                sys.push(*v);
                go(i + 1, n, key, s, groups, sys, f);
                sys.pop();
            }
        }
    }
    go(0, n, 0, (0, 0), &groups, &mut Vec::with_capacity(n), f);
}

/// Smallest encoding of the system over all state renamings and label swaps.
fn canonical(sys: &[[u8; 2]]) -> u64 {
    let n = sys.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    let move_mask = |m: u8, p: &[usize]| (0..n).filter(|t| m >> t & 1 == 1).fold(0u8, |acc, t| acc | 1 << p[t]);
    loop {
        for swap in [false, true] {
            let mut image = vec![[0u8; 2]; n];
            for x in 0..n {
                let (a, b) = if swap { (1, 0) } else { (0, 1) };
                image[perm[x]] = [move_mask(sys[x][a], &perm), move_mask(sys[x][b], &perm)];
            }
            best = best.min(image.iter().fold(0u64, |acc, m| acc << 16 | u64::from(m[0]) << 8 | u64::from(m[1])));
        }
        // next permutation
        let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else { break };
        let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
    best
}

fn all_systems(n: usize, labels: usize, f: &mut dyn FnMut(&[[u8; 2]])) {
    let bits = n * n * labels;
    let mut sys = vec![[0u8; 2]; n];
    for code in 0u32..1 << bits {
        for (x, s) in sys.iter_mut().enumerate() {
            for a in 0..labels {
                s[a] = ((code >> ((x * labels + a) * n)) & ((1 << n) - 1)) as u8;
            }
        }
        f(&sys);
    }
}

type Prob = (usize, Vec<(usize, Rational)>);

fn df_coalgebra(sys: &[Prob]) -> Coalgebra {
    let labels = [Value::atom("a"), Value::atom("b")];
    Coalgebra {
        functor: FunctorExpr::parse("prod(const{a, b}, df(id))").unwrap(),
        states: sys.len(),
        structure: sys
            .iter()
            .map(|(l, ws)| Value::pair(labels[*l].clone(), Value::dist(ws.iter().map(|(y, w)| (Value::Int(*y as i64), *w)).collect())))
            .collect(),
    }
}

fn random_df(rng: &mut ChaCha8Rng) -> Vec<Prob> {
    let n = rng.gen_range(2..=7);
    (0..n)
        .map(|_| {
            let label = rng.gen_range(0..2);
            let d = rng.gen_range(1..=4);
            let parts = rng.gen_range(1..=d.min(n));
            // a random composition of d into `parts` positive pieces
            let mut cuts: BTreeSet<i64> = BTreeSet::new();
            while cuts.len() < parts - 1 {
                cuts.insert(rng.gen_range(1..d as i64));
            }
            let bounds: Vec<i64> = std::iter::once(0).chain(cuts).chain(std::iter::once(d as i64)).collect();
            let mut targets: Vec<usize> = Vec::new();
            while targets.len() < parts {
                let t = rng.gen_range(0..n);
                if !targets.contains(&t) {
                    targets.push(t);
                }
            }
            let ws = targets.into_iter().zip(bounds.windows(2)).map(|(t, w)| (t, Rational::new(w[1] - w[0], d as i64))).collect();
            (label, ws)
        })
        .collect()
}

/// Set partitions of `0..n` as restricted growth strings.
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

/// The coarsest stable partition by enumerating all of them.
fn brute_df(sys: &[Prob]) -> Result<Vec<Vec<usize>>, String> {
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
    let coarsest = all.iter().min_by_key(|p| p.iter().max().map_or(0, |m| m + 1)).ok_or("no stable partition")?;
    for p in &all {
        ensure!((0..p.len()).all(|x| (0..p.len()).all(|y| p[x] != p[y] || coarsest[x] == coarsest[y])), "no coarsest partition");
    }
    Ok(blocks(coarsest))
}

fn bisimilarity_check() -> Outcome {
    // small systems, every one, against both refinements
    let mut small = 0usize;
    for n in 0..=3 {
        for labels in 1..=2 {
            let mut bad = None;
            all_systems(n, labels, &mut |s| {
                small += 1;
                if bad.is_none() && !(agrees(s) && generic_agrees(s)) {
                    bad = Some(s.to_vec());
                }
            });
            ensure!(bad.is_none(), "disagreement on {:?}", bad);
        }
    }
    // one label, four states
    let mut bad = None;
    all_systems(4, 1, &mut |s| {
        if bad.is_none() && !agrees(s) {
            bad = Some(s.to_vec());
        }
    });
    ensure!(bad.is_none(), "disagreement on {:?}", bad);
    // the orbit reduction reaches every orbit
    let mut full = BTreeSet::new();
    all_systems(3, 2, &mut |s| {
        full.insert(canonical(s));
    });
    let mut reached = BTreeSet::new();
    for_each_representative(3, &mut |s| {
        reached.insert(canonical(s));
    });
    ensure!(reached == full, "representatives cover {} of {} orbits", reached.len(), full.len());
    // four states, two labels: one or more systems per orbit
    let (mut reps, mut bad) = (0u64, None);
    for_each_representative(4, &mut |s| {
        reps += 1;
        if bad.is_none() && (!agrees(s) || (reps % 4099 == 0 && !generic_agrees(s))) {
            bad = Some(s.to_vec());
        }
    });
    ensure!(bad.is_none(), "disagreement on {:?}", bad);

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut merging = 0;
    for i in 0..50 {
        let sys = random_df(&mut rng);
        let oracle = brute_df(&sys)?;
        let got = bisimilarity(&df_coalgebra(&sys));
        ensure!(got == oracle, "system {i}: {got:?} against {oracle:?} for {sys:?}");
        merging += usize::from(oracle.len() < sys.len());
    }
    Ok(format!("{small} systems with ≤ 3 states, 65536 one-label, {reps} representatives with 4 states; 50 distributions, {merging} with merged states"))
}

// --- model ------------------------------------------------------------------

const CLOSED: &[&str] = &[
    "2",
    "prod(2, 3)",
    "sum(1, 2)",
    "arrow(2, 2)",
    "forall(later(2))",
    "forall(delay(1))",
    "forall(mu(sum(1, prod(2, later(X)))))",
    "top",
    "exists(3, true)",
    "forall(exists(4, stage_le))",
    "or(bot, exists(prod(2, 2), eq))",
    "bag(2)",
];

const CLOCKED: &[&str] = &[
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

fn model_invariants() -> Outcome {
    let ev = Evaluator::new(2, 4);
    let eval = |src: &str, d: usize| ev.eval_type(&TypeExprM::parse(src).unwrap(), d).map_err(|e| format!("{src}: {e}"));
    for (srcs, d) in [(CLOSED, 0), (CLOCKED, 1)] {
        for src in srcs {
            let x = eval(src, d)?;
            x.check_functorial().map_err(|e| format!("{src}: {e:?}"))?;
            check_invariance(&x).map_err(|e| format!("{src}: {e:?}"))?;
        }
    }
    let target = ev.site(0, 1).map_err(|e| e.to_string())?;
    let pairs = [("2", "3"), ("delay(1)", "later(2)"), ("mu(sum(1, prod(2, later(X))))", "1")];
    for (b, c) in pairs {
        let (bx, cx) = (eval(b, 1)?, eval(c, 1)?);
        check_forall_sum(&ev, &bx, &cx, &target).map_err(|e| format!("sum of {b}, {c}: {e}"))?;
        check_forall_prod(&ev, &bx, &cx, &target).map_err(|e| format!("product of {b}, {c}: {e}"))?;
    }
    let clk = FinPresheaf::clk(ev.site(0, 2).map_err(|e| e.to_string())?);
    ensure!(check_invariance(&clk).is_err(), "the clock presheaf passed invariance");
    Ok(format!("{} types invariant, ∀ over + and × on {} pairs, Clk fails", CLOSED.len() + CLOCKED.len(), pairs.len()))
}

fn ordinal(e: &Evaluator, n: usize) -> FinPresheaf {
    FinPresheaf::constant(e.site(0, e.pool).unwrap(), &Value::ints(n))
}

fn exists_forall() -> Outcome {
    for n in 3..=8 {
        let e = Evaluator::new(2, n);
        let phi = |o: &TimeObj, v: &Value, l: usize| o.stage(l) as i64 <= v.as_int().unwrap();
        let rows = exists_forall_experiment(&ordinal(&e, n), &phi).map_err(|e| e.to_string())?;
        ensure!(!rows.is_empty(), "N = {n}: no objects with a fresh clock");
        for r in rows {
            ensure!(r.lhs && r.rhs && r.witness == Some(Value::Int(n as i64 - 1)), "N = {n}: {r:?}");
        }
    }
    // a downward-closed predicate on two elements: x holds below stage c[x]
    let mut predicates = 0;
    for n in 2..=6 {
        let e = Evaluator::new(2, n);
        let x = ordinal(&e, 2);
        for c0 in 0..=n {
            for c1 in 0..=n {
                let c = [c0, c1];
                let phi = |o: &TimeObj, v: &Value, l: usize| o.stage(l) < c[v.as_int().unwrap() as usize];
                let rows = exists_forall_experiment(&x, &phi).map_err(|e| e.to_string())?;
                ensure!(rows.iter().all(|r| r.commutes()), "N = {n}, cutoffs {c:?}");
                predicates += 1;
            }
        }
    }
    let e = Evaluator::new(2, 4);
    let x = ordinal(&e, 3);
    for (m, n) in [(1, 1), (2, 2), (0, 2), (2, 1)] {
        let target = Delay::steps(m, Value::Int(1));
        let phi = |o: &TimeObj, v: &Value, l: usize| {
            let k = o.stage(l);
            Delay::steps(n, v.clone()).at_stage(k) == target.at_stage(k)
        };
        let r = unique_exists_check(&x, &phi, n).map_err(|e| e.to_string())?;
        ensure!(r.hypothesis_holds && r.commutes == Some(true), "step^{n} x = step^{m} 1: {r:?}");
    }
    Ok(format!("witness N−1 for N = 3..8; {predicates} downward-closed predicates commute; 4 unique-existence instances"))
}

fn weak_bisimilarity() -> Outcome {
    let eq = |a: &Value, b: &Value| a == b;
    let carrier = [Value::atom("a"), Value::atom("b")];
    let a = Value::atom("a");
    for n in 1..=6 {
        for k in 0..n {
            let r = weak_bisim_delay(&Delay::now(a.clone()), &Delay::steps(k, a.clone()), n, &eq, &carrier);
            ensure!(r.related, "now a against step^{k} now a at N = {n}: {:?}", r.stages);
        }
    }
    // every step on both sides uses up one stage before the values are compared
    for m in 1..4 {
        let r = weak_bisim_delay(&Delay::steps(m, a.clone()), &Delay::steps(m, Value::atom("b")), 5, &eq, &carrier);
        let expect: Vec<bool> = (0..5).map(|k| k < m).collect();
        ensure!(r.stages == expect, "step^{m} a against step^{m} b: {:?}", r.stages);
    }
    Ok("now a ∼ step^k now a for k < N ≤ 6; step^m a ≁ step^m b from stage m on".into())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 11] = [
        ("typing corpus", typing_corpus, Some(TYPING_LIMIT)),
        ("judgemental unfolding", judgemental_unfolding, None),
        ("drop detection", drop_detection, None),
        ("pullback counterexample", pullback_counterexample, Some(PULLBACK_LIMIT)),
        ("free-model counts", free_model_counts, None),
        ("minimal support", minimal_supports, None),
        ("terminal sequences", terminal_sequences, Some(TERMINAL_LIMIT)),
        ("bisimilarity", bisimilarity_check, None),
        ("model invariants", model_invariants, None),
        ("exists/forall experiments", exists_forall, Some(EXPERIMENT_LIMIT)),
        ("weak bisimilarity", weak_bisimilarity, None),
    ];
    let mut failed = Vec::new();
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let took = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, limit) {
            if took > *limit {
                outcome = Err(format!("took {took:.1?}, limit {limit:?}"));
            }
        }
        match &outcome {
            Ok(evidence) => println!("PASS {:>2} {name}: {evidence} ({took:.2?})", i + 1),
            Err(why) => {
                println!("FAIL {:>2} {name}: {why} ({took:.2?})", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
