//! `model verify` targets.

use serde_json::json;

use super::{usage, CliResult, Opts, UsageError};
use crate::model::checks::{
    check_clock_irrelevance, check_force, check_forall_prod, check_forall_sum, check_forall_theory, check_invariance,
};
use crate::model::delay::Delay;
use crate::model::experiments::{exists_forall_experiment, unique_exists_check, FiberOutcome};
use crate::model::{Evaluator, FinPresheaf, ModelError, TimeObj, TypeExprM};
use crate::report::{Check, Report, Verdict};
use crate::theories::Builtin;
use crate::value::Value;

pub const CLOSED: &[&str] = &[
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

pub const CLOCKED: &[&str] = &[
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

const NAMES: &[&str] = &[
    "invariance",
    "clk",
    "clock-irrelevance",
    "forall-sum",
    "forall-prod",
    "forall-theory",
    "force",
    "example4",
    "bounded-exists",
    "unique-exists",
];

fn model_err(e: ModelError) -> UsageError {
    usage(e)
}

/// Parses a user type, or falls back to the given list.
fn types<'a>(ty: Option<&'a str>, defaults: &[&'a str]) -> Vec<&'a str> {
    ty.map_or_else(|| defaults.to_vec(), |t| vec![t])
}

fn eval(ev: &Evaluator, src: &str, clocks: usize) -> CliResult<FinPresheaf> {
    let e = TypeExprM::parse(src).map_err(|e| UsageError(format!("`{src}`: {e}")))?;
    ev.eval_type(&e, clocks).map_err(|e| UsageError(format!("`{src}`: {e}")))
}

/// Free clocks an expression needs: those under no `forall`.
fn clocks_of(src: &str) -> CliResult<usize> {
    let e = TypeExprM::parse(src).map_err(|e| UsageError(format!("`{src}`: {e}")))?;
    Ok(usize::from(e.check_scope(0).is_err()))
}

pub fn verify(o: &Opts, name: &str, ty: Option<&str>) -> CliResult<Report> {
    let mut report = Report::new(format!("model verify {name}"), o.params());
    let names: Vec<&str> = if name == "all" { NAMES.to_vec() } else { vec![name] };
    for n in names {
        for c in run(o, n, ty)? {
            report.push(c);
        }
    }
    Ok(report)
}

pub fn run(o: &Opts, name: &str, ty: Option<&str>) -> CliResult<Vec<Check>> {
    let ev = o.evaluator();
    let bounds = json!({ "pool": o.pool, "bound": o.bound });
    let mut out = Vec::new();
    match name {
        "invariance" => {
            let list: Vec<(&str, usize)> = match ty {
                Some(t) => vec![(t, clocks_of(t)?)],
                None => CLOSED.iter().map(|s| (*s, 0)).chain(CLOCKED.iter().map(|s| (*s, 1))).collect(),
            };
            for (src, d) in list {
                let x = eval(&ev, src, d)?;
                let r = check_invariance(&x);
                out.push(Check::new(
                    format!("invariance {src}"),
                    "invariance under clock introduction",
                    Verdict::of(r.is_ok()),
                    r.as_ref().map_or_else(|c| format!("{}: {}", c.object, c.detail), |_| format!("{} objects", x.site.objs.len())),
                    json!({ "bounds": bounds, "counterexample": r.err() }),
                ));
            }
        }
        "clk" => {
            let clk = FinPresheaf::clk(ev.site(0, 2.min(o.pool)).map_err(model_err)?);
            let r = check_invariance(&clk);
            out.push(Check::new(
                "clk is not invariant",
                "the clock object is excluded from the model's types",
                Verdict::of(r.is_err()),
                r.as_ref().map_or_else(|c| format!("fails at {}: {}", c.object, c.detail), |_| "unexpectedly invariant".into()),
                json!({ "bounds": bounds, "counterexample": r.err() }),
            ));
        }
        "clock-irrelevance" => {
            for src in types(ty, &["2", "sum(1, 3)", "forall(later(2))"]) {
                let r = check_clock_irrelevance(&ev, &eval(&ev, src, 0)?);
                out.push(Check::new(
                    format!("clock irrelevance {src}"),
                    "A -> forall A is an isomorphism",
                    Verdict::of(r.is_ok()),
                    r.as_ref().map_or_else(|e| e.to_string(), |_| "bijective and natural".into()),
                    json!({ "bounds": bounds, "error": r.err().map(|e| e.to_string()) }),
                ));
            }
        }
        "forall-sum" | "forall-prod" => {
            let target = ev.site(0, 1).map_err(model_err)?;
            let pairs = [("2", "3"), ("delay(1)", "later(2)"), ("mu(sum(1, prod(2, later(X))))", "1")];
            for (b, c) in pairs {
                let (bx, cx) = (eval(&ev, b, 1)?, eval(&ev, c, 1)?);
                let (r, op) = if name == "forall-sum" {
                    (check_forall_sum(&ev, &bx, &cx, &target), "+")
                } else {
                    (check_forall_prod(&ev, &bx, &cx, &target), "x")
                };
                out.push(Check::new(
                    format!("forall ({b} {op} {c})"),
                    "forall distributes over finite sums and products",
                    Verdict::of(r.is_ok()),
                    r.as_ref().map_or_else(|e| e.to_string(), |_| "canonical map bijective".into()),
                    json!({ "bounds": bounds, "error": r.err().map(|e| e.to_string()) }),
                ));
            }
        }
        "forall-theory" => out.extend(forall_theory(o, ty)?),
        "force" => {
            let target = ev.site(0, 1).map_err(model_err)?;
            for src in types(ty, &["3", "later(3)", "delay(1)"]) {
                let r = check_force(&ev, &eval(&ev, src, 1)?, &target).map_err(model_err)?;
                let verdict = if r.iso {
                    Verdict::Pass
                } else if r.truncation_artifact {
                    Verdict::TruncationArtifact
                } else {
                    Verdict::Fail
                };
                let summary = match (&r.counterexample, r.first_failure_stage) {
                    (None, _) => "forall A -> forall later A is bijective".to_string(),
                    (Some(c), stage) => format!("{}: {} (stage chain first fails at {stage:?})", c.object, c.detail),
                };
                out.push(Check::new(
                    format!("force {src}"),
                    "forall A -> forall later A is an isomorphism",
                    verdict,
                    summary,
                    json!({ "bounds": bounds, "report": r }),
                ));
            }
        }
        "example4" => {
            let n = o.bound;
            let e = Evaluator::new(o.pool.max(2), n);
            let phi = |t: &TimeObj, v: &Value, l: usize| t.stage(l) as i64 <= v.as_int().unwrap_or(-1);
            let rows = exists_forall_experiment(&ordinal(&e, n)?, &phi).map_err(model_err)?;
            let witnesses: Vec<Option<Value>> = rows.iter().map(|r| r.witness.clone()).collect();
            let ok = !rows.is_empty() && witnesses.iter().all(|w| *w == Some(Value::Int(n as i64 - 1)));
            out.push(Check::new(
                format!("stage below x, N = {n}"),
                "the least uniform witness grows with the bound",
                Verdict::of(ok),
                format!("least uniform witness {} on {} objects", n - 1, rows.len()),
                json!({ "bounds": bounds, "rows": rows }),
            ));
        }
        "bounded-exists" => out.push(bounded_exists(o)?),
        "unique-exists" => out.extend(unique_exists(o)?),
        other => return Err(UsageError(format!("unknown model check `{other}`; use one of {}, all", NAMES.join(", ")))),
    }
    Ok(out)
}

fn ordinal(e: &Evaluator, n: usize) -> CliResult<FinPresheaf> {
    Ok(FinPresheaf::constant(e.site(0, e.pool).map_err(model_err)?, &Value::ints(n)))
}

pub fn forall_theory(o: &Opts, ty: Option<&str>) -> CliResult<Vec<Check>> {
    let ev = o.evaluator();
    let target = ev.site(0, 1).map_err(model_err)?;
    let mut out = Vec::new();
    for b in [Builtin::Semilattice, Builtin::Convex] {
        for src in types(ty, &["2", "later(2)", "delay(1)"]) {
            let r = check_forall_theory(&ev, b, &eval(&ev, src, 1)?, &target);
            out.push(Check::new(
                format!("{} commutes with forall on {src}", b.short()),
                "forall commutes with finite powersets and distributions",
                Verdict::of(r.is_ok()),
                r.as_ref().map_or_else(|e| e.to_string(), |_| "canonical map bijective".into()),
                json!({ "bounds": { "pool": o.pool, "bound": o.bound }, "error": r.err().map(|e| e.to_string()) }),
            ));
        }
    }
    Ok(out)
}

/// Two-element families with a predicate true below a cutoff per element.
pub fn bounded_exists(o: &Opts) -> CliResult<Check> {
    let mut tried = 0;
    let mut failures = Vec::new();
    for n in 2..=o.bound.max(2) {
        let e = Evaluator::new(o.pool.max(2), n);
        let x = ordinal(&e, 2)?;
        for c0 in 0..=n {
            for c1 in 0..=n {
                let c = [c0, c1];
                let phi = |t: &TimeObj, v: &Value, l: usize| t.stage(l) < c[v.as_int().unwrap_or(0) as usize];
                let rows = exists_forall_experiment(&x, &phi).map_err(model_err)?;
                tried += 1;
                if !rows.iter().all(FiberOutcome::commutes) {
                    failures.push(json!({ "bound": n, "cutoffs": c }));
                }
            }
        }
    }
    Ok(Check::new(
        "bounded existential",
        "forall commutes with existentials over finite sets",
        Verdict::of(failures.is_empty()),
        format!("{} of {tried} downward-closed predicates on two elements commute", tried - failures.len()),
        json!({ "bounds": { "pool": o.pool.max(2), "max_bound": o.bound.max(2), "elements": 2 }, "failures": failures }),
    ))
}

/// `step^n x` equals a fixed delay: unique once `n` stages have passed.
pub fn unique_exists(o: &Opts) -> CliResult<Vec<Check>> {
    let e = Evaluator::new(o.pool.max(2), o.bound);
    let x = ordinal(&e, 3)?;
    let mut out = Vec::new();
    for (m, n) in [(1, 1), (2, 2), (0, 2), (2, 1)] {
        let target = Delay::steps(m, Value::Int(1));
        let phi = |t: &TimeObj, v: &Value, l: usize| {
            let k = t.stage(l);
            Delay::steps(n, v.clone()).at_stage(k) == target.at_stage(k)
        };
        let r = unique_exists_check(&x, &phi, n).map_err(model_err)?;
        let ok = r.hypothesis_holds && r.commutes == Some(true);
        out.push(Check::new(
            format!("step^{n} x = step^{m} 1"),
            "forall commutes with essentially unique existentials",
            Verdict::of(ok),
            format!("uniqueness from stage {n}: {}; commutes: {:?}", r.hypothesis_holds, r.commutes),
            json!({ "bounds": { "pool": o.pool.max(2), "bound": o.bound, "elements": 3 }, "report": r }),
        ));
    }
    Ok(out)
}
