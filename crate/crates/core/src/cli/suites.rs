//! Curated batteries and the checks shared with single commands.

use serde_json::json;

use super::{model, theory_budget, theory_verdict, usage, CliResult, Opts, UsageError};
use crate::coalgebra::bisim::bisimilarity;
use crate::coalgebra::stage_law::check_stage_law;
use crate::coalgebra::weak::weak_bisim_delay;
use crate::coalgebra::{terminal_sequence, Coalgebra, FunctorExpr};
use crate::kernel::golden::run_golden_dir;
use crate::model::delay::Delay;
use crate::report::{Check, Report, Verdict};
use crate::theories::builtin::ALL;
use crate::theories::checks::{check_preserves_monos, check_preserves_pullbacks_of_monos, PreservationReport};
use crate::theories::{Budget, FreeMonad, Theory, TheoryError};
use crate::value::Value;

pub fn suite(o: &Opts, name: &str) -> CliResult<Report> {
    let mut report = Report::new(format!("suite {name}"), o.params());
    let checks = match name {
        "requirements" => requirements(o)?,
        "figures" => figures(o)?,
        "theories" => theories(o),
        "coalgebra" => coalgebra(o)?,
        other => return Err(UsageError(format!("unknown suite `{other}`; use requirements, figures, theories or coalgebra"))),
    };
    for c in checks {
        report.push(c);
    }
    Ok(report)
}

fn requirements(o: &Opts) -> CliResult<Vec<Check>> {
    let mut out = model::forall_theory(o, None)?;
    out.push(model::bounded_exists(o)?);
    out.extend(model::unique_exists(o)?);
    Ok(out)
}

fn figures(o: &Opts) -> CliResult<Vec<Check>> {
    let dir = o.corpus().join("golden");
    let results = run_golden_dir(&dir, o.fuel).map_err(|e| UsageError(format!("{}: {e}", dir.display())))?;
    Ok(results
        .into_iter()
        .map(|r| {
            let kind = if r.accepting { "accepts" } else { "rejects" };
            Check::new(
                r.file.clone(),
                format!("{} rule, {kind}", r.rule),
                Verdict::of(r.passed),
                r.detail.clone(),
                serde_json::to_value(&r).expect("golden results serialise"),
            )
        })
        .collect())
}

pub fn drop_check(th: &Theory) -> Check {
    let drops: Vec<String> = th.drop_equations().iter().map(|(l, r)| format!("{l} = {r}")).collect();
    Check::new(
        format!("drop {}", th.name),
        "equations with different variables on each side",
        Verdict::Pass,
        format!("drop={} ({} of {} equations)", !drops.is_empty(), drops.len(), th.equations.len()),
        json!({ "drop": !drops.is_empty(), "equations": drops }),
    )
}

pub fn preservation(
    t: &FreeMonad,
    what: &str,
    size: usize,
    check: fn(&FreeMonad, usize) -> Result<PreservationReport, TheoryError>,
) -> Check {
    let name = format!("{what} {}", t.name());
    let anchor = if what == "monos" { "free models preserve injections" } else { "free models preserve pullbacks of injections" };
    match check(t, size) {
        Ok(r) => {
            let summary = match &r.first {
                None => format!("{} instances with sets of size ≤ {size}", r.checked),
                Some(sq) => format!(
                    "{} of {} instances fail; first X={} Y={} f={:?} Z={:?} P={:?}: {}",
                    r.failures, r.checked, sq.x, sq.y, sq.f, sq.z, sq.p, sq.detail
                ),
            };
            Check::new(name, anchor, Verdict::of(r.ok()), summary, serde_json::to_value(&r).expect("reports serialise"))
        }
        Err(e) => Check::new(name, anchor, theory_verdict(&e), e.to_string(), json!({ "bound": size })),
    }
}

fn theories(o: &Opts) -> Vec<Check> {
    let mut out = Vec::new();
    for b in ALL {
        let th = Theory::builtin(b);
        out.push(drop_check(&th));
        let t = FreeMonad::builtin(b, theory_budget());
        out.push(preservation(&t, "monos", o.size, check_preserves_monos));
        out.push(preservation(&t, "pullbacks", o.size, check_preserves_pullbacks_of_monos));
    }
    out
}

pub fn terminal_check(f: &FunctorExpr, steps: usize, budget: &Budget) -> Check {
    let seq = terminal_sequence(f, steps, budget, false);
    let verdict = if seq.stopped.is_some() { Verdict::Unknown } else { Verdict::Pass };
    let mut summary = format!("sizes {:?}", seq.sizes());
    match (seq.converged_at, &seq.stopped) {
        (Some(k), _) => summary.push_str(&format!("; converged at step {k}")),
        (None, Some(why)) => summary.push_str(&format!("; stopped: {why}")),
        (None, None) => summary.push_str("; not converged"),
    }
    Check::new(
        format!("terminal {f}"),
        "terminal sequence",
        verdict,
        summary,
        json!({ "steps": steps, "table": seq.table(), "converged_at": seq.converged_at, "stopped": seq.stopped }),
    )
}

fn coalgebra(o: &Opts) -> CliResult<Vec<Check>> {
    let budget = Budget::default();
    let mut out = Vec::new();
    let pf = FunctorExpr::parse("pf(id)").map_err(usage)?;
    out.push(terminal_check(&pf, o.bound.min(4), &budget));
    let constant = FunctorExpr::parse("const{a, b}").map_err(usage)?;
    let seq = terminal_sequence(&constant, o.bound, &budget, true);
    out.push(Check::new(
        "constant converges",
        "terminal sequence",
        Verdict::of(seq.converged_at == Some(1)),
        format!("converged at {:?}", seq.converged_at),
        json!({ "sizes": seq.sizes() }),
    ));
    for src in ["sum(1, id)", "prod(2, id)"] {
        let f = FunctorExpr::parse(src).map_err(usage)?;
        let check = match check_stage_law(&f, o.bound, &budget) {
            Ok(r) => Check::new(
                format!("stage law {src}"),
                "guarded fixpoint stages against the terminal sequence",
                Verdict::of(r.holds()),
                format!("fiber sizes {:?}", r.rows.iter().map(|row| row.model_size).collect::<Vec<_>>()),
                serde_json::to_value(&r).expect("reports serialise"),
            ),
            Err(e) => Check::new(format!("stage law {src}"), "guarded fixpoint stages", Verdict::Unknown, e.to_string(), json!({})),
        };
        out.push(check);
    }
    let dir = o.corpus().join("coalgebras");
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .map_err(|e| UsageError(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "coalg"))
        .collect();
    files.sort();
    for path in files {
        let src = std::fs::read_to_string(&path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        let c = Coalgebra::parse(&src).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        let blocks = bisimilarity(&c);
        let name = path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
        out.push(Check::new(
            format!("bisim {name}"),
            "bisimilarity by partition refinement",
            Verdict::Pass,
            format!("{} states, {} classes", c.states, blocks.len()),
            json!({ "classes": blocks }),
        ));
    }
    let a = Value::atom("a");
    let eq = |x: &Value, y: &Value| x == y;
    let related: Vec<bool> = (0..o.bound)
        .map(|k| weak_bisim_delay(&Delay::now(a.clone()), &Delay::steps(k, a.clone()), o.bound, &eq, std::slice::from_ref(&a)).related)
        .collect();
    out.push(Check::new(
        "now a ~ step^k now a",
        "weak bisimilarity ignores finitely many steps",
        Verdict::of(related.iter().all(|b| *b)),
        format!("k = 0..{}", o.bound.saturating_sub(1)),
        json!({ "related": related }),
    ));
    Ok(out)
}
