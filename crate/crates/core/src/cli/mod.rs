//! The `clott` command line.

mod model;
mod suites;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::coalgebra::bisim::bisimilarity;
use crate::coalgebra::functor::atom_value;
use crate::coalgebra::weak::weak_bisim_delay;
use crate::coalgebra::{terminal_sequence, Coalgebra, FunctorExpr};
use crate::kernel::{check_source, ItemOutcome};
use crate::model::delay::Delay;
use crate::model::{Evaluator, TypeExprM};
use crate::model::checks::check_invariance;
use crate::report::{Check, Params, Report, Verdict};
use crate::theories::checks::{check_preserves_monos, check_preserves_pullbacks_of_monos};
use crate::theories::{Budget, FreeMonad, Theory, TheoryError};
use crate::value::Value;

#[derive(Parser, Debug)]
#[command(name = "clott", version, about = "Clocked type theory checker, presheaf model and coalgebra tools")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Fixed point unfoldings allowed per conversion query.
    #[arg(long, global = true, default_value_t = crate::kernel::DEFAULT_FUEL)]
    fuel: usize,
    /// Number of clock names in the model.
    #[arg(long, global = true, default_value_t = 2)]
    pool: usize,
    /// Stages per clock in the model, and steps for sequences.
    #[arg(long, global = true, default_value_t = 4)]
    bound: usize,
    /// Largest set size for theory and finality checks.
    #[arg(long, global = true, default_value_t = 3)]
    size: usize,
    /// Term depth for custom theories.
    #[arg(long, global = true, default_value_t = 3)]
    depth: usize,
    /// Also write the report as JSON to this file.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Directory holding the golden, theory and coalgebra corpora.
    #[arg(long, global = true, value_name = "DIR")]
    corpus: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Type check a .clott file.
    Check { file: PathBuf },
    /// Evaluate a model type and check it.
    Eval {
        expr: String,
        /// Free clocks of the expression.
        #[arg(long, default_value_t = 0)]
        clocks: usize,
    },
    /// Model checks.
    Model {
        #[command(subcommand)]
        command: ModelCommand,
    },
    /// Algebraic theories from .thy files.
    Theory {
        #[command(subcommand)]
        command: TheoryCommand,
    },
    /// Terminal sequences and bisimilarity.
    Coalg {
        #[command(subcommand)]
        command: CoalgCommand,
    },
    /// A curated battery: requirements, figures, theories or coalgebra.
    Suite { name: String },
}

#[derive(Subcommand, Debug)]
enum ModelCommand {
    /// One of: invariance, clk, clock-irrelevance, forall-sum, forall-prod,
    /// forall-theory, force, example4, bounded-exists, unique-exists, all.
    Verify {
        name: String,
        /// Model type to use instead of the built-in list.
        #[arg(long = "type", value_name = "EXPR")]
        ty: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum TheoryCommand {
    /// Equations whose sides have different variables.
    Drop { file: PathBuf },
    /// Free model sizes on up to --size generators.
    Free { file: PathBuf },
    /// Injections are sent to injections.
    Monos { file: PathBuf },
    /// Pullbacks along injections are preserved.
    Pullbacks { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum CoalgCommand {
    /// Stages 1, F(1), F²(1), ... up to --bound.
    Terminal { functor: String },
    /// The converged stage as a coalgebra, checked against small coalgebras.
    Final { functor: String },
    /// Bisimilarity classes of a coalgebra file.
    Bisim { file: PathBuf },
    /// Weak bisimilarity of two delays, e.g. `now a` and `step^2 now a`.
    Weakbisim { x: String, y: String },
}

/// A usage or input error: exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

type CliResult<T> = Result<T, UsageError>;

fn usage(e: impl std::fmt::Display) -> UsageError {
    UsageError(e.to_string())
}

impl Opts {
    fn params(&self) -> Params {
        Params { pool: self.pool, bound: self.bound, fuel: self.fuel, size: self.size, depth: self.depth }
    }

    fn evaluator(&self) -> Evaluator {
        Evaluator::new(self.pool, self.bound)
    }

    fn corpus(&self) -> PathBuf {
        if let Some(dir) = &self.corpus {
            return dir.clone();
        }
        let here = PathBuf::from("corpus");
        if here.is_dir() {
            here
        } else {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "theory".into(), |s| s.to_string_lossy().into_owned())
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(report) => {
            print!("{}", report.to_text());
            if let Some(path) = &cli.opts.json {
                if let Err(e) = std::fs::write(path, report.to_json()) {
                    eprintln!("error: {}: {e}", path.display());
                    return 2;
                }
            }
            report.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<Report> {
    let o = &cli.opts;
    match &cli.command {
        Command::Check { file } => check_file(o, file),
        Command::Eval { expr, clocks } => eval(o, expr, *clocks),
        Command::Model { command: ModelCommand::Verify { name, ty } } => model::verify(o, name, ty.as_deref()),
        Command::Theory { command } => theory(o, command),
        Command::Coalg { command } => coalg(o, command),
        Command::Suite { name } => suites::suite(o, name),
    }
}

fn check_file(o: &Opts, file: &Path) -> CliResult<Report> {
    let src = read(file)?;
    let rep = check_source(&src, o.fuel).map_err(|e| UsageError(format!("{}:{e}", file.display())))?;
    let mut report = Report::new(format!("check {}", file.display()), o.params());
    for item in &rep.items {
        let (verdict, note) = match &item.outcome {
            ItemOutcome::Ok => (Verdict::Pass, String::new()),
            ItemOutcome::NotEqual => (Verdict::Fail, ": the sides are apart".to_string()),
            ItemOutcome::TypeError { rule, message } => (Verdict::Fail, format!(": [{rule}] {message}")),
            ItemOutcome::Unknown { message } => (Verdict::Unknown, format!(": {message}")),
        };
        report.push(Check::new(
            format!("line {} {}", item.line, item.kind),
            "typing rules",
            verdict,
            format!("{}{note}", item.subject),
            serde_json::to_value(item).expect("item reports serialise"),
        ));
    }
    Ok(report)
}

fn eval(o: &Opts, expr: &str, clocks: usize) -> CliResult<Report> {
    let e = TypeExprM::parse(expr).map_err(usage)?;
    let x = o.evaluator().eval_type(&e, clocks).map_err(usage)?;
    let mut report = Report::new(format!("eval {expr}"), o.params());
    let sizes: Vec<_> = x.site.objs.iter().zip(x.sizes()).map(|(obj, n)| json!([obj.to_string(), n])).collect();
    let functorial = x.check_functorial();
    report.push(Check::new(
        "functorial",
        "presheaf laws",
        Verdict::of(functorial.is_ok()),
        format!("{} objects, {} morphisms", x.site.objs.len(), x.site.mors.len()),
        json!({ "fibers": sizes, "failure": functorial.err().map(|f| format!("{f:?}")) }),
    ));
    let inv = check_invariance(&x);
    report.push(Check::new(
        "invariance",
        "invariance under clock introduction",
        Verdict::of(inv.is_ok()),
        inv.as_ref().map_or_else(|c| format!("{}: {}", c.object, c.detail), |_| "every inclusion acts bijectively".into()),
        json!({ "counterexample": inv.err() }),
    ));
    Ok(report)
}

fn load_theory(file: &Path) -> CliResult<Theory> {
    Theory::parse(&stem(file), &read(file)?).map_err(|e| UsageError(format!("{}: {e}", file.display())))
}

fn free_monad(o: &Opts, th: Theory) -> FreeMonad {
    match th.builtin {
        Some(b) => FreeMonad::builtin(b, theory_budget()),
        None => FreeMonad::new(th, theory_budget(), o.depth),
    }
}

/// Convex weights up to thirds keep the pullback enumeration small.
fn theory_budget() -> Budget {
    Budget { denom: 3, ..Budget::default() }
}

fn theory_verdict(e: &TheoryError) -> Verdict {
    match e {
        TheoryError::NotSaturated { .. } | TheoryError::BudgetExceeded { .. } => Verdict::Unknown,
        _ => Verdict::Fail,
    }
}

fn theory(o: &Opts, command: &TheoryCommand) -> CliResult<Report> {
    let (verb, file) = match command {
        TheoryCommand::Drop { file } => ("drop", file),
        TheoryCommand::Free { file } => ("free", file),
        TheoryCommand::Monos { file } => ("monos", file),
        TheoryCommand::Pullbacks { file } => ("pullbacks", file),
    };
    let th = load_theory(file)?;
    let mut report = Report::new(format!("theory {verb} {}", file.display()), o.params());
    let name = th.name.clone();
    match command {
        TheoryCommand::Drop { .. } => report.push(suites::drop_check(&th)),
        TheoryCommand::Free { .. } => {
            let t = free_monad(o, th);
            let mut sizes = Vec::new();
            let mut failure = None;
            for n in 0..=o.size {
                match t.carrier(&Value::ints(n)) {
                    Ok(c) => sizes.push(c.len()),
                    Err(e) => {
                        failure = Some(e);
                        break;
                    }
                }
            }
            let summary = format!("|T(X)| = {sizes:?} for |X| = 0..{}", sizes.len().saturating_sub(1));
            let (verdict, summary) = match &failure {
                None => (Verdict::Pass, summary),
                Some(e) => (theory_verdict(e), format!("{summary}; then {e}")),
            };
            report.push(Check::new(format!("free {name}"), "free models", verdict, summary, json!({ "sizes": sizes, "depth": o.depth })));
        }
        TheoryCommand::Monos { .. } => report.push(suites::preservation(&free_monad(o, th), "monos", o.size, check_preserves_monos)),
        TheoryCommand::Pullbacks { .. } => {
            report.push(suites::preservation(&free_monad(o, th), "pullbacks", o.size, check_preserves_pullbacks_of_monos))
        }
    }
    Ok(report)
}

/// `now V`, `step D`, `step^K D` or `never`; parentheses are optional.
fn parse_delay(src: &str) -> CliResult<Delay> {
    let s = src.trim();
    let s = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(s).trim();
    if s == "never" {
        return Ok(Delay::Never);
    }
    if let Some(rest) = s.strip_prefix("now") {
        let v = rest.trim().trim_start_matches('(').trim_end_matches(')').trim();
        if v.is_empty() {
            return Err(UsageError(format!("`{src}`: now needs a value")));
        }
        return Ok(Delay::now(atom_value(v)));
    }
    if let Some(rest) = s.strip_prefix("step") {
        let (k, rest) = match rest.strip_prefix('^') {
            Some(r) => {
                let digits: String = r.chars().take_while(char::is_ascii_digit).collect();
                let k = digits.parse::<usize>().map_err(|_| UsageError(format!("`{src}`: expected a step count after ^")))?;
                (k, &r[digits.len()..])
            }
            None => (1, rest),
        };
        let mut d = parse_delay(rest)?;
        for _ in 0..k {
            d = Delay::step(d);
        }
        return Ok(d);
    }
    Err(UsageError(format!("`{src}` is not a delay: use now V, step D, step^K D or never")))
}

fn delay_values(d: &Delay, out: &mut Vec<Value>) {
    match d {
        Delay::Now(v) => out.push(v.clone()),
        Delay::Step(inner) => delay_values(inner, out),
        Delay::Never => {}
    }
}

fn coalg(o: &Opts, command: &CoalgCommand) -> CliResult<Report> {
    let budget = Budget::default();
    match command {
        CoalgCommand::Terminal { functor } => {
            let f = FunctorExpr::parse(functor).map_err(usage)?;
            let mut report = Report::new(format!("coalg terminal {f}"), o.params());
            report.push(suites::terminal_check(&f, o.bound, &budget));
            Ok(report)
        }
        CoalgCommand::Final { functor } => {
            let f = FunctorExpr::parse(functor).map_err(usage)?;
            let mut report = Report::new(format!("coalg final {f}"), o.params());
            let seq = terminal_sequence(&f, o.bound, &budget, true);
            let check = match Coalgebra::final_from(&seq) {
                Err(e) => Check::new("final", "terminal sequence", Verdict::Unknown, e.to_string(), json!({ "sizes": seq.sizes() })),
                Ok(c) => match c.check_finality(o.size, &budget) {
                    Ok(r) => Check::new(
                        "final",
                        "terminal sequence",
                        Verdict::of(r.failure.is_none()),
                        format!("{} states; unique morphisms from {} coalgebras on ≤ {} states", c.states, r.checked, o.size),
                        json!({ "coalgebra": c.to_text(), "finality": r }),
                    ),
                    Err(e) => Check::new("final", "terminal sequence", theory_verdict(&e), e.to_string(), json!({ "coalgebra": c.to_text() })),
                },
            };
            report.push(check);
            Ok(report)
        }
        CoalgCommand::Bisim { file } => {
            let c = Coalgebra::parse(&read(file)?).map_err(|e| UsageError(format!("{}: {e}", file.display())))?;
            let blocks = bisimilarity(&c);
            let mut report = Report::new(format!("coalg bisim {}", file.display()), o.params());
            let shown: Vec<String> =
                blocks.iter().map(|b| format!("{{{}}}", b.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", "))).collect();
            report.push(Check::new(
                "bisimilarity",
                "bisimilarity by partition refinement",
                Verdict::Pass,
                format!("{} states in {} classes: {}", c.states, blocks.len(), shown.join(" ")),
                json!({ "functor": c.functor.to_string(), "classes": blocks }),
            ));
            Ok(report)
        }
        CoalgCommand::Weakbisim { x, y } => {
            let (dx, dy) = (parse_delay(x)?, parse_delay(y)?);
            let mut carrier = Vec::new();
            delay_values(&dx, &mut carrier);
            delay_values(&dy, &mut carrier);
            carrier.sort();
            carrier.dedup();
            if carrier.is_empty() {
                carrier.push(Value::Unit);
            }
            let r = weak_bisim_delay(&dx, &dy, o.bound, &|a: &Value, b: &Value| a == b, &carrier);
            let mut report = Report::new(format!("coalg weakbisim {dx} {dy}"), o.params());
            let stages: String = r.stages.iter().map(|b| if *b { '1' } else { '0' }).collect();
            report.push(Check::new(
                "weak bisimilarity",
                "weak bisimilarity on delays",
                Verdict::of(r.related),
                format!("{dx} ~ {dy} at stages 0..{}: {stages}", o.bound),
                serde_json::to_value(&r).expect("reports serialise"),
            ));
            Ok(report)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delays_parse() {
        assert_eq!(parse_delay("now a").unwrap(), Delay::now(Value::atom("a")));
        assert_eq!(parse_delay("step^2 now(a)").unwrap(), Delay::steps(2, Value::atom("a")));
        assert_eq!(parse_delay("step (step never)").unwrap(), Delay::step(Delay::step(Delay::Never)));
        assert!(parse_delay("later a").is_err());
    }
}
