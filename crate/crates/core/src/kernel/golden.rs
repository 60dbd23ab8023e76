//! Directory-based golden tests for the typing rules.
//!
//! A file `RULE.accept.clott` must check completely. A file
//! `NAME.reject.clott` starts with a `-- rejects: RULE` line; its last item
//! must fail with that rule and every earlier item must check. A `+suffix`
//! on the name distinguishes several files for one rule.

use std::path::Path;

use serde::Serialize;

use super::{check_source, ItemOutcome};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoldenResult {
    pub file: String,
    /// The rule the file exercises, taken from the file name.
    pub rule: String,
    pub accepting: bool,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, thiserror::Error)]
pub enum GoldenError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{file}: {message}")]
    Malformed { file: String, message: String },
}

fn expected_rule(src: &str) -> Option<&str> {
    src.lines().next()?.strip_prefix("-- rejects:").map(str::trim)
}

/// Runs one golden file given its name and contents.
pub fn run_golden(file: &str, src: &str, fuel: usize) -> Result<GoldenResult, GoldenError> {
    let malformed = |message: &str| GoldenError::Malformed { file: file.to_string(), message: message.to_string() };
    let (rule, accepting) = if let Some(r) = file.strip_suffix(".accept.clott") {
        (r, true)
    } else if let Some(r) = file.strip_suffix(".reject.clott") {
        (r, false)
    } else {
        return Err(malformed("expected a .accept.clott or .reject.clott name"));
    };
    let rep = match check_source(src, fuel) {
        Ok(rep) => rep,
        Err(e) => {
            return Ok(GoldenResult { file: file.into(), rule: rule.into(), accepting, passed: false, detail: format!("parse error: {e}") })
        }
    };
    let (passed, detail) = if accepting {
        match rep.items.iter().find(|i| i.outcome != ItemOutcome::Ok) {
            None => (true, format!("{} items check", rep.items.len())),
            Some(i) => (false, format!("line {}: {:?}", i.line, i.outcome)),
        }
    } else {
        let want = expected_rule(src).ok_or_else(|| malformed("missing `-- rejects: RULE` header"))?;
        let (last, earlier) = rep.items.split_last().ok_or_else(|| malformed("no items"))?;
        if let Some(i) = earlier.iter().find(|i| i.outcome != ItemOutcome::Ok) {
            (false, format!("line {} fails early: {:?}", i.line, i.outcome))
        } else {
            match &last.outcome {
                ItemOutcome::TypeError { rule, message } if rule == want => (true, format!("{rule}: {message}")),
                other => (false, format!("expected a `{want}` error, got {other:?}")),
            }
        }
    };
    Ok(GoldenResult { file: file.into(), rule: rule.split('+').next().unwrap_or(rule).into(), accepting, passed, detail })
}

/// Runs every golden file in `dir`, sorted by name.
pub fn run_golden_dir(dir: &Path, fuel: usize) -> Result<Vec<GoldenResult>, GoldenError> {
    let mut names: Vec<String> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".clott"))
        .collect();
    names.sort();
    names.iter().map(|n| run_golden(n, &std::fs::read_to_string(dir.join(n))?, fuel)).collect()
}
