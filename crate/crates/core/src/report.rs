//! Check reports, printed for people and written as JSON.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value as Json;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    /// Fails only because stages are cut off at the bound.
    TruncationArtifact,
    Unknown,
    Fail,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::TruncationArtifact => "truncation_artifact",
            Verdict::Unknown => "unknown",
            Verdict::Fail => "fail",
        }
    }

    pub fn of(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// The property the check exercises.
    pub anchor: String,
    pub verdict: Verdict,
    /// One line for the terminal.
    pub summary: String,
    pub evidence: Json,
}

impl Check {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, verdict: Verdict, summary: impl Into<String>, evidence: Json) -> Check {
        Check { name: name.into(), anchor: anchor.into(), verdict, summary: summary.into(), evidence }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Params {
    pub pool: usize,
    pub bound: usize,
    pub fuel: usize,
    pub size: usize,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub params: Params,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: impl Into<String>, params: Params) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            params,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// 1 if anything failed, else 3 if anything is unknown, else 0.
    pub fn exit_code(&self) -> i32 {
        match self.checks.iter().map(|c| c.verdict).max() {
            Some(Verdict::Fail) => 1,
            Some(Verdict::Unknown) => 3,
            _ => 0,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialise");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let _ = writeln!(out, "{:<19} {:<width$}  {}", c.verdict.label(), c.name, c.summary);
        }
        let count = |v: Verdict| self.checks.iter().filter(|c| c.verdict == v).count();
        let _ = writeln!(
            out,
            "{} checks: {} pass, {} fail, {} unknown, {} truncation artifact",
            self.checks.len(),
            count(Verdict::Pass),
            count(Verdict::Fail),
            count(Verdict::Unknown),
            count(Verdict::TruncationArtifact)
        );
        out
    }
}
