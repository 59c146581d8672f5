//! Run reports and their two renderings.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

/// Version of the line-delimited structured format.
pub const SCHEMA_VERSION: u32 = 1;

/// How a run ended, before golden checks are taken into account.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// A reproduction run whose checks all matched.
    Reproduced,
    /// An attack that verified the secret.
    Recovered,
    /// An attack that ran to completion without verifying anything.
    NoRecovery,
    /// A reproduction run with at least one failed check.
    Mismatch,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Reproduced | Outcome::Recovered => 0,
            Outcome::NoRecovery => 1,
            Outcome::Mismatch => 3,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Outcome::Reproduced => "reproduced",
            Outcome::Recovered => "recovered",
            Outcome::NoRecovery => "no-recovery",
            Outcome::Mismatch => "mismatch",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub got: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub experiment: String,
    pub params: Vec<(String, String)>,
    pub values: Vec<(String, String)>,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub timing: Vec<(String, String)>,
    pub verdict: String,
    base_outcome: Outcome,
}

impl RunReport {
    pub fn new(experiment: &str) -> Self {
        RunReport {
            experiment: experiment.to_string(),
            params: Vec::new(),
            values: Vec::new(),
            tables: Vec::new(),
            checks: Vec::new(),
            timing: Vec::new(),
            verdict: String::new(),
            base_outcome: Outcome::Reproduced,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.params.push((key.to_string(), value.to_string()));
    }

    pub fn value(&mut self, key: &str, value: impl ToString) {
        self.values.push((key.to_string(), value.to_string()));
    }

    pub fn table(&mut self, table: Table) {
        self.tables.push(table);
    }

    pub fn check(&mut self, name: &str, expected: impl ToString, got: impl ToString, pass: bool) {
        self.checks.push(Check {
            name: name.to_string(),
            expected: expected.to_string(),
            got: got.to_string(),
            pass,
        });
    }

    pub fn timing(&mut self, key: &str, elapsed: std::time::Duration) {
        self.timing.push((
            key.to_string(),
            format!("{:.3}", elapsed.as_secs_f64() * 1e3),
        ));
    }

    pub fn finish(&mut self, verdict: impl ToString, outcome: Outcome) {
        self.verdict = verdict.to_string();
        self.base_outcome = outcome;
    }

    pub fn outcome(&self) -> Outcome {
        if self.checks.iter().any(|c| !c.pass) {
            Outcome::Mismatch
        } else {
            self.base_outcome
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check_named(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn value_of(&self, key: &str) -> Option<&str> {
        self.values
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "experiment: {}", self.experiment);
        let key_width = self
            .params
            .iter()
            .chain(&self.values)
            .chain(&self.timing)
            .map(|(k, _)| k.len())
            .max()
            .unwrap_or(0);
        for (k, v) in &self.params {
            let _ = writeln!(out, "  {k:<key_width$} = {v}");
        }
        if !self.values.is_empty() {
            out.push('\n');
            for (k, v) in &self.values {
                let _ = writeln!(out, "{k:<key_width$} = {v}");
            }
        }
        for t in &self.tables {
            out.push('\n');
            let _ = writeln!(out, "[{}] {} rows", t.name, t.rows.len());
            render_table(&mut out, t);
        }
        if !self.checks.is_empty() {
            out.push('\n');
            for c in &self.checks {
                let mark = if c.pass { "ok  " } else { "FAIL" };
                let _ = writeln!(
                    out,
                    "{mark} {}: expected {}, got {}",
                    c.name, c.expected, c.got
                );
            }
        }
        if !self.timing.is_empty() {
            out.push('\n');
            for (k, v) in &self.timing {
                let _ = writeln!(out, "{k:<key_width$} = {v} ms");
            }
        }
        let _ = writeln!(
            out,
            "\nverdict: {} [{}]",
            self.verdict,
            self.outcome().label()
        );
        out
    }

    /// One JSON object per line. Timing records vary between runs and can be left out.
    pub fn render_structured(&self, with_timing: bool) -> String {
        let mut lines = Vec::new();
        let mut record = |kind: &str, body: Value| {
            let mut obj = Map::new();
            obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
            obj.insert("record".into(), json!(kind));
            if let Value::Object(fields) = body {
                obj.extend(fields);
            }
            lines.push(Value::Object(obj).to_string());
        };
        let pairs = |kv: &[(String, String)]| {
            Value::Object(kv.iter().map(|(k, v)| (k.clone(), json!(v))).collect())
        };
        record(
            "experiment",
            json!({ "name": self.experiment, "params": pairs(&self.params) }),
        );
        for (k, v) in &self.values {
            record("value", json!({ "key": k, "value": v }));
        }
        for t in &self.tables {
            for (i, row) in t.rows.iter().enumerate() {
                let cells: Map<String, Value> = t
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(|c| json!(c)))
                    .collect();
                record(
                    "row",
                    json!({ "table": t.name, "index": i, "cells": cells }),
                );
            }
        }
        for c in &self.checks {
            record(
                "check",
                json!({ "name": c.name, "expected": c.expected, "got": c.got, "pass": c.pass }),
            );
        }
        if with_timing {
            for (k, v) in &self.timing {
                record("timing", json!({ "key": k, "elapsed_ms": v }));
            }
        }
        record(
            "verdict",
            json!({ "verdict": self.verdict, "outcome": self.outcome().label() }),
        );
        lines.join("\n") + "\n"
    }
}

fn render_table(out: &mut String, t: &Table) {
    let mut widths: Vec<usize> = t.columns.iter().map(|c| c.len()).collect();
    for row in &t.rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    let _ = writeln!(out, "{}", line(&t.columns));
    for row in &t.rows {
        let _ = writeln!(out, "{}", line(row));
    }
}
