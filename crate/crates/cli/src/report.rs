//! The report written by every command, in json or text form.

use std::fmt::Write as _;

use golodlab::golod::GolodVerdict;
use golodlab::resolution::{BettiTable, TruncatedSeries};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::spec::{ProblemSpec, SCHEMA_VERSION};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub input: ProblemSpec,
    pub betti: Option<BettiTable>,
    pub series: Option<SeriesBlock>,
    pub verdict: Option<GolodVerdict>,
    /// Refutations and certificates, each a tagged json object.
    pub witnesses: Vec<Value>,
    /// Command-specific results.
    pub details: Value,
    pub meta: Meta,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesBlock {
    pub poincare: TruncatedSeries,
    pub kappa_module: Vec<i64>,
    pub kappa_ring: Vec<i64>,
    pub serre_bound: TruncatedSeries,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub h_cap: usize,
    pub d_cap: usize,
    pub field: String,
    pub completeness: Completeness,
    /// Wall-clock time; left out when byte-identical reruns matter.
    pub elapsed_ms: Option<u64>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Completeness {
    /// Last homological degree whose Betti numbers are exact.
    pub complete_through: Option<usize>,
    pub all_complete: bool,
}

impl Completeness {
    pub fn of(p: &TruncatedSeries) -> Self {
        let k = p.complete_prefix();
        Completeness { complete_through: k.checked_sub(1), all_complete: p.all_complete() }
    }

    pub fn unknown() -> Self {
        Completeness { complete_through: None, all_complete: true }
    }
}

impl Report {
    pub fn new(command: &str, input: ProblemSpec, h_cap: usize, d_cap: usize, field: String) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            command: command.into(),
            input,
            betti: None,
            series: None,
            verdict: None,
            witnesses: Vec::new(),
            details: Value::Null,
            meta: Meta {
                h_cap,
                d_cap,
                field,
                completeness: Completeness::unknown(),
                elapsed_ms: None,
                notes: Vec::new(),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

pub fn emit(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => text(report),
    }
}

fn text(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "== {} ({}, H={}, D={})", r.command, r.meta.field, r.meta.h_cap, r.meta.d_cap);
    if let Some(b) = &r.betti {
        let _ = writeln!(out, "Betti numbers (* marks an incomplete column):");
        out.push_str(&b.to_string());
    }
    if let Some(s) = &r.series {
        let _ = writeln!(out, "{}", s.poincare.display("P"));
        let _ = writeln!(out, "κ_M(t) = {}", golodlab::resolution::format_series(&s.kappa_module));
        let _ = writeln!(out, "κ_R(t) = {}", golodlab::resolution::format_series(&s.kappa_ring));
        let _ = writeln!(out, "{}", s.serre_bound.display("bound"));
    }
    if let Some(v) = &r.verdict {
        let _ = writeln!(out, "verdict: {}", v.describe());
    }
    for w in &r.witnesses {
        let _ = writeln!(out, "witness: {}", serde_json::to_string(w).expect("json values serialize"));
    }
    if !r.details.is_null() {
        details(&mut out, &r.details, 0);
    }
    for n in &r.meta.notes {
        let _ = writeln!(out, "note: {n}");
    }
    if let Some(ms) = r.meta.elapsed_ms {
        let _ = writeln!(out, "elapsed: {ms} ms");
    }
    out
}

fn details(out: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if x.is_object() || (x.is_array() && x.as_array().is_some_and(|a| a.iter().any(|e| e.is_object()))) {
                    let _ = writeln!(out, "{pad}{k}:");
                    details(out, x, indent + 1);
                } else {
                    let _ = writeln!(out, "{pad}{k}: {}", scalar(x));
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                if x.is_object() {
                    let _ = writeln!(out, "{pad}-");
                    details(out, x, indent + 1);
                } else {
                    let _ = writeln!(out, "{pad}- {}", scalar(x));
                }
            }
        }
        x => {
            let _ = writeln!(out, "{pad}{}", scalar(x));
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        x => x.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_line_format() {
        let p = TruncatedSeries::exact(vec![1, 2, 4, 8, 16]);
        assert_eq!(p.display("P"), "P(t) = 1 + 2t + 4t^2 + 8t^3 + 16t^4 + … [complete through t^4]");
    }
}
