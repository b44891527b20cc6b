use std::fmt::Write as _;

use serde::Serialize;

use pasflab_core::frames::FrameReport;
use pasflab_core::io::FrameFile;
use pasflab_core::search::{HypothesisViolation, SearchOutcome};
use pasflab_core::verify::{SuiteResult, SuiteStatus};

use crate::manifest::RunManifest;

#[derive(Debug, Serialize)]
pub struct Report {
    pub manifest: RunManifest,
    pub results: Vec<ResultEntry>,
    /// The frame under test, embedded when a failure must be replayable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replay_frame: Option<FrameFile>,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum ResultEntry {
    Suite(SuiteResult),
    Frame(Named<FrameReport>),
    Search(Named<SearchRecord>),
}

#[derive(Debug, Serialize)]
pub struct Named<T> {
    pub suite: &'static str,
    #[serde(flatten)]
    pub body: T,
}

#[derive(Debug, Serialize)]
pub struct SearchRecord {
    /// Always "empirical_minimum": the search is not a certificate.
    pub label: &'static str,
    pub restricted: bool,
    #[serde(flatten)]
    pub outcome: SearchOutcome,
    /// Only searched when p != 2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypothesis_violation: Option<Option<HypothesisViolation>>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_human(&self) -> String {
        let m = &self.manifest;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "pasflab {} {} seed={}",
            m.version,
            m.command.name(),
            m.seed
        );
        for r in &self.results {
            match r {
                ResultEntry::Suite(_) => {}
                ResultEntry::Frame(f) => out.push_str(&frame_table(&f.body)),
                ResultEntry::Search(s) => out.push_str(&search_table(s)),
            }
        }
        let suites: Vec<&SuiteResult> = self
            .results
            .iter()
            .filter_map(|r| match r {
                ResultEntry::Suite(s) => Some(s),
                _ => None,
            })
            .collect();
        if !suites.is_empty() {
            out.push_str(&suite_table(&suites));
        }
        out
    }
}

fn num(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.6e}"))
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<String>, out: &mut String| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&width)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(header.iter().map(|h| h.to_string()).collect(), &mut out);
    line(width.iter().map(|&w| "-".repeat(w)).collect(), &mut out);
    for row in rows {
        line(row.clone(), &mut out);
    }
    out
}

fn kv_table(rows: Vec<(&str, String)>) -> String {
    let rows: Vec<Vec<String>> = rows
        .into_iter()
        .map(|(k, v)| vec![k.to_string(), v])
        .collect();
    table(&["quantity", "value"], &rows)
}

fn suite_table(suites: &[&SuiteResult]) -> String {
    let rows: Vec<Vec<String>> = suites
        .iter()
        .map(|s| {
            let status = match s.status {
                SuiteStatus::Pass => "pass",
                SuiteStatus::Fail => "FAIL",
                SuiteStatus::Skipped => "skipped",
            };
            vec![
                s.suite.clone(),
                status.to_string(),
                num(s.max_residual),
                num(s.min_ratio),
                s.cases_run.to_string(),
                s.failure_count.to_string(),
            ]
        })
        .collect();
    table(
        &["suite", "status", "max_residual", "min_ratio", "cases", "failures"],
        &rows,
    )
}

fn frame_table(f: &FrameReport) -> String {
    kv_table(vec![
        ("p", f.p.to_string()),
        ("dim", f.dim.to_string()),
        ("N", f.n.to_string()),
        ("c_estimate", num(Some(f.c_estimate))),
        ("d_estimate", num(Some(f.d_estimate))),
        ("a_estimate", num(f.a_estimate)),
        ("b_estimate", num(f.b_estimate)),
        ("condition_s", num(f.condition_s)),
        ("parseval_residual", num(Some(f.parseval_residual))),
        ("certified", f.certified.to_string()),
    ])
}

fn search_table(s: &Named<SearchRecord>) -> String {
    let o = &s.body.outcome;
    let mut rows = vec![
        ("label", s.body.label.to_string()),
        ("best_ratio", num(Some(o.best_ratio))),
        ("best_m", o.best_m.bitstring()),
        ("hypothesis_value", num(Some(o.hypothesis_value_at_best))),
        ("subsets_searched", o.subsets_searched.to_string()),
        ("restarts_run", o.restarts_run.to_string()),
        ("restricted", s.body.restricted.to_string()),
    ];
    if let Some(v) = &s.body.hypothesis_violation {
        let text = match v {
            Some(v) => format!("h = {:.6e} at M = {}", v.h_value, v.m.bitstring()),
            None => "none found".to_string(),
        };
        rows.push(("hypothesis_violation", text));
    }
    kv_table(rows)
}
