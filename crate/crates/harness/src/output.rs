//! Sweep rows, the CSV table and the fixed-width report.

use std::fmt::Write as _;

use fsmcmc::diagnostics::GapReport;
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: &str = "m,delta,a,method,value,is_upper_bound,ci_lo,ci_hi,n_samples,seed";

/// Written in place of NaN.
pub const DEGENERATE: &str = "degenerate";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub m: usize,
    pub delta: f64,
    pub a: f64,
    pub method: String,
    pub value: f64,
    pub is_upper_bound: bool,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub n_samples: usize,
    pub seed: u64,
}

impl SweepRow {
    pub fn estimate(m: usize, delta: f64, a: f64, method: &str, value: f64, n_samples: usize, seed: u64) -> Self {
        Self {
            m,
            delta,
            a,
            method: method.to_string(),
            value,
            is_upper_bound: false,
            ci_lo: None,
            ci_hi: None,
            n_samples,
            seed,
        }
    }

    pub fn with_ci(mut self, lo: f64, hi: f64) -> Self {
        self.ci_lo = Some(lo);
        self.ci_hi = Some(hi);
        self
    }

    pub fn upper_bound(mut self) -> Self {
        self.is_upper_bound = true;
        self
    }

    pub fn from_gap(rep: &GapReport, a: f64, seed: u64) -> Self {
        Self {
            m: rep.m,
            delta: rep.delta,
            a,
            method: rep.method.to_string(),
            value: rep.value,
            is_upper_bound: rep.is_upper_bound,
            ci_lo: rep.ci.map(|c| c.0),
            ci_hi: rep.ci.map(|c| c.1),
            n_samples: rep.n_samples,
            seed,
        }
    }
}

fn num(v: f64) -> String {
    if v.is_nan() {
        DEGENERATE.to_string()
    } else {
        format!("{v}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.m,
            num(r.delta),
            num(r.a),
            r.method,
            num(r.value),
            r.is_upper_bound,
            opt(r.ci_lo),
            opt(r.ci_hi),
            r.n_samples,
            r.seed
        )
        .expect("writing to a String");
    }
    out
}

fn parse_num(s: &str, line: usize) -> Result<f64, String> {
    if s == DEGENERATE {
        return Ok(f64::NAN);
    }
    s.parse().map_err(|e| format!("line {line}: {s:?}: {e}"))
}

fn parse_opt(s: &str, line: usize) -> Result<Option<f64>, String> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_num(s, line).map(Some)
    }
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        Some(h) => return Err(format!("unexpected header {h:?}")),
        None => return Err("empty file".into()),
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let line = i + 2;
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 10 {
                return Err(format!("line {line}: {} fields, expected 10", f.len()));
            }
            let int = |s: &str| s.parse::<u64>().map_err(|e| format!("line {line}: {s:?}: {e}"));
            Ok(SweepRow {
                m: int(f[0])? as usize,
                delta: parse_num(f[1], line)?,
                a: parse_num(f[2], line)?,
                method: f[3].to_string(),
                value: parse_num(f[4], line)?,
                is_upper_bound: f[5].parse().map_err(|e| format!("line {line}: {e}"))?,
                ci_lo: parse_opt(f[6], line)?,
                ci_hi: parse_opt(f[7], line)?,
                n_samples: int(f[8])? as usize,
                seed: int(f[9])?,
            })
        })
        .collect()
}

fn cell(v: f64) -> String {
    if v.is_nan() {
        DEGENERATE.to_string()
    } else {
        format!("{v:.6e}")
    }
}

/// Fixed-width table, one line per `(m, method)` in input order.
pub fn render_table(rows: &[SweepRow]) -> String {
    let method_w = rows.iter().map(|r| r.method.len()).max().unwrap_or(6).max(6);
    let mut out = String::new();
    writeln!(
        out,
        "{:>6}  {:>10}  {:<method_w$}  {:>13}  {:>5}  {:>13}  {:>13}  {:>9}",
        "m", "delta", "method", "value", "bound", "ci_lo", "ci_hi", "n"
    )
    .expect("writing to a String");
    writeln!(out, "{}", "-".repeat(6 + 10 + method_w + 13 + 5 + 13 + 13 + 9 + 14)).expect("writing to a String");
    for r in rows {
        writeln!(
            out,
            "{:>6}  {:>10.4e}  {:<method_w$}  {:>13}  {:>5}  {:>13}  {:>13}  {:>9}",
            r.m,
            r.delta,
            r.method,
            cell(r.value),
            if r.is_upper_bound { "yes" } else { "no" },
            r.ci_lo.map(cell).unwrap_or_default(),
            r.ci_hi.map(cell).unwrap_or_default(),
            r.n_samples
        )
        .expect("writing to a String");
    }
    out
}
