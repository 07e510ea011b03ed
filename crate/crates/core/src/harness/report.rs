//! Success-rate tables.
//!
//! The machine-readable form is tab separated with the header
//! `method  task  environment  mean  std  seeds  episodes`, rates in percent
//! with two decimals. The text form aligns the same numbers in columns:
//!
//! ```text
//! method     task             environment  success (%)
//! PPO        build-character  sync         91.40 ± 2.15
//! ```

use super::config::Method;
use crate::error::{Error, Result};
use crate::eval::EnvKind;
use std::cmp::Ordering;

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub method: String,
    pub task: String,
    pub env: EnvKind,
    /// Mean success rate over seeds, percent.
    pub mean: f64,
    /// Population standard deviation over seeds, percent.
    pub std: f64,
    pub seeds: usize,
    /// Episodes per seed.
    pub episodes: usize,
}

impl ResultRow {
    /// Aggregates per-seed success fractions.
    pub fn from_rates(method: &str, task: &str, env: EnvKind, rates: &[f64], episodes: usize) -> Self {
        let n = rates.len().max(1) as f64;
        let mean = rates.iter().sum::<f64>() / n;
        let var = rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
        ResultRow {
            method: method.to_string(),
            task: task.to_string(),
            env,
            mean: 100.0 * mean,
            std: 100.0 * var.sqrt(),
            seeds: rates.len(),
            episodes,
        }
    }
}

pub const TSV_HEADER: &str = "method\ttask\tenvironment\tmean\tstd\tseeds\tepisodes";

fn method_rank(label: &str) -> (usize, bool, String) {
    let (base, unguided) = match label.strip_suffix(" (no guidance)") {
        Some(b) => (b, true),
        None => (label, false),
    };
    let rank = Method::ALL.iter().position(|m| m.label() == base).unwrap_or(Method::ALL.len());
    (rank, unguided, label.to_string())
}

fn task_rank(task: &str) -> (usize, String) {
    let rank = if task.starts_with("build-character") {
        0
    } else if task.starts_with("two-floor") {
        1
    } else {
        2
    };
    (rank, task.to_string())
}

fn canonical(a: &ResultRow, b: &ResultRow) -> Ordering {
    method_rank(&a.method)
        .cmp(&method_rank(&b.method))
        .then_with(|| task_rank(&a.task).cmp(&task_rank(&b.task)))
        .then_with(|| a.env.cmp(&b.env))
        .then_with(|| a.mean.total_cmp(&b.mean))
        .then_with(|| a.std.total_cmp(&b.std))
        .then_with(|| (a.seeds, a.episodes).cmp(&(b.seeds, b.episodes)))
}

/// Rows in report order: method, then task, then sync before async.
/// Remaining ties fall back to the numbers, so input order never matters.
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(canonical);
}

pub fn to_tsv(rows: &[ResultRow]) -> String {
    let mut out = format!("{TSV_HEADER}\n");
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{:.2}\t{:.2}\t{}\t{}\n",
            r.method, r.task, r.env, r.mean, r.std, r.seeds, r.episodes
        ));
    }
    out
}

pub fn parse_tsv(text: &str) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line != TSV_HEADER {
                return Err(Error::Parse { line: 1, msg: "not a result table".into() });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| Error::Parse { line: i + 1, msg: msg.to_string() };
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 7 {
            return Err(bad("expected 7 fields"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
        let int = |s: &str| s.parse::<usize>().map_err(|_| bad("bad count"));
        rows.push(ResultRow {
            method: f[0].to_string(),
            task: f[1].to_string(),
            env: f[2].parse().map_err(|_| bad("bad environment"))?,
            mean: num(f[3])?,
            std: num(f[4])?,
            seeds: int(f[5])?,
            episodes: int(f[6])?,
        });
    }
    Ok(rows)
}

pub fn to_text(rows: &[ResultRow]) -> String {
    let header = ["method", "task", "environment", "success (%)"];
    let cells: Vec<[String; 4]> = rows
        .iter()
        .map(|r| [r.method.clone(), r.task.clone(), r.env.to_string(), format!("{:.2} ± {:.2}", r.mean, r.std)])
        .collect();
    let mut width = header.map(|h| h.chars().count());
    for c in &cells {
        for (w, s) in width.iter_mut().zip(c) {
            *w = (*w).max(s.chars().count());
        }
    }
    let line = |c: [&str; 4]| {
        let mut s = String::new();
        for (k, (cell, w)) in c.iter().zip(width).enumerate() {
            if k == 3 {
                s.push_str(cell);
            } else {
                s.push_str(cell);
                s.push_str(&" ".repeat(w - cell.chars().count() + 2));
            }
        }
        s.push('\n');
        s
    };
    let mut out = line(header);
    for c in &cells {
        out.push_str(&line([&c[0], &c[1], &c[2], &c[3]]));
    }
    out
}

/// Sorted text and tab-separated renderings of `rows`.
pub fn make_report(rows: &[ResultRow]) -> Result<(String, String)> {
    if rows.is_empty() {
        return Err(Error::usage("no result rows to report"));
    }
    let mut sorted = rows.to_vec();
    sort_rows(&mut sorted);
    Ok((to_text(&sorted), to_tsv(&sorted)))
}
