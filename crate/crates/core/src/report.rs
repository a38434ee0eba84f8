//! Deterministic CSV and JSON output.
//!
//! Floats are written with 9 significant digits in the style of C's `%.9g`,
//! so identical inputs give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::dp::PolicyTables;
use crate::error::{Error, Result};
use crate::sim::{SimOutcome, SummaryRow};

const SIG_DIGITS: usize = 9;

/// `%.9g`-style rendering.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIG_DIGITS as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

pub const THRESHOLD_HEADER: &str = "n,N,gap,threshold_avg,threshold_good,threshold_bad,ev";
pub const OUTCOME_HEADER: &str = "policy,N0,replication,total_utility,battery_lifetime,attempts,successes";
pub const SUMMARY_HEADER: &str = "policy,N0,mean_utility,ci95_utility,mean_lifetime,ci95_lifetime";

/// One cell `0 ≤ N ≤ n ≤ n_max` of the tables. Thresholds are absent where
/// no decision is taken (`N = 0` or `n = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRow {
    pub remaining: usize,
    pub battery: usize,
    pub gap: f64,
    pub threshold_avg: Option<f64>,
    pub threshold_good: Option<f64>,
    pub threshold_bad: Option<f64>,
    pub ev: f64,
}

pub fn threshold_rows(tables: &PolicyTables) -> Result<Vec<ThresholdRow>> {
    let ch = &tables.config().channel;
    let mut rows = Vec::new();
    for n in 0..=tables.n_max() {
        for battery in 0..=n {
            let decides = battery >= 1 && n >= 1;
            let at = |p_s: f64| -> Result<Option<f64>> {
                if decides {
                    tables.threshold_for(battery, n, p_s).map(Some)
                } else {
                    Ok(None)
                }
            };
            rows.push(ThresholdRow {
                remaining: n,
                battery,
                gap: tables.gap(battery, n)?,
                threshold_avg: at(tables.expected_success())?,
                threshold_good: at(ch.alpha1())?,
                threshold_bad: at(ch.alpha0())?,
                ev: tables.ev(battery, n)?,
            });
        }
    }
    Ok(rows)
}

pub fn threshold_csv(rows: &[ThresholdRow]) -> String {
    let mut out = String::from(THRESHOLD_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.remaining,
            r.battery,
            fmt_sig(r.gap),
            opt(r.threshold_avg),
            opt(r.threshold_good),
            opt(r.threshold_bad),
            fmt_sig(r.ev)
        );
    }
    out
}

pub fn outcome_csv(outcomes: &[SimOutcome]) -> String {
    let mut sorted: Vec<&SimOutcome> = outcomes.iter().collect();
    sorted.sort_by_key(|o| (o.policy_index, o.initial_battery, o.replication));
    let mut out = String::from(OUTCOME_HEADER);
    out.push('\n');
    for o in sorted {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            o.policy,
            o.initial_battery,
            o.replication,
            fmt_sig(o.total_utility),
            o.battery_lifetime,
            o.attempts,
            o.successes
        );
    }
    out
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.policy,
            r.initial_battery,
            fmt_sig(r.mean_utility),
            fmt_sig(r.ci95_utility),
            fmt_sig(r.mean_lifetime),
            fmt_sig(r.ci95_lifetime)
        );
    }
    out
}

pub fn emit_csv(contents: &str, path: &Path) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn emit_json<T: Serialize + ?Sized>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::invalid("json", e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
