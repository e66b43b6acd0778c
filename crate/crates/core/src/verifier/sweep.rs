use rayon::prelude::*;
use serde::Serialize;

use super::{run_checks, Check, VerifyConfig};
use crate::canon::{canonical_form, from_canonical_form};
use crate::error::{Error, Result};
use crate::format;
use crate::poset::Poset;
use crate::report::{CheckReport, Severity, Status};

/// Runs `checks` on every poset using `parallelism` worker threads.
///
/// Each poset is first relabelled canonically, so witnesses refer to the
/// labelling recovered by `from_canonical_form` of the reported `poset` hex.
/// Output is sorted by canonical form, then by check order, and is
/// independent of `parallelism`. Posets too large for a canonical form keep
/// their labels and are keyed by their text form.
pub fn sweep(posets: &[Poset], checks: &[Check], parallelism: usize, config: &VerifyConfig) -> Result<Vec<CheckReport>> {
    if checks.is_empty() {
        return Ok(Vec::new());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    let mut keyed: Vec<(Vec<u8>, Vec<CheckReport>)> = pool.install(|| {
        posets
            .par_iter()
            .map(|p| {
                let (key, id, q) = match canonical_form(p).and_then(|f| Ok((from_canonical_form(&f)?, f))) {
                    Ok((q, f)) => (f.clone(), hex::encode(&f), q),
                    Err(_) => {
                        let text = format::to_text(p).into_bytes();
                        let mut key = vec![u8::MAX];
                        key.extend(&text);
                        (key, format!("text:{}", hex::encode(&text)), p.clone())
                    }
                };
                let mut reports = run_checks(&q, checks, config);
                for r in &mut reports {
                    r.poset = Some(id.clone());
                }
                (key, reports)
            })
            .collect()
    });
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(keyed.into_iter().flat_map(|(_, r)| r).collect())
}

pub fn to_json_lines(reports: &[CheckReport]) -> String {
    let mut s = String::new();
    for r in reports {
        s.push_str(&serde_json::to_string(r).expect("report JSON"));
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub check: String,
    pub severity: Severity,
    /// Posets on which the check was decided (pass, fail or report).
    pub posets: usize,
    pub failures: usize,
    pub skipped: usize,
    pub errors: usize,
    /// Exact smallest slack for inequality checks; the range of reported
    /// values for report-only checks.
    pub extremal: Option<String>,
}

/// Per-check aggregation, in check order of first appearance.
pub fn summarize(reports: &[CheckReport]) -> Vec<SummaryRow> {
    let mut order: Vec<&str> = Vec::new();
    for r in reports {
        if !order.contains(&r.check.as_str()) {
            order.push(&r.check);
        }
    }
    order
        .into_iter()
        .map(|name| {
            let rs: Vec<&CheckReport> = reports.iter().filter(|r| r.check == name).collect();
            let count = |s: Status| rs.iter().filter(|r| r.status == s).count();
            let severity = rs[0].severity;
            let decided: Vec<&&CheckReport> =
                rs.iter().filter(|r| matches!(r.status, Status::Pass | Status::Fail | Status::ReportOnly)).collect();
            let values: Vec<_> = decided.iter().filter_map(|r| r.extremal.as_ref()).collect();
            let extremal = if severity == Severity::Report {
                let lo = values.iter().min_by(|a, b| a.approx.total_cmp(&b.approx));
                let hi = values.iter().max_by(|a, b| a.approx.total_cmp(&b.approx));
                lo.zip(hi).map(|(lo, hi)| format!("[{}, {}]", lo.value, hi.value))
            } else {
                values.iter().min_by(|a, b| a.approx.total_cmp(&b.approx)).map(|e| e.value.clone())
            };
            SummaryRow {
                check: name.to_string(),
                severity,
                posets: decided.len(),
                failures: count(Status::Fail),
                skipped: count(Status::NotApplicable),
                errors: count(Status::Error),
                extremal,
            }
        })
        .collect()
}

pub fn summary_table(rows: &[SummaryRow]) -> String {
    let mut s = format!(
        "{:<18} {:<10} {:>7} {:>8} {:>7} {:>6}  {}\n",
        "check", "severity", "posets", "failures", "skipped", "errors", "min-slack / range"
    );
    for r in rows {
        let sev = match r.severity {
            Severity::Theorem => "theorem",
            Severity::Conjecture => "conjecture",
            Severity::Report => "report",
        };
        s.push_str(&format!(
            "{:<18} {:<10} {:>7} {:>8} {:>7} {:>6}  {}\n",
            r.check,
            sev,
            r.posets,
            r.failures,
            r.skipped,
            r.errors,
            r.extremal.as_deref().unwrap_or("-")
        ));
    }
    s
}
