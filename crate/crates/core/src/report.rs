//! Check outcomes shared by the geometry, balance and verifier modules.

use std::collections::BTreeMap;

use num_traits::Signed;
use serde::Serialize;

use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    ReportOnly,
    NotApplicable,
    Error,
}

/// Proved statements fail hard; conjectures fail soft; reports never fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Severity {
    Theorem,
    Conjecture,
    Report,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub elements: Vec<usize>,
    pub description: String,
    pub values: BTreeMap<String, String>,
}

/// The tightest instance seen: smallest slack for inequality checks, or the
/// reported quantity for report-only checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extremal {
    pub label: String,
    pub value: String,
    #[serde(serialize_with = "rational::ser::f64_sig")]
    pub approx: f64,
    pub elements: Vec<usize>,
}

impl Extremal {
    pub fn exact(label: impl Into<String>, q: &Rational, elements: Vec<usize>) -> Self {
        Extremal { label: label.into(), value: rational::format(q), approx: rational::to_f64(q), elements }
    }

    pub fn float(label: impl Into<String>, v: f64, elements: Vec<usize>) -> Self {
        let v = rational::round_sig(v);
        Extremal { label: label.into(), value: format!("{v}"), approx: v, elements }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub severity: Severity,
    pub status: Status,
    /// Hex canonical form of the poset, filled in by sweeps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poset: Option<String>,
    pub n: usize,
    /// Number of instances (tuples, pairs, subsets, ...) examined.
    pub instances: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extremal: Option<Extremal>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    pub fn new(check: &str, severity: Severity, status: Status, n: usize) -> Self {
        CheckReport {
            check: check.to_string(),
            severity,
            status,
            poset: None,
            n,
            instances: 0,
            witness: None,
            extremal: None,
            values: BTreeMap::new(),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_hard_failure(&self) -> bool {
        self.status == Status::Fail && self.severity == Severity::Theorem
    }
}

/// Accumulates `lhs >= rhs` instances, keeping the smallest slack and the
/// first violation in iteration order.
pub struct Tracker {
    check: &'static str,
    severity: Severity,
    n: usize,
    instances: u64,
    tightest: Option<(Rational, Vec<usize>, String)>,
    failure: Option<Witness>,
}

impl Tracker {
    pub fn new(check: &'static str, severity: Severity, n: usize) -> Self {
        Tracker { check, severity, n, instances: 0, tightest: None, failure: None }
    }

    /// Records `lhs >= rhs`; `label` describes the instance and is only
    /// evaluated when it is needed.
    pub fn ge<F: FnOnce() -> String>(&mut self, lhs: &Rational, rhs: &Rational, elements: &[usize], label: F) {
        self.slack(lhs - rhs, lhs, rhs, elements, label);
    }

    /// Records `lhs == rhs` (slack is minus the absolute difference).
    pub fn eq<F: FnOnce() -> String>(&mut self, lhs: &Rational, rhs: &Rational, elements: &[usize], label: F) {
        self.slack(-(lhs - rhs).abs(), lhs, rhs, elements, label);
    }

    fn slack<F: FnOnce() -> String>(&mut self, slack: Rational, lhs: &Rational, rhs: &Rational, elements: &[usize], label: F) {
        self.instances += 1;
        let tighter = self.tightest.as_ref().is_none_or(|(s, _, _)| slack < *s);
        let failed = slack.is_negative() && self.failure.is_none();
        if !tighter && !failed {
            return;
        }
        let label = label();
        if failed {
            let mut values = BTreeMap::new();
            values.insert("lhs".to_string(), rational::format(lhs));
            values.insert("rhs".to_string(), rational::format(rhs));
            self.failure = Some(Witness { elements: elements.to_vec(), description: label.clone(), values });
        }
        if tighter {
            self.tightest = Some((slack, elements.to_vec(), label));
        }
    }

    pub fn finish(self) -> CheckReport {
        let status = if self.failure.is_some() { Status::Fail } else { Status::Pass };
        let mut r = CheckReport::new(self.check, self.severity, status, self.n);
        r.instances = self.instances;
        r.witness = self.failure;
        r.extremal = self.tightest.map(|(s, el, label)| Extremal::exact(format!("min slack: {label}"), &s, el));
        if self.instances == 0 {
            r.status = Status::NotApplicable;
        }
        r
    }
}
