//! Verdict engines: Daugavet tests for molecules and elements, Δ tests by
//! ball intersections and by slices, connectability, the length-space
//! test and lens-diameter scans. Every report carries its parameters,
//! witnesses and cross-checks.

mod connect;
mod daugavet;
mod delta;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::metric::FiniteMetricSpace;

pub use connect::{classify_connectable, lens_diameter_scan, length_space_test, LensRow, LensScan, MidBudget};
pub use daugavet::{classify_daugavet_element, classify_daugavet_molecule};
pub use delta::{builtin_slices, delta_ball_test, delta_slice_test, NamedSlice, SliceFamilyOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Positive,
    Negative,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Positive => "positive",
            Verdict::Negative => "negative",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: String,
    pub points: Vec<String>,
    pub values: BTreeMap<String, f64>,
}

impl Witness {
    pub(crate) fn new(kind: &str, space: &FiniteMetricSpace, points: &[usize]) -> Self {
        Self {
            kind: kind.to_string(),
            points: points.iter().map(|&p| space.name(p).to_string()).collect(),
            values: BTreeMap::new(),
        }
    }

    pub(crate) fn with(mut self, key: &str, value: f64) -> Self {
        self.values.insert(key.to_string(), value);
        self
    }

    pub fn value(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
}

impl CrossCheck {
    /// Passes when `residual < tolerance`.
    pub(crate) fn below(name: &str, residual: f64, tolerance: f64) -> Self {
        Self { name: name.to_string(), passed: residual < tolerance, residual, tolerance }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Query {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    pub points: Vec<String>,
    pub params: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub kind: String,
    pub query: Query,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub cross_checks: Vec<CrossCheck>,
    pub notes: Vec<String>,
}

impl ClassificationReport {
    pub(crate) fn new(kind: &str, space: &FiniteMetricSpace, points: &[usize]) -> Self {
        Self {
            kind: kind.to_string(),
            query: Query {
                element: None,
                points: points.iter().map(|&p| space.name(p).to_string()).collect(),
                params: BTreeMap::new(),
            },
            verdict: Verdict::Inconclusive,
            witnesses: vec![],
            cross_checks: vec![],
            notes: vec![],
        }
    }

    pub(crate) fn param(mut self, key: &str, value: f64) -> Self {
        self.query.params.insert(key.to_string(), value);
        self
    }

    pub fn is_positive(&self) -> bool {
        self.verdict == Verdict::Positive
    }

    pub fn all_checks_passed(&self) -> bool {
        self.cross_checks.iter().all(|c| c.passed)
    }

    pub fn witnesses_of<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a Witness> + 'a {
        self.witnesses.iter().filter(move |w| w.kind == kind)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<12}{}", "kind", self.kind);
        let mut query: Vec<String> = self.query.points.clone();
        if let Some(e) = &self.query.element {
            query.insert(0, e.clone());
        }
        query.extend(self.query.params.iter().map(|(k, v)| format!("{k}={}", fmt_value(*v))));
        let _ = writeln!(out, "{:<12}{}", "query", query.join(" "));
        let _ = writeln!(out, "{:<12}{}", "verdict", self.verdict.as_str());
        if !self.witnesses.is_empty() {
            let _ = writeln!(out, "witnesses ({})", self.witnesses.len());
            let kind_width = self.witnesses.iter().map(|w| w.kind.len()).max().unwrap_or(0) + 2;
            for w in &self.witnesses {
                let values: Vec<String> = w.values.iter().map(|(k, v)| format!("{k}={}", fmt_value(*v))).collect();
                let points = w.points.join(" ");
                let _ = writeln!(out, "  {:<kind_width$}{:<28} {}", w.kind, points, values.join(" "));
            }
        }
        if !self.cross_checks.is_empty() {
            let _ = writeln!(out, "cross-checks");
            for c in &self.cross_checks {
                let status = if c.passed { "pass" } else { "FAIL" };
                let _ = writeln!(
                    out,
                    "  {:<26}{:<6}residual={} tol={}",
                    c.name,
                    status,
                    fmt_value(c.residual),
                    fmt_value(c.tolerance)
                );
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}

pub(crate) fn fmt_value(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else if v == v.trunc() && v.abs() < 1e15 {
        format!("{v:.0}")
    } else if v.abs() >= 1e-4 && v.abs() < 1e6 {
        let s = format!("{v:.9}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.3e}")
    }
}
