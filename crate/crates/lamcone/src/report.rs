//! Audit reports shared by the chi and maxchi audits.

use std::fmt;

use serde_json::{json, Value};

use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FindingKind {
    /// A closed direction with positive Euler characteristic.
    Asphericity,
    Homogeneity,
    Concavity,
    Superadditivity,
    Unbounded,
}

impl FindingKind {
    pub fn code(self) -> &'static str {
        match self {
            FindingKind::Asphericity => "asphericity",
            FindingKind::Homogeneity => "homogeneity",
            FindingKind::Concavity => "concavity",
            FindingKind::Superadditivity => "superadditivity",
            FindingKind::Unbounded => "unbounded",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub kind: FindingKind,
    pub message: String,
    /// Labeled exact data reproducing the finding.
    pub witness: Vec<(String, Vec<Rational>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AuditReport {
    pub title: String,
    pub checks: usize,
    pub findings: Vec<Finding>,
    pub notes: Vec<String>,
}

impl AuditReport {
    pub fn new(title: impl Into<String>) -> Self {
        AuditReport {
            title: title.into(),
            ..Default::default()
        }
    }

    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn count(&self, kind: FindingKind) -> usize {
        self.findings.iter().filter(|f| f.kind == kind).count()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "title": self.title,
            "checks": self.checks,
            "clean": self.is_clean(),
            "notes": self.notes,
            "findings": self.findings.iter().map(|f| json!({
                "kind": f.kind.code(),
                "message": f.message,
                "witness": f.witness.iter()
                    .map(|(k, v)| json!({"label": k, "values": rational::vec_to_json(v)}))
                    .collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} check(s), {} finding(s)",
            self.title,
            self.checks,
            self.findings.len()
        )?;
        for note in &self.notes {
            write!(f, "\n  note: {note}")?;
        }
        for finding in &self.findings {
            write!(f, "\n  [{}] {}", finding.kind.code(), finding.message)?;
            for (label, values) in &finding.witness {
                write!(f, "\n      {label} = {}", rational::fmt_tuple(values))?;
            }
        }
        Ok(())
    }
}
