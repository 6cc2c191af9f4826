//! Combinatorial domain types: oriented train tracks, branched-surface
//! presentations, weight vectors and scalloped-surface summaries.
//!
//! All values are immutable once built; validation never panics and reports
//! every violated invariant it finds.

mod surface;
mod track;
mod weights;

use std::fmt;

use serde_json::{json, Value};

pub use surface::{BranchEquation, BranchedSurfacePresentation, Sector};
pub use track::{
    scalloped_summary, CuspId, End, EndRef, ScallopedSummary, Segment, Side, Switch, TrainTrack,
};
pub use weights::{WeightError, WeightVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    DuplicateId,
    UnknownSegment,
    UnknownSector,
    ClosedCurveAttached,
    EndMultiplyAttached,
    EndUnattached,
    EmptySwitchSide,
    OrientationInconsistent,
    UnorientedSegment,
    BoundaryInconsistency,
    OrientationFlag,
    NonzeroIndex,
}

impl ViolationKind {
    pub fn code(self) -> &'static str {
        match self {
            ViolationKind::DuplicateId => "duplicate-id",
            ViolationKind::UnknownSegment => "unknown-segment",
            ViolationKind::UnknownSector => "unknown-sector",
            ViolationKind::ClosedCurveAttached => "closed-curve-attached",
            ViolationKind::EndMultiplyAttached => "end-multiply-attached",
            ViolationKind::EndUnattached => "end-unattached",
            ViolationKind::EmptySwitchSide => "empty-switch-side",
            ViolationKind::OrientationInconsistent => "orientation-inconsistent",
            ViolationKind::UnorientedSegment => "unoriented-segment",
            ViolationKind::BoundaryInconsistency => "boundary-inconsistency",
            ViolationKind::OrientationFlag => "orientation-flag",
            ViolationKind::NonzeroIndex => "nonzero-index",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

impl Violation {
    pub fn new(kind: ViolationKind, message: impl Into<String>) -> Self {
        Violation {
            kind,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub subject: String,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        ValidationReport {
            subject: subject.into(),
            violations: Vec::new(),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, kind: ViolationKind, message: impl Into<String>) {
        self.violations.push(Violation::new(kind, message));
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "subject": self.subject,
            "valid": self.is_valid(),
            "violations": self.violations.iter().map(|v| json!({
                "kind": v.kind.code(),
                "message": v.message,
            })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "{}: valid", self.subject);
        }
        write!(f, "{}: {} violation(s)", self.subject, self.violations.len())?;
        for v in &self.violations {
            write!(f, "\n  [{}] {}", v.kind.code(), v.message)?;
        }
        Ok(())
    }
}
