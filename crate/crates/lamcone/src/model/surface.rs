use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::linalg;
use crate::rational::Rational;

use super::{TrainTrack, ValidationReport, ViolationKind};

/// A sector `Z` of a branched surface, treated abstractly as a surface with corners.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sector {
    pub id: String,
    pub euler_char: i64,
    pub corners: u32,
    pub oriented: bool,
    /// Boundary segments met by this sector, with multiplicity.
    pub boundary: Vec<String>,
}

impl Sector {
    pub fn new(id: impl Into<String>, euler_char: i64, corners: u32) -> Self {
        Sector {
            id: id.into(),
            euler_char,
            corners,
            oriented: true,
            boundary: Vec::new(),
        }
    }

    pub fn with_boundary<S: Into<String>>(mut self, segments: impl IntoIterator<Item = S>) -> Self {
        self.boundary.extend(segments.into_iter().map(Into::into));
        self
    }
}

/// `sum coeff * weight(sector) = 0` with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BranchEquation {
    pub terms: Vec<(i64, String)>,
}

impl BranchEquation {
    pub fn new<S: Into<String>>(terms: impl IntoIterator<Item = (i64, S)>) -> Self {
        BranchEquation {
            terms: terms.into_iter().map(|(c, s)| (c, s.into())).collect(),
        }
    }

    /// Merges repeated sectors, drops zero coefficients and orders terms by
    /// sector declaration order (unknown sectors last, by first appearance).
    fn canonical(&self, sectors: &[Sector]) -> BranchEquation {
        let mut merged: Vec<(i64, String)> = Vec::new();
        for (c, s) in &self.terms {
            match merged.iter_mut().find(|(_, t)| t == s) {
                Some(entry) => entry.0 += c,
                None => merged.push((*c, s.clone())),
            }
        }
        merged.retain(|(c, _)| *c != 0);
        let rank = |s: &str| {
            sectors
                .iter()
                .position(|z| z.id == s)
                .unwrap_or(usize::MAX)
        };
        merged.sort_by_key(|(_, s)| rank(s));
        BranchEquation { terms: merged }
    }
}

impl fmt::Display for BranchEquation {
    /// Positive terms on the left, negated negative terms on the right: `3x = 2y + 2z`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |positive: bool| {
            let parts: Vec<String> = self
                .terms
                .iter()
                .filter(|(c, _)| (*c > 0) == positive)
                .map(|(c, s)| match c.abs() {
                    1 => s.clone(),
                    k => format!("{k}{s}"),
                })
                .collect();
            if parts.is_empty() {
                "0".to_string()
            } else {
                parts.join(" + ")
            }
        };
        write!(f, "{} = {}", side(true), side(false))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BranchedSurfacePresentation {
    pub name: String,
    pub sectors: Vec<Sector>,
    pub equations: Vec<BranchEquation>,
    pub boundary_track: Arc<TrainTrack>,
    /// Declared, not verified; see `chi::closed_chi_audit`.
    pub aspherical: bool,
    pub oriented: bool,
}

impl BranchedSurfacePresentation {
    pub fn new(
        name: impl Into<String>,
        sectors: Vec<Sector>,
        equations: Vec<BranchEquation>,
        boundary_track: Arc<TrainTrack>,
        aspherical: bool,
        oriented: bool,
    ) -> Self {
        let equations = equations.iter().map(|e| e.canonical(&sectors)).collect();
        BranchedSurfacePresentation {
            name: name.into(),
            sectors,
            equations,
            boundary_track,
            aspherical,
            oriented,
        }
    }

    pub fn sector_ids(&self) -> Vec<String> {
        self.sectors.iter().map(|s| s.id.clone()).collect()
    }

    pub fn sector_index(&self, id: &str) -> Option<usize> {
        self.sectors.iter().position(|s| s.id == id)
    }

    pub fn is_closed(&self) -> bool {
        self.sectors.iter().all(|s| s.boundary.is_empty())
    }

    /// Branch equations as integer rows over the sector index.
    pub fn equation_matrix(&self) -> Vec<Vec<i64>> {
        self.equations
            .iter()
            .map(|eq| {
                let mut row = vec![0i64; self.sectors.len()];
                for (c, s) in &eq.terms {
                    if let Some(i) = self.sector_index(s) {
                        row[i] += c;
                    }
                }
                row
            })
            .collect()
    }

    /// Segment-by-sector multiplicity matrix of the boundary incidence.
    pub fn incidence_matrix(&self) -> Vec<Vec<i64>> {
        let track = &self.boundary_track;
        let mut m = vec![vec![0i64; self.sectors.len()]; track.segments.len()];
        for (j, z) in self.sectors.iter().enumerate() {
            for seg in &z.boundary {
                if let Some(i) = track.segment_index(seg) {
                    m[i][j] += 1;
                }
            }
        }
        m
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new(format!("surface {}", self.name));
        report
            .violations
            .extend(self.boundary_track.validate().violations);

        let mut seen = HashSet::new();
        for z in &self.sectors {
            if !seen.insert(z.id.as_str()) {
                report.push(
                    ViolationKind::DuplicateId,
                    format!("sector `{}` declared twice", z.id),
                );
            }
            for seg in &z.boundary {
                if self.boundary_track.segment_index(seg).is_none() {
                    report.push(
                        ViolationKind::UnknownSegment,
                        format!(
                            "sector `{}` meets unknown boundary segment `{}`",
                            z.id, seg
                        ),
                    );
                }
            }
            if self.oriented && !z.oriented {
                report.push(
                    ViolationKind::OrientationFlag,
                    format!("surface flagged oriented but sector `{}` is not", z.id),
                );
            }
        }
        for eq in &self.equations {
            for (_, s) in &eq.terms {
                if self.sector_index(s).is_none() {
                    report.push(
                        ViolationKind::UnknownSector,
                        format!("branch equation `{eq}` references unknown sector `{s}`"),
                    );
                }
            }
        }
        if report.is_valid() {
            self.check_boundary_consistency(&mut report);
        }
        report
    }

    /// Every solution of the branch equations must induce boundary weights
    /// satisfying the boundary switch equations; checked on a null-space basis.
    fn check_boundary_consistency(&self, report: &mut ValidationReport) {
        let n = self.sectors.len();
        let eqs = linalg::from_integers(&self.equation_matrix());
        let basis = if eqs.is_empty() {
            (0..n)
                .map(|i| {
                    let mut v = vec![Rational::zero(); n];
                    v[i] = Rational::from_integer(1.into());
                    v
                })
                .collect()
        } else {
            linalg::null_space(&eqs, n)
        };
        let incidence = linalg::from_integers(&self.incidence_matrix());
        let switches = linalg::from_integers(&self.boundary_track.switch_matrix());
        let mut bad = vec![false; switches.len()];
        for v in &basis {
            let boundary = linalg::mat_vec(&incidence, v);
            for (k, residual) in linalg::mat_vec(&switches, &boundary).iter().enumerate() {
                if !residual.is_zero() {
                    bad[k] = true;
                }
            }
        }
        for (k, _) in bad.iter().enumerate().filter(|(_, b)| **b) {
            report.push(
                ViolationKind::BoundaryInconsistency,
                format!(
                    "boundary inconsistency: branch equations do not imply the switch equation at `{}`",
                    self.boundary_track.switches[k].id
                ),
            );
        }
    }

    /// Direct sum over a common boundary track: disjoint sector sets (each
    /// prefixed by its summand's name), union of equations, summed boundary.
    pub fn direct_sum(name: impl Into<String>, parts: &[&BranchedSurfacePresentation]) -> Option<Self> {
        let first = parts.first()?;
        if parts
            .iter()
            .any(|p| p.boundary_track != first.boundary_track)
        {
            return None;
        }
        let mut sectors = Vec::new();
        let mut equations = Vec::new();
        for (k, p) in parts.iter().enumerate() {
            let prefix = format!("{}_{}", p.name, k);
            let rename = |id: &str| format!("{prefix}.{id}");
            sectors.extend(p.sectors.iter().map(|z| Sector {
                id: rename(&z.id),
                ..z.clone()
            }));
            equations.extend(p.equations.iter().map(|eq| BranchEquation {
                terms: eq.terms.iter().map(|(c, s)| (*c, rename(s))).collect(),
            }));
        }
        Some(BranchedSurfacePresentation::new(
            name,
            sectors,
            equations,
            first.boundary_track.clone(),
            parts.iter().all(|p| p.aspherical),
            parts.iter().all(|p| p.oriented),
        ))
    }
}
