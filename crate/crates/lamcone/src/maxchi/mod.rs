//! The maximal-chi function `X(w)` relative to a declared finite family of
//! carrier presentations sharing one boundary track.
//!
//! `X(w)` is the largest `chi(B(v))` over members `B` and carried weights
//! `v` with `boundary(v) = w`. It is computed by exact LP per member. The
//! family is user-declared: nothing here quantifies over every aspherical
//! branched surface in an ambient manifold, so all results are relative to
//! the family supplied.

mod audit;
mod profile;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::chi::ChiFunctional;
use crate::cones::{boundary_map, fiber_polytope, ConeRepr};
use crate::lp::{LinearProgram, LpStatus};
use crate::model::{
    BranchEquation, BranchedSurfacePresentation, EndRef, Sector, Segment, Switch, TrainTrack,
    WeightError, WeightVector,
};
use crate::rational::{self, Rational};

pub use audit::{audit_structure, audit_structure_seeded, DEFAULT_AUDIT_SEED};
pub use profile::{profile, PLProfile, Piece};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error("a family needs at least one member")]
    Empty,
    #[error("member `{member}` has boundary track `{found}`, expected `{expected}`")]
    BoundaryMismatch {
        member: String,
        expected: String,
        found: String,
    },
    #[error("boundary tracks of additivity components must be distinct")]
    SharedTrack,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    pub name: String,
    pub members: Vec<Arc<BranchedSurfacePresentation>>,
}

impl Family {
    pub fn new(
        name: impl Into<String>,
        members: Vec<Arc<BranchedSurfacePresentation>>,
    ) -> Result<Self, FamilyError> {
        let first = members.first().ok_or(FamilyError::Empty)?;
        for m in &members {
            if m.boundary_track != first.boundary_track {
                return Err(FamilyError::BoundaryMismatch {
                    member: m.name.clone(),
                    expected: first.boundary_track.name.clone(),
                    found: m.boundary_track.name.clone(),
                });
            }
        }
        Ok(Family {
            name: name.into(),
            members,
        })
    }

    pub fn boundary_track(&self) -> &Arc<TrainTrack> {
        &self.members[0].boundary_track
    }

    pub fn member(&self, name: &str) -> Option<&Arc<BranchedSurfacePresentation>> {
        self.members.iter().find(|m| m.name == name)
    }

    /// Members whose declared flags match the family contract.
    pub fn undeclared_members(&self) -> Vec<&str> {
        self.members
            .iter()
            .filter(|m| !(m.aspherical && m.oriented))
            .map(|m| m.name.as_str())
            .collect()
    }
}

/// An extended rational: `Infeasible < Finite(_) < Unbounded`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum XValue {
    Infeasible,
    Finite(Rational),
    Unbounded,
}

impl XValue {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            XValue::Finite(q) => Some(q),
            _ => None,
        }
    }

    /// Sum of independent maxima; infeasibility dominates unboundedness.
    pub fn add(&self, other: &XValue) -> XValue {
        match (self, other) {
            (XValue::Infeasible, _) | (_, XValue::Infeasible) => XValue::Infeasible,
            (XValue::Unbounded, _) | (_, XValue::Unbounded) => XValue::Unbounded,
            (XValue::Finite(a), XValue::Finite(b)) => XValue::Finite(a + b),
        }
    }

    pub fn scale(&self, lambda: &Rational) -> XValue {
        match self {
            XValue::Finite(q) => XValue::Finite(q * lambda),
            other => other.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            XValue::Infeasible => json!("infeasible"),
            XValue::Unbounded => json!("unbounded"),
            XValue::Finite(q) => rational::to_json(q),
        }
    }
}

impl PartialOrd for XValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for XValue {
    fn cmp(&self, other: &Self) -> Ordering {
        let rank = |x: &XValue| match x {
            XValue::Infeasible => 0,
            XValue::Finite(_) => 1,
            XValue::Unbounded => 2,
        };
        match (self, other) {
            (XValue::Finite(a), XValue::Finite(b)) => a.cmp(b),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

impl fmt::Display for XValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XValue::Infeasible => write!(f, "infeasible"),
            XValue::Unbounded => write!(f, "unbounded"),
            XValue::Finite(q) => write!(f, "{q}"),
        }
    }
}

/// Outcome of the LP on a single carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XSingle {
    pub value: XValue,
    /// Lexicographically smallest optimal fiber vertex.
    pub witness: Option<WeightVector>,
    /// Dual multipliers on the boundary rows: `value(w') <= dual . w'` for all `w'`.
    pub boundary_dual: Option<Vec<Rational>>,
}

/// `max chi(B(v))` over `v in C(B)` with `boundary(v) = w`.
pub fn x_single(bs: &BranchedSurfacePresentation, w: &WeightVector) -> Result<XSingle, WeightError> {
    let fiber = fiber_polytope(bs, w)?;
    let chi = ChiFunctional::of(bs);
    Ok(match fiber.status(&chi.coefficients) {
        LpStatus::Infeasible => XSingle {
            value: XValue::Infeasible,
            witness: None,
            boundary_dual: None,
        },
        LpStatus::Unbounded => XSingle {
            value: XValue::Unbounded,
            witness: None,
            boundary_dual: None,
        },
        LpStatus::Optimal(sol) => {
            let skip = fiber.cone.equalities.len();
            XSingle {
                value: XValue::Finite(sol.value),
                witness: Some(WeightVector::new(bs.sector_ids(), sol.x)?),
                boundary_dual: Some(sol.dual[skip..].to_vec()),
            }
        }
    })
}

/// Value-only evaluation of `X` for sampling audits. The cone and boundary
/// rows of each member are built once and reused for every sample.
pub(crate) struct FamilyEvaluator {
    members: Vec<MemberLp>,
}

struct MemberLp {
    rows: Vec<Vec<Rational>>,
    homogeneous: usize,
    chi: Vec<Rational>,
}

impl MemberLp {
    fn new(bs: &BranchedSurfacePresentation) -> Self {
        let cone = ConeRepr::from_surface(bs);
        let mut rows = cone.rational_rows();
        let homogeneous = rows.len();
        rows.extend(boundary_map(bs).rational_rows());
        MemberLp {
            rows,
            homogeneous,
            chi: ChiFunctional::of(bs).coefficients,
        }
    }

    fn value(&self, w: &[Rational]) -> XValue {
        let mut b = vec![rational::int(0); self.homogeneous];
        b.extend(w.iter().cloned());
        let lp = LinearProgram::new(self.rows.clone(), b, self.chi.len());
        match lp.maximize_plain(&self.chi) {
            LpStatus::Infeasible => XValue::Infeasible,
            LpStatus::Unbounded => XValue::Unbounded,
            LpStatus::Optimal(sol) => XValue::Finite(sol.value),
        }
    }

    /// Whether the optimal face at `w` holds a point with every entry
    /// positive: each coordinate must be positive somewhere on the face, and
    /// the face is convex.
    fn positive_optimum(&self, w: &[Rational], value: &Rational) -> bool {
        let n = self.chi.len();
        let mut rows = self.rows.clone();
        rows.push(self.chi.clone());
        let mut b = vec![rational::int(0); self.homogeneous];
        b.extend(w.iter().cloned());
        b.push(value.clone());
        let lp = LinearProgram::new(rows, b, n);
        (0..n).all(|j| {
            let mut e = vec![rational::int(0); n];
            e[j] = rational::int(1);
            match lp.maximize_plain(&e) {
                LpStatus::Optimal(sol) => sol.value > rational::int(0),
                LpStatus::Unbounded => true,
                LpStatus::Infeasible => false,
            }
        })
    }
}

impl FamilyEvaluator {
    pub(crate) fn new(fam: &Family) -> Self {
        FamilyEvaluator {
            members: fam.members.iter().map(|m| MemberLp::new(m)).collect(),
        }
    }

    pub(crate) fn value(&self, w: &[Rational]) -> XValue {
        self.members
            .iter()
            .map(|m| m.value(w))
            .max()
            .unwrap_or(XValue::Infeasible)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub presentation: String,
    pub v: WeightVector,
    /// Some optimum of this member has every sector weight positive.
    pub interior: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XResult {
    pub value: XValue,
    /// Every member achieving a finite maximum, in family order.
    pub witnesses: Vec<Witness>,
    /// Members on which chi is unbounded (a violated asphericity declaration).
    pub unbounded: Vec<String>,
}

impl XResult {
    pub fn to_json(&self) -> Value {
        json!({
            "value": self.value.to_json(),
            "witnesses": self.witnesses.iter().map(|w| json!({
                "presentation": w.presentation,
                "v": w.v.to_json(),
                "interior": w.interior,
            })).collect::<Vec<_>>(),
            "unbounded": self.unbounded,
        })
    }
}

pub fn x_family(fam: &Family, w: &WeightVector) -> Result<XResult, WeightError> {
    w.expect_labels(&fam.boundary_track().segment_ids())?;
    let outcomes: Vec<XSingle> = fam
        .members
        .par_iter()
        .map(|m| x_single(m, w))
        .collect::<Result<_, _>>()?;
    let value = outcomes
        .iter()
        .map(|o| o.value.clone())
        .max()
        .unwrap_or(XValue::Infeasible);
    let unbounded = fam
        .members
        .iter()
        .zip(&outcomes)
        .filter(|(_, o)| o.value == XValue::Unbounded)
        .map(|(m, _)| m.name.clone())
        .collect();
    let witnesses = match &value {
        XValue::Finite(best) => fam
            .members
            .iter()
            .zip(&outcomes)
            .filter(|(_, o)| o.value == value)
            .map(|(m, o)| Witness {
                presentation: m.name.clone(),
                v: o.witness.clone().expect("finite outcomes carry a witness"),
                interior: MemberLp::new(m).positive_optimum(w.values(), best),
            })
            .collect(),
        _ => Vec::new(),
    };
    Ok(XResult {
        value,
        witnesses,
        unbounded,
    })
}

/// Extends the family by the direct sum of every subset of at least two
/// members, plus each member's self-sum. The resulting `X` is superadditive;
/// pairwise sums alone only guarantee this for families of two.
pub fn close_under_sums(fam: &Family) -> Family {
    let base = &fam.members;
    let mut members = base.clone();
    for m in base {
        let name = format!("{}.{}", m.name, m.name);
        if let Some(s) = BranchedSurfacePresentation::direct_sum(name, &[m, m]) {
            members.push(Arc::new(s));
        }
    }
    let n = base.len();
    if n >= 2 {
        let mut masks: Vec<u64> = (1u64..(1 << n)).filter(|m| m.count_ones() >= 2).collect();
        masks.sort_by_key(|m| (m.count_ones(), m.reverse_bits()));
        for mask in masks {
            let parts: Vec<&BranchedSurfacePresentation> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| base[i].as_ref())
                .collect();
            let name = parts
                .iter()
                .map(|p| p.name.as_str())
                .collect::<Vec<_>>()
                .join(".");
            if let Some(s) = BranchedSurfacePresentation::direct_sum(name, &parts) {
                members.push(Arc::new(s));
            }
        }
    }
    Family {
        name: format!("{}.closed", fam.name),
        members,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditivityReport {
    pub components: Vec<XValue>,
    pub union: XValue,
    pub sum: XValue,
}

impl AdditivityReport {
    pub fn holds(&self) -> bool {
        self.union == self.sum
    }

    pub fn to_json(&self) -> Value {
        json!({
            "components": self.components.iter().map(XValue::to_json).collect::<Vec<_>>(),
            "union": self.union.to_json(),
            "sum": self.sum.to_json(),
            "holds": self.holds(),
        })
    }
}

/// Disjoint union of families on disjoint tracks: the union track, and one
/// member per choice of a member from each family.
pub fn disjoint_union(fams: &[&Family]) -> Result<Family, FamilyError> {
    for (i, a) in fams.iter().enumerate() {
        for b in &fams[..i] {
            if Arc::ptr_eq(a.boundary_track(), b.boundary_track())
                || a.boundary_track() == b.boundary_track()
            {
                return Err(FamilyError::SharedTrack);
            }
        }
    }
    let tag = |k: usize, id: &str| format!("c{k}.{id}");
    let mut segments = Vec::new();
    let mut switches = Vec::new();
    for (k, f) in fams.iter().enumerate() {
        let t = f.boundary_track();
        segments.extend(t.segments.iter().map(|s| Segment {
            id: tag(k, &s.id),
            ..s.clone()
        }));
        let rename = |e: &EndRef| EndRef {
            segment: tag(k, &e.segment),
            end: e.end,
        };
        switches.extend(t.switches.iter().map(|sw| Switch {
            id: tag(k, &sw.id),
            side_a: sw.side_a.iter().map(rename).collect(),
            side_b: sw.side_b.iter().map(rename).collect(),
        }));
    }
    let names: Vec<&str> = fams.iter().map(|f| f.boundary_track().name.as_str()).collect();
    let track = Arc::new(TrainTrack::new(names.join("_"), segments, switches));

    let mut choices: Vec<Vec<usize>> = vec![vec![]];
    for f in fams {
        choices = choices
            .into_iter()
            .flat_map(|c| {
                (0..f.members.len()).map(move |i| {
                    let mut c = c.clone();
                    c.push(i);
                    c
                })
            })
            .collect();
    }
    let mut members = Vec::new();
    for choice in choices {
        let mut sectors = Vec::new();
        let mut equations = Vec::new();
        let mut names = Vec::new();
        let mut aspherical = true;
        let mut oriented = true;
        for (k, (&i, f)) in choice.iter().zip(fams).enumerate() {
            let m = &f.members[i];
            names.push(m.name.clone());
            aspherical &= m.aspherical;
            oriented &= m.oriented;
            let sector_tag = |id: &str| format!("c{k}.{}.{id}", m.name);
            sectors.extend(m.sectors.iter().map(|z| Sector {
                id: sector_tag(&z.id),
                boundary: z.boundary.iter().map(|s| tag(k, s)).collect(),
                ..z.clone()
            }));
            equations.extend(m.equations.iter().map(|eq| {
                BranchEquation::new(eq.terms.iter().map(|(c, s)| (*c, sector_tag(s))))
            }));
        }
        members.push(Arc::new(BranchedSurfacePresentation::new(
            names.join("_"),
            sectors,
            equations,
            track.clone(),
            aspherical,
            oriented,
        )));
    }
    let fam_names: Vec<&str> = fams.iter().map(|f| f.name.as_str()).collect();
    Family::new(fam_names.join("_"), members)
}

/// Compares `X` of the disjoint union against the sum of component values.
pub fn additivity_check(parts: &[(&Family, &WeightVector)]) -> Result<AdditivityReport, AdditivityError> {
    let fams: Vec<&Family> = parts.iter().map(|(f, _)| *f).collect();
    let union = disjoint_union(&fams)?;
    let mut components = Vec::new();
    let mut joined = Vec::new();
    for (f, w) in parts {
        components.push(x_family(f, w)?.value);
        joined.extend(w.values().iter().cloned());
    }
    let w = WeightVector::new(union.boundary_track().segment_ids(), joined)?;
    let union_value = x_family(&union, &w)?.value;
    let sum = components
        .iter()
        .fold(XValue::Finite(Rational::from_integer(0.into())), |acc, x| acc.add(x));
    Ok(AdditivityReport {
        components,
        union: union_value,
        sum,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AdditivityError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Weight(#[from] WeightError),
}
