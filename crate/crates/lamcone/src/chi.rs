//! Euler characteristic functionals on weighted branched surfaces.
//!
//! A sector `Z` with `k` corners has geometric Euler characteristic
//! `chi(Z) - k/4`; a weight vector `v` then has `chi(B(v)) = sum v_i chi_g(Z_i)`.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::cones::{fiber_polytope, ConeRepr, FiberPolytope};
use crate::lp::LpStatus;
use crate::model::{BranchedSurfacePresentation, WeightError, WeightVector};
use crate::rational::{self, Rational};
use crate::report::{AuditReport, Finding, FindingKind};

pub fn chi_geometric(euler_char: i64, corners: u32) -> Rational {
    Rational::from_integer(euler_char.into()) - Rational::new(corners.into(), 4.into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChiFunctional {
    pub labels: Vec<String>,
    pub coefficients: Vec<Rational>,
}

impl ChiFunctional {
    pub fn of(bs: &BranchedSurfacePresentation) -> Self {
        ChiFunctional {
            labels: bs.sector_ids(),
            coefficients: bs
                .sectors
                .iter()
                .map(|z| chi_geometric(z.euler_char, z.corners))
                .collect(),
        }
    }

    pub fn eval_values(&self, v: &[Rational]) -> Rational {
        rational::dot(&self.coefficients, v)
    }

    pub fn eval(&self, v: &WeightVector) -> Result<Rational, WeightError> {
        v.expect_labels(&self.labels)?;
        Ok(self.eval_values(v.values()))
    }
}

pub fn chi_functional(
    bs: &BranchedSurfacePresentation,
    v: &WeightVector,
) -> Result<Rational, WeightError> {
    ChiFunctional::of(bs).eval(v)
}

/// An integral carried weight `v` with `boundary(v) = k w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMultiple {
    pub k: BigInt,
    pub v: WeightVector,
    /// The rational fiber vertex `u` with `v = k u`.
    pub fiber_point: WeightVector,
}

/// Scales a fiber vertex to integers. The vertex is the maximal-chi witness
/// when chi is bounded on the fiber, otherwise the phase-one vertex. `k` is
/// a valid multiple, not necessarily the least one.
pub fn find_integer_multiple(
    bs: &BranchedSurfacePresentation,
    w: &WeightVector,
) -> Result<Option<IntegerMultiple>, WeightError> {
    let fiber = fiber_polytope(bs, w)?;
    let chi = ChiFunctional::of(bs);
    let u = match fiber.status(&chi.coefficients) {
        LpStatus::Optimal(sol) => sol.x,
        LpStatus::Infeasible => return Ok(None),
        LpStatus::Unbounded => match fiber.linear_program().feasible_point() {
            Some(x) => x,
            None => return Ok(None),
        },
    };
    let k0 = rational::denominator_lcm(w.values());
    let k0u: Vec<Rational> = u
        .iter()
        .map(|x| x * Rational::from_integer(k0.clone()))
        .collect();
    let k = k0 * rational::denominator_lcm(&k0u);
    let kq = Rational::from_integer(k.clone());
    let v: Vec<Rational> = u.iter().map(|x| x * &kq).collect();
    let labels = bs.sector_ids();
    Ok(Some(IntegerMultiple {
        k,
        v: WeightVector::new(labels.clone(), v)?,
        fiber_point: WeightVector::new(labels, u)?,
    }))
}

/// Checks `chi <= 0` on every vertex of `{v in C(B) : boundary(v) = 0, sum v = 1}`.
/// A positive vertex means the presentation carries a closed lamination of
/// positive Euler characteristic, contradicting a declared asphericity flag.
pub fn closed_chi_audit(bs: &BranchedSurfacePresentation) -> AuditReport {
    let mut report = AuditReport::new(format!("closed-chi audit of {}", bs.name));
    if !bs.aspherical {
        report
            .notes
            .push("presentation is not flagged aspherical; findings are informational".into());
    }
    let closed = closed_cone(bs);
    let chi = ChiFunctional::of(bs);
    let cell = closed.cell_vertices();
    report.checks = cell.vertices.len();
    for v in &cell.vertices {
        let value = chi.eval_values(v);
        if value.is_positive() {
            report.findings.push(Finding {
                kind: FindingKind::Asphericity,
                message: format!(
                    "closed direction with chi = {value} > 0; the aspherical flag is untenable"
                ),
                witness: vec![("v".into(), v.clone())],
            });
        }
    }
    report
}

/// `C(B)` intersected with `boundary(v) = 0`.
pub fn closed_cone(bs: &BranchedSurfacePresentation) -> ConeRepr {
    let zero = WeightVector::zeros(bs.boundary_track.segment_ids());
    let fiber: FiberPolytope = fiber_polytope(bs, &zero).expect("labels come from the track");
    let mut rows = fiber.cone.equalities.clone();
    rows.extend(
        fiber
            .boundary
            .matrix
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect()),
    );
    ConeRepr::new(bs.sector_ids(), rows)
}

/// Post-condition of `find_integer_multiple`: `k >= 1`, `v` integral and
/// carried, and `boundary(v) = k w`.
pub fn verify_integer_multiple(
    bs: &BranchedSurfacePresentation,
    w: &WeightVector,
    m: &IntegerMultiple,
) -> bool {
    let d = crate::cones::boundary_map(bs);
    let kq = Rational::from_integer(m.k.clone());
    m.k >= BigInt::one()
        && m.v.is_integral()
        && ConeRepr::from_surface(bs).contains_values(m.v.values())
        && d.apply_values(m.v.values())
            == w.values().iter().map(|x| x * &kq).collect::<Vec<_>>()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::{Sector, Segment, TrainTrack};
    use crate::rational::{int, ratio};

    fn circles(names: &[&str]) -> Arc<TrainTrack> {
        Arc::new(TrainTrack::new(
            "T",
            names.iter().map(|n| Segment::closed(*n)).collect(),
            vec![],
        ))
    }

    fn single(name: &str, chi: i64, boundary: &[&str], track: Arc<TrainTrack>) -> BranchedSurfacePresentation {
        BranchedSurfacePresentation::new(
            name,
            vec![Sector::new(name, chi, 0).with_boundary(boundary.iter().copied())],
            vec![],
            track,
            true,
            true,
        )
    }

    fn wv(labels: &[&str], v: Vec<Rational>) -> WeightVector {
        WeightVector::new(labels.iter().map(|s| s.to_string()).collect(), v).unwrap()
    }

    #[test]
    fn geometric_chi_values() {
        assert_eq!(chi_geometric(1, 4), int(0));
        assert_eq!(chi_geometric(1, 3), ratio(1, 4));
        // genus two with one hole: 2 - 2*2 - 1
        assert_eq!(chi_geometric(-3, 0), int(-3));
    }

    #[test]
    fn functional_values() {
        let t = circles(&["alpha"]);
        let bh = single("H", -1, &["alpha", "alpha", "alpha"], t.clone());
        let bg = single("G", -3, &["alpha"], t);
        assert_eq!(chi_functional(&bh, &wv(&["H"], vec![ratio(1, 3)])).unwrap(), ratio(-1, 3));
        assert_eq!(chi_functional(&bg, &wv(&["G"], vec![int(1)])).unwrap(), int(-3));
        assert_eq!(chi_functional(&bg, &wv(&["G"], vec![int(0)])).unwrap(), int(0));
        assert!(chi_functional(&bg, &wv(&["H"], vec![int(0)])).is_err());
    }

    #[test]
    fn integer_multiples() {
        let t = circles(&["alpha", "beta"]);
        let bh = single("H", -1, &["alpha", "alpha", "alpha"], t.clone());
        let w = wv(&["alpha", "beta"], vec![int(1), int(0)]);
        let m = find_integer_multiple(&bh, &w).unwrap().unwrap();
        assert_eq!(m.k, BigInt::from(3));
        assert_eq!(m.v.values(), &[int(1)]);
        assert!(verify_integer_multiple(&bh, &w, &m));

        let on_beta = wv(&["alpha", "beta"], vec![int(0), int(1)]);
        assert!(find_integer_multiple(&bh, &on_beta).unwrap().is_none());

        let bg = single("G", -3, &["alpha"], t);
        let m = find_integer_multiple(&bg, &w).unwrap().unwrap();
        assert_eq!(m.k, BigInt::from(1));
        assert_eq!(m.v.values(), &[int(1)]);

        // rational boundary weight: denominators cleared first
        let half = wv(&["alpha", "beta"], vec![ratio(1, 2), int(0)]);
        let m = find_integer_multiple(&bh, &half).unwrap().unwrap();
        assert!(verify_integer_multiple(&bh, &half, &m));
        assert_eq!(m.k, BigInt::from(6));
    }

    #[test]
    fn sphere_violates_asphericity() {
        let sphere = single("S", 2, &[], circles(&["alpha"]));
        let r = closed_chi_audit(&sphere);
        assert_eq!(r.count(FindingKind::Asphericity), 1);
        assert_eq!(r.findings[0].witness[0].1, vec![int(1)]);
    }

    #[test]
    fn torus_is_allowed() {
        let torus = single("T", 0, &[], circles(&["alpha"]));
        assert!(closed_chi_audit(&torus).is_clean());
    }

    #[test]
    fn bounded_sum_has_no_closed_directions() {
        let t = circles(&["alpha"]);
        let bg = single("G", -3, &["alpha"], t.clone());
        let bh = single("H", -1, &["alpha", "alpha", "alpha"], t);
        let sum = BranchedSurfacePresentation::direct_sum("BG.BH", &[&bg, &bh]).unwrap();
        let r = closed_chi_audit(&sum);
        assert!(r.is_clean());
        assert_eq!(r.checks, 0);
    }
}
