//! Weight cones `{w : E w = 0, w >= 0}`, their projective cells, boundary
//! maps of branched-surface presentations and fiber polytopes over a fixed
//! boundary weight.
//!
//! Vertex enumeration is incremental double description over the integers:
//! start from the orthant's extreme rays and cut by one equality at a time,
//! in index order. Adjacency uses the combinatorial zero-set test.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::lp::{LinearProgram, LpStatus};
use crate::model::{BranchedSurfacePresentation, TrainTrack, WeightError, WeightVector};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy)]
pub enum ConeSource<'a> {
    Track(&'a TrainTrack),
    Surface(&'a BranchedSurfacePresentation),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeRepr {
    pub labels: Vec<String>,
    pub equalities: Vec<Vec<BigInt>>,
}

/// Vertices of the slice `sum w = 1` of a cone, sorted in decreasing
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellVertices {
    pub labels: Vec<String>,
    pub vertices: Vec<Vec<Rational>>,
}

impl CellVertices {
    pub fn weight_vectors(&self) -> Vec<WeightVector> {
        self.vertices
            .iter()
            .map(|v| WeightVector::new(self.labels.clone(), v.clone()).expect("vertices are nonnegative"))
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "labels": self.labels,
            "vertices": self.vertices.iter().map(|v| rational::vec_to_json(v)).collect::<Vec<_>>(),
        })
    }
}

pub fn build_cone(source: ConeSource<'_>) -> ConeRepr {
    let (labels, rows) = match source {
        ConeSource::Track(t) => (t.segment_ids(), t.switch_matrix()),
        ConeSource::Surface(b) => (b.sector_ids(), b.equation_matrix()),
    };
    ConeRepr {
        labels,
        equalities: rows
            .into_iter()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect(),
    }
}

impl ConeRepr {
    pub fn new(labels: Vec<String>, equalities: Vec<Vec<BigInt>>) -> Self {
        ConeRepr { labels, equalities }
    }

    pub fn from_track(track: &TrainTrack) -> Self {
        build_cone(ConeSource::Track(track))
    }

    pub fn from_surface(bs: &BranchedSurfacePresentation) -> Self {
        build_cone(ConeSource::Surface(bs))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn rational_rows(&self) -> Vec<Vec<Rational>> {
        self.equalities
            .iter()
            .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect()
    }

    /// Dimension of the solution space of `E w = 0`.
    pub fn solution_dimension(&self) -> usize {
        self.len() - crate::linalg::rank(&self.rational_rows(), self.len())
    }

    pub fn satisfies_equalities(&self, w: &[Rational]) -> bool {
        self.equalities.iter().all(|row| {
            row.iter()
                .zip(w)
                .map(|(a, x)| Rational::from_integer(a.clone()) * x)
                .sum::<Rational>()
                .is_zero()
        })
    }

    /// Exact membership for a raw vector aligned with `labels`.
    pub fn contains_values(&self, w: &[Rational]) -> bool {
        w.len() == self.len() && rational::is_nonnegative(w) && self.satisfies_equalities(w)
    }

    pub fn contains(&self, w: &WeightVector) -> Result<bool, WeightError> {
        w.expect_labels(&self.labels)?;
        Ok(self.contains_values(w.values()))
    }

    pub fn cell_vertices(&self) -> CellVertices {
        let mut vertices: Vec<Vec<Rational>> = extreme_rays(self.len(), &self.equalities)
            .iter()
            .map(|r| normalize_to_cell(r))
            .collect();
        vertices.sort_by(|a, b| b.cmp(a));
        vertices.dedup();
        CellVertices {
            labels: self.labels.clone(),
            vertices,
        }
    }

    /// True when the only weight vector is zero.
    pub fn is_zero_cone(&self) -> bool {
        self.cell_vertices().vertices.is_empty()
    }

    /// A primitive integer point with every entry positive, when the cone
    /// meets the open orthant ("fully carried" weights). The sum of all
    /// extreme rays is positive in a coordinate iff some cone point is.
    pub fn interior_point(&self) -> Option<WeightVector> {
        let cell = self.cell_vertices();
        if cell.vertices.is_empty() {
            return None;
        }
        let mut sum = vec![Rational::zero(); self.len()];
        for v in &cell.vertices {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
        }
        if !sum.iter().all(Signed::is_positive) {
            return None;
        }
        let values = rational::primitive_integer(&sum)
            .into_iter()
            .map(Rational::from_integer)
            .collect();
        WeightVector::new(self.labels.clone(), values).ok()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "labels": self.labels,
            "equalities": self.equalities.iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "solution_dimension": self.solution_dimension(),
        })
    }
}

fn normalize_to_cell(ray: &[BigInt]) -> Vec<Rational> {
    let total: BigInt = ray.iter().sum();
    ray.iter()
        .map(|x| Rational::new(x.clone(), total.clone()))
        .collect()
}

fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
    v
}

/// Zero set of a ray as a bitset over coordinates.
fn zero_set(ray: &[BigInt]) -> Vec<u64> {
    let mut bits = vec![0u64; ray.len().div_ceil(64)];
    for (i, x) in ray.iter().enumerate() {
        if x.is_zero() {
            bits[i / 64] |= 1 << (i % 64);
        }
    }
    bits
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// Extreme rays of `{x in R^n : rows x = 0, x >= 0}` as primitive integer vectors.
pub fn extreme_rays(n: usize, rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut rays: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut e = vec![BigInt::zero(); n];
            e[i] = BigInt::one();
            e
        })
        .collect();
    for row in rows {
        if row.iter().all(Zero::is_zero) {
            continue;
        }
        let values: Vec<BigInt> = rays
            .iter()
            .map(|r| row.iter().zip(r).map(|(a, x)| a * x).sum())
            .collect();
        let zsets: Vec<Vec<u64>> = rays.iter().map(|r| zero_set(r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        let mut next: Vec<Vec<BigInt>> = (0..rays.len())
            .filter(|&i| values[i].is_zero())
            .map(|i| rays[i].clone())
            .collect();
        for &p in &pos {
            for &q in &neg {
                let common: Vec<u64> = zsets[p].iter().zip(&zsets[q]).map(|(a, b)| a & b).collect();
                let adjacent = (0..rays.len())
                    .all(|r| r == p || r == q || !subset(&common, &zsets[r]));
                if !adjacent {
                    continue;
                }
                let a = &values[p];
                let b = -&values[q];
                let combined: Vec<BigInt> = rays[p]
                    .iter()
                    .zip(&rays[q])
                    .map(|(x, y)| &b * x + a * y)
                    .collect();
                next.push(primitive(combined));
            }
        }
        rays = next;
    }
    rays
}

/// Integer matrix `D` with `D[s][Z]` = multiplicity of segment `s` in the boundary of `Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMap {
    pub segments: Vec<String>,
    pub sectors: Vec<String>,
    pub matrix: Vec<Vec<i64>>,
}

pub fn boundary_map(bs: &BranchedSurfacePresentation) -> BoundaryMap {
    BoundaryMap {
        segments: bs.boundary_track.segment_ids(),
        sectors: bs.sector_ids(),
        matrix: bs.incidence_matrix(),
    }
}

impl BoundaryMap {
    pub fn entry(&self, segment: &str, sector: &str) -> Option<i64> {
        let i = self.segments.iter().position(|s| s == segment)?;
        let j = self.sectors.iter().position(|s| s == sector)?;
        Some(self.matrix[i][j])
    }

    pub fn column_sums(&self) -> Vec<i64> {
        (0..self.sectors.len())
            .map(|j| self.matrix.iter().map(|r| r[j]).sum())
            .collect()
    }

    pub fn apply_values(&self, v: &[Rational]) -> Vec<Rational> {
        self.matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .map(|(&d, x)| Rational::from_integer(d.into()) * x)
                    .sum()
            })
            .collect()
    }

    /// `boundary(v)` as a weight vector on the boundary track.
    pub fn apply(&self, v: &WeightVector) -> Result<WeightVector, WeightError> {
        v.expect_labels(&self.sectors)?;
        WeightVector::new(self.segments.clone(), self.apply_values(v.values()))
    }

    pub fn rational_rows(&self) -> Vec<Vec<Rational>> {
        crate::linalg::from_integers(&self.matrix)
    }
}

/// `{v in C(B) : boundary(v) = w}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberPolytope {
    pub cone: ConeRepr,
    pub boundary: BoundaryMap,
    pub target: WeightVector,
}

pub const SCALE_LABEL: &str = "@scale";

pub fn fiber_polytope(
    bs: &BranchedSurfacePresentation,
    w: &WeightVector,
) -> Result<FiberPolytope, WeightError> {
    let boundary = boundary_map(bs);
    w.expect_labels(&boundary.segments)?;
    Ok(FiberPolytope {
        cone: ConeRepr::from_surface(bs),
        boundary,
        target: w.clone(),
    })
}

impl FiberPolytope {
    /// Standard-form constraints `[E; D] v = [0; w]`.
    pub fn linear_program(&self) -> LinearProgram {
        let mut a = self.cone.rational_rows();
        let mut b = vec![Rational::zero(); a.len()];
        a.extend(self.boundary.rational_rows());
        b.extend(self.target.values().iter().cloned());
        LinearProgram::new(a, b, self.cone.len())
    }

    pub fn is_empty(&self) -> bool {
        self.linear_program().feasible_point().is_none()
    }

    /// Cone over the polytope: variables `(v, s)` with `E v = 0`, `D v = s w`.
    /// Extreme rays with `s > 0` are the polytope's vertices; rays with
    /// `s = 0` span its recession cone.
    pub fn homogenized_cone(&self) -> ConeRepr {
        let n = self.cone.len();
        let mut labels = self.cone.labels.clone();
        labels.push(SCALE_LABEL.to_string());
        let mut rows: Vec<Vec<BigInt>> = self
            .cone
            .equalities
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.push(BigInt::zero());
                r
            })
            .collect();
        let scale = rational::denominator_lcm(self.target.values());
        for (row, wi) in self.boundary.matrix.iter().zip(self.target.values()) {
            let mut r: Vec<BigInt> = row.iter().map(|&d| BigInt::from(d) * &scale).collect();
            r.push(-(wi * Rational::from_integer(scale.clone())).to_integer());
            rows.push(r);
        }
        debug_assert!(rows.iter().all(|r| r.len() == n + 1));
        ConeRepr::new(labels, rows)
    }

    fn split_rays(&self) -> (Vec<Vec<Rational>>, Vec<Vec<Rational>>) {
        let n = self.cone.len();
        let mut vertices = Vec::new();
        let mut recession = Vec::new();
        for ray in self.homogenized_cone().cell_vertices().vertices {
            let s = ray[n].clone();
            if s.is_zero() {
                recession.push(ray[..n].to_vec());
            } else {
                vertices.push(ray[..n].iter().map(|x| x / &s).collect());
            }
        }
        vertices.sort_by(|a: &Vec<Rational>, b| b.cmp(a));
        vertices.dedup();
        (vertices, recession)
    }

    /// All vertices, by double description on the homogenized cone.
    pub fn vertices(&self) -> Vec<Vec<Rational>> {
        self.split_rays().0
    }

    /// Extreme rays of `{v in C(B) : boundary(v) = 0}`, normalized to sum 1.
    pub fn recession_rays(&self) -> Vec<Vec<Rational>> {
        self.split_rays().1
    }

    pub fn contains_values(&self, v: &[Rational]) -> bool {
        self.cone.contains_values(v) && self.boundary.apply_values(v) == self.target.values()
    }

    pub fn status(&self, objective: &[Rational]) -> LpStatus {
        self.linear_program().maximize(objective)
    }
}
