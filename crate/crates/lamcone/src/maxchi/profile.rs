//! Exact piecewise-linear profile of `X` along a segment `w(t) = w0 + t (w1 - w0)`.
//!
//! Each member's value function is concave in `t`. It is recovered exactly
//! by sandwiching between supporting lines read off LP duals, then the
//! family profile is the upper envelope of the member profiles.

use serde_json::{json, Value};

use crate::chi::ChiFunctional;
use crate::cones::{boundary_map, ConeRepr};
use crate::lp::{LinearProgram, LpStatus};
use crate::model::{BranchedSurfacePresentation, WeightError, WeightVector};
use crate::rational::{self, Rational};

use super::{Family, XValue};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub start: Rational,
    pub end: Rational,
    pub slope: Rational,
    pub intercept: Rational,
    /// Member attaining the maximum on this piece.
    pub witness: String,
}

impl Piece {
    pub fn value_at(&self, t: &Rational) -> Rational {
        &self.slope * t + &self.intercept
    }

    pub fn contains(&self, t: &Rational) -> bool {
        &self.start <= t && t <= &self.end
    }

    fn same_line(&self, other: &Piece) -> bool {
        self.slope == other.slope && self.intercept == other.intercept && self.witness == other.witness
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLProfile {
    pub w0: WeightVector,
    pub w1: WeightVector,
    /// Sorted by start; point pieces have `start == end`.
    pub pieces: Vec<Piece>,
    /// Maximal closed intervals of `[0, 1]` where some member is feasible.
    pub feasible: Vec<(Rational, Rational)>,
    /// Members with unbounded chi, with the interval where that happens.
    pub unbounded: Vec<(String, Rational, Rational)>,
}

impl PLProfile {
    pub fn value_at(&self, t: &Rational) -> XValue {
        if self.unbounded.iter().any(|(_, a, b)| a <= t && t <= b) {
            return XValue::Unbounded;
        }
        self.pieces
            .iter()
            .filter(|p| p.contains(t))
            .map(|p| p.value_at(t))
            .max()
            .map_or(XValue::Infeasible, XValue::Finite)
    }

    /// Interior breakpoints: piece boundaries strictly inside a feasible interval.
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self
            .pieces
            .windows(2)
            .filter(|w| w[0].end == w[1].start)
            .map(|w| w[0].end.clone())
            .collect();
        out.dedup();
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("start,end,slope,intercept,witness\n");
        for p in &self.pieces {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                p.start, p.end, p.slope, p.intercept, p.witness
            ));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "w0": self.w0.to_json(),
            "w1": self.w1.to_json(),
            "pieces": self.pieces.iter().map(|p| json!({
                "start": rational::to_json(&p.start),
                "end": rational::to_json(&p.end),
                "slope": rational::to_json(&p.slope),
                "intercept": rational::to_json(&p.intercept),
                "witness": p.witness,
            })).collect::<Vec<_>>(),
            "feasible": self.feasible.iter()
                .map(|(a, b)| json!([rational::to_json(a), rational::to_json(b)]))
                .collect::<Vec<_>>(),
            "unbounded": self.unbounded.iter()
                .map(|(m, a, b)| json!({"member": m, "from": rational::to_json(a), "to": rational::to_json(b)}))
                .collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone)]
struct Line {
    slope: Rational,
    intercept: Rational,
}

impl Line {
    fn at(&self, t: &Rational) -> Rational {
        &self.slope * t + &self.intercept
    }
}

#[derive(Debug, Clone)]
struct Seg {
    start: Rational,
    end: Rational,
    line: Line,
    member: usize,
}

enum MemberProfile {
    Infeasible,
    Unbounded(Rational, Rational),
    Segments(Vec<Seg>),
}

struct MemberLp {
    equalities: Vec<Vec<Rational>>,
    boundary: Vec<Vec<Rational>>,
    chi: Vec<Rational>,
    w0: Vec<Rational>,
    dir: Vec<Rational>,
}

impl MemberLp {
    fn new(bs: &BranchedSurfacePresentation, w0: &[Rational], dir: &[Rational]) -> Self {
        MemberLp {
            equalities: ConeRepr::from_surface(bs).rational_rows(),
            boundary: boundary_map(bs).rational_rows(),
            chi: ChiFunctional::of(bs).coefficients,
            w0: w0.to_vec(),
            dir: dir.to_vec(),
        }
    }

    fn n(&self) -> usize {
        self.chi.len()
    }

    /// The range of `t` in `[0, 1]` with a nonempty fiber, as LP over `(v, t, s)`.
    fn feasible_interval(&self) -> Option<(Rational, Rational)> {
        let n = self.n();
        let zero = Rational::from_integer(0.into());
        let one = Rational::from_integer(1.into());
        let mut a = Vec::new();
        let mut b = Vec::new();
        for row in &self.equalities {
            let mut r = row.clone();
            r.extend([zero.clone(), zero.clone()]);
            a.push(r);
            b.push(zero.clone());
        }
        for (i, row) in self.boundary.iter().enumerate() {
            let mut r = row.clone();
            r.extend([-&self.dir[i], zero.clone()]);
            a.push(r);
            b.push(self.w0[i].clone());
        }
        let mut last = vec![zero.clone(); n];
        last.extend([one.clone(), one.clone()]);
        a.push(last);
        b.push(one.clone());
        let lp = LinearProgram::new(a, b, n + 2);
        let mut c = vec![zero; n + 2];
        c[n] = one;
        let hi = lp.maximize_plain(&c).optimal()?.value.clone();
        c[n] = -&c[n];
        let lo = -lp.maximize_plain(&c).optimal()?.value.clone();
        Some((lo, hi))
    }

    /// `f(t)` and a supporting line of `f` through `(t, f(t))`.
    fn eval(&self, t: &Rational) -> LpStatus {
        let mut a = self.equalities.clone();
        let mut b = vec![Rational::from_integer(0.into()); a.len()];
        a.extend(self.boundary.iter().cloned());
        b.extend(self.w0.iter().zip(&self.dir).map(|(w, d)| w + d * t));
        LinearProgram::new(a, b, self.n()).maximize_plain(&self.chi)
    }

    fn tangent(&self, t: &Rational) -> (Rational, Line) {
        let sol = match self.eval(t) {
            LpStatus::Optimal(sol) => sol,
            other => panic!("member LP at feasible t = {t} returned {other:?}"),
        };
        let y = &sol.dual[self.equalities.len()..];
        let line = Line {
            slope: rational::dot(y, &self.dir),
            intercept: rational::dot(y, &self.w0),
        };
        debug_assert_eq!(line.at(t), sol.value);
        (sol.value, line)
    }

    fn profile(&self, member: usize) -> MemberProfile {
        let Some((lo, hi)) = self.feasible_interval() else {
            return MemberProfile::Infeasible;
        };
        if self.eval(&lo) == LpStatus::Unbounded {
            return MemberProfile::Unbounded(lo, hi);
        }
        let (f_lo, l_lo) = self.tangent(&lo);
        if lo == hi {
            let line = Line {
                slope: Rational::from_integer(0.into()),
                intercept: f_lo,
            };
            return MemberProfile::Segments(vec![Seg {
                start: lo.clone(),
                end: hi,
                line,
                member,
            }]);
        }
        let (f_hi, l_hi) = self.tangent(&hi);
        let mut out = Vec::new();
        self.sandwich((lo, f_lo, l_lo), (hi, f_hi, l_hi), member, &mut out);
        out.sort_by(|a, b| a.start.cmp(&b.start));
        MemberProfile::Segments(merge_segments(out))
    }

    fn sandwich(
        &self,
        a: (Rational, Rational, Line),
        b: (Rational, Rational, Line),
        member: usize,
        out: &mut Vec<Seg>,
    ) {
        let (ta, fa, la) = a;
        let (tb, fb, lb) = b;
        let seg = |line: Line, s: &Rational, e: &Rational| Seg {
            start: s.clone(),
            end: e.clone(),
            line,
            member,
        };
        if la.at(&tb) == fb {
            out.push(seg(la, &ta, &tb));
            return;
        }
        if lb.at(&ta) == fa {
            out.push(seg(lb, &ta, &tb));
            return;
        }
        // Tangents at the ends cross strictly inside (ta, tb).
        let t = (&lb.intercept - &la.intercept) / (&la.slope - &lb.slope);
        let (ft, lt) = self.tangent(&t);
        if ft == la.at(&t) {
            out.push(seg(la, &ta, &t));
            out.push(seg(lb, &t, &tb));
            return;
        }
        self.sandwich((ta, fa, la), (t.clone(), ft.clone(), lt.clone()), member, out);
        self.sandwich((t, ft, lt), (tb, fb, lb), member, out);
    }
}

fn merge_segments(segs: Vec<Seg>) -> Vec<Seg> {
    let mut out: Vec<Seg> = Vec::new();
    for s in segs {
        if let Some(last) = out.last_mut() {
            if last.end == s.start
                && last.line.slope == s.line.slope
                && last.line.intercept == s.line.intercept
            {
                last.end = s.end;
                continue;
            }
        }
        out.push(s);
    }
    out
}

/// Exact profile of `X` on `t in [0, 1]`.
pub fn profile(fam: &Family, w0: &WeightVector, w1: &WeightVector) -> Result<PLProfile, WeightError> {
    let labels = fam.boundary_track().segment_ids();
    w0.expect_labels(&labels)?;
    w1.expect_labels(&labels)?;
    let dir: Vec<Rational> = w1.values().iter().zip(w0.values()).map(|(b, a)| b - a).collect();

    use rayon::prelude::*;
    let members: Vec<MemberProfile> = fam
        .members
        .par_iter()
        .enumerate()
        .map(|(i, m)| MemberLp::new(m, w0.values(), &dir).profile(i))
        .collect();

    let mut segs = Vec::new();
    let mut intervals = Vec::new();
    let mut unbounded = Vec::new();
    for (i, mp) in members.into_iter().enumerate() {
        match mp {
            MemberProfile::Infeasible => {}
            MemberProfile::Unbounded(a, b) => {
                intervals.push((a.clone(), b.clone()));
                unbounded.push((fam.members[i].name.clone(), a, b));
            }
            MemberProfile::Segments(s) => {
                intervals.push((s[0].start.clone(), s[s.len() - 1].end.clone()));
                segs.extend(s);
            }
        }
    }
    let pieces = upper_envelope(&segs)
        .into_iter()
        .map(|s| Piece {
            start: s.start,
            end: s.end,
            slope: s.line.slope,
            intercept: s.line.intercept,
            witness: fam.members[s.member].name.clone(),
        })
        .collect();
    Ok(PLProfile {
        w0: w0.clone(),
        w1: w1.clone(),
        pieces: merge_pieces(pieces),
        feasible: merge_intervals(intervals),
        unbounded,
    })
}

/// Best segment at `t` among `candidates`: largest value, then smallest member.
fn best_at<'a>(candidates: impl Iterator<Item = &'a Seg>, t: &Rational) -> Option<&'a Seg> {
    candidates.fold(None, |best: Option<&Seg>, s| match best {
        None => Some(s),
        Some(b) => {
            let (vs, vb) = (s.line.at(t), b.line.at(t));
            if vs > vb || (vs == vb && s.member < b.member) {
                Some(s)
            } else {
                Some(b)
            }
        }
    })
}

fn upper_envelope(segs: &[Seg]) -> Vec<Seg> {
    let mut points: Vec<Rational> = segs
        .iter()
        .flat_map(|s| [s.start.clone(), s.end.clone()])
        .collect();
    points.sort();
    points.dedup();
    let two = Rational::from_integer(2.into());
    let mut out: Vec<Seg> = Vec::new();
    for w in points.windows(2) {
        let (p, q) = (&w[0], &w[1]);
        let active: Vec<&Seg> = segs.iter().filter(|s| &s.start <= p && q <= &s.end).collect();
        if active.is_empty() {
            continue;
        }
        let mut cuts = vec![p.clone(), q.clone()];
        for (i, a) in active.iter().enumerate() {
            for b in &active[i + 1..] {
                if a.line.slope != b.line.slope {
                    let t = (&b.line.intercept - &a.line.intercept) / (&a.line.slope - &b.line.slope);
                    if p < &t && &t < q {
                        cuts.push(t);
                    }
                }
            }
        }
        cuts.sort();
        cuts.dedup();
        for c in cuts.windows(2) {
            let mid = (&c[0] + &c[1]) / &two;
            let best = best_at(active.iter().copied(), &mid).expect("active is nonempty");
            out.push(Seg {
                start: c[0].clone(),
                end: c[1].clone(),
                ..best.clone()
            });
        }
    }
    // Isolated points, and points where a member is strictly better than
    // both one-sided limits of the envelope.
    for p in &points {
        let Some(best) = best_at(segs.iter().filter(|s| &s.start <= p && p <= &s.end), p) else {
            continue;
        };
        let covered = out
            .iter()
            .filter(|s| &s.start <= p && p <= &s.end)
            .map(|s| s.line.at(p))
            .max();
        if covered.is_none_or(|v| v < best.line.at(p)) {
            out.push(Seg {
                start: p.clone(),
                end: p.clone(),
                ..best.clone()
            });
        }
    }
    out.sort_by(|a, b| (&a.start, &a.end).cmp(&(&b.start, &b.end)));
    out
}

fn merge_pieces(pieces: Vec<Piece>) -> Vec<Piece> {
    let mut out: Vec<Piece> = Vec::new();
    for p in pieces {
        if let Some(last) = out.last_mut() {
            if last.end == p.start && last.same_line(&p) {
                last.end = p.end;
                continue;
            }
        }
        out.push(p);
    }
    out
}

fn merge_intervals(mut v: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    v.sort();
    let mut out: Vec<(Rational, Rational)> = Vec::new();
    for (a, b) in v {
        if let Some(last) = out.last_mut() {
            if a <= last.1 {
                if b > last.1 {
                    last.1 = b;
                }
                continue;
            }
        }
        out.push((a, b));
    }
    out
}
