//! Independent oracles and random instance generators shared by the
//! integration tests. Nothing here calls the library's solvers.
#![allow(dead_code)]

use std::collections::HashSet;
use std::sync::Arc;

use lamcone::model::{
    BranchEquation, BranchedSurfacePresentation, EndRef, Sector, Segment, Switch, TrainTrack,
    WeightVector,
};
use lamcone::rational::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn qr(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

/// Unique solution of `a x = b`, if the system is consistent and of full column rank.
pub fn solve_unique(a: &[Vec<Rational>], b: &[Rational], n: usize) -> Option<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..n {
        let Some(p) = (pivot_row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, p);
        let inv = m[pivot_row][col].recip();
        for x in m[pivot_row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..m.len() {
            if r != pivot_row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot = m[pivot_row].clone();
                for (x, p) in m[r].iter_mut().zip(&pivot) {
                    *x -= p * &f;
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    if m[pivot_row..].iter().any(|r| !r[n].is_zero()) || pivots.len() < n {
        return None;
    }
    Some((0..n).map(|i| m[i][n].clone()).collect())
}

/// Vertices of `{x >= 0 : a x = b}` by trying every set of coordinates
/// forced to zero. Exponential, so only for small `n`.
pub fn tight_vertices(a: &[Vec<Rational>], b: &[Rational], n: usize) -> Vec<Vec<Rational>> {
    assert!(n <= 12, "brute force is for small instances");
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for mask in 0u32..(1 << n) {
        let mut rows = a.to_vec();
        let mut rhs = b.to_vec();
        for i in (0..n).filter(|i| mask & (1 << i) != 0) {
            let mut e = vec![q(0); n];
            e[i] = q(1);
            rows.push(e);
            rhs.push(q(0));
        }
        if let Some(x) = solve_unique(&rows, &rhs, n) {
            if x.iter().all(|v| !v.is_negative()) && !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out.sort();
    out
}

pub fn int_rows(rows: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
}

/// Vertices of the slice `sum x = 1` of `{x >= 0 : rows x = 0}`.
pub fn cell_oracle(rows: &[Vec<i64>], n: usize) -> Vec<Vec<Rational>> {
    let mut a = int_rows(rows);
    let mut b = vec![q(0); a.len()];
    a.push(vec![q(1); n]);
    b.push(q(1));
    tight_vertices(&a, &b, n)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleX {
    Infeasible,
    Finite(Rational),
    Unbounded,
}

pub fn chi_g(z: &Sector) -> Rational {
    q(z.euler_char) - qr(z.corners as i64, 4)
}

/// Boundary multiplicity of sector `j` on segment `i`, counted by hand.
pub fn incidence(bs: &BranchedSurfacePresentation) -> Vec<Vec<Rational>> {
    bs.boundary_track
        .segments
        .iter()
        .map(|seg| {
            bs.sectors
                .iter()
                .map(|z| q(z.boundary.iter().filter(|b| **b == seg.id).count() as i64))
                .collect()
        })
        .collect()
}

pub fn branch_rows(bs: &BranchedSurfacePresentation) -> Vec<Vec<Rational>> {
    bs.equations
        .iter()
        .map(|e| {
            bs.sectors
                .iter()
                .map(|z| {
                    q(e.terms
                        .iter()
                        .filter(|(_, s)| *s == z.id)
                        .map(|(c, _)| *c)
                        .sum())
                })
                .collect()
        })
        .collect()
}

/// Max of chi over the fiber polytope by vertex enumeration, with
/// unboundedness read off the recession cone's rays.
pub fn x_oracle(bs: &BranchedSurfacePresentation, w: &[Rational]) -> OracleX {
    let n = bs.sectors.len();
    let chi: Vec<Rational> = bs.sectors.iter().map(chi_g).collect();
    let eval = |v: &[Rational]| -> Rational { v.iter().zip(&chi).map(|(a, b)| a * b).sum() };
    let mut a = branch_rows(bs);
    let mut b = vec![q(0); a.len()];
    for (row, wi) in incidence(bs).into_iter().zip(w) {
        a.push(row);
        b.push(wi.clone());
    }
    let vertices = tight_vertices(&a, &b, n);
    if vertices.is_empty() {
        return OracleX::Infeasible;
    }
    let mut ra = a.clone();
    let mut rb = vec![q(0); ra.len()];
    ra.push(vec![q(1); n]);
    rb.push(q(1));
    if tight_vertices(&ra, &rb, n).iter().any(|r| eval(r).is_positive()) {
        return OracleX::Unbounded;
    }
    OracleX::Finite(vertices.iter().map(|v| eval(v)).max().unwrap())
}

/// A random valid oriented track. Every switch gets at least one head and
/// one tail; sides are shuffled. Some segments may be closed curves.
pub fn random_track(r: &mut Rng8, max_segments: usize, allow_closed: bool) -> TrainTrack {
    let max_segments = max_segments.max(1);
    let closed = if allow_closed && r.gen_bool(0.3) {
        r.gen_range(1..=max_segments.min(2))
    } else {
        0
    };
    let open_budget = max_segments - closed;
    if open_budget == 0 {
        let segs = (0..closed).map(|i| Segment::closed(format!("o{i}"))).collect();
        return TrainTrack::new("R", segs, vec![]);
    }
    let n_sw = r.gen_range(1..=open_budget.min(3));
    let n_seg = r.gen_range(n_sw..=open_budget);
    let shift = r.gen_range(0..n_sw);
    let mut head = Vec::new();
    let mut tail = Vec::new();
    for i in 0..n_seg {
        if i < n_sw {
            head.push(i);
            tail.push((i + shift) % n_sw);
        } else {
            head.push(r.gen_range(0..n_sw));
            tail.push(r.gen_range(0..n_sw));
        }
    }
    let mut switches = Vec::new();
    for s in 0..n_sw {
        let mut a: Vec<EndRef> = (0..n_seg)
            .filter(|&i| head[i] == s)
            .map(|i| EndRef::head(format!("s{i}")))
            .collect();
        let mut b: Vec<EndRef> = (0..n_seg)
            .filter(|&i| tail[i] == s)
            .map(|i| EndRef::tail(format!("s{i}")))
            .collect();
        a.shuffle(r);
        b.shuffle(r);
        switches.push(Switch {
            id: format!("v{s}"),
            side_a: a,
            side_b: b,
        });
    }
    let mut segments: Vec<Segment> = (0..n_seg).map(|i| Segment::new(format!("s{i}"))).collect();
    segments.extend((0..closed).map(|i| Segment::closed(format!("o{i}"))));
    TrainTrack::new("R", segments, switches)
}

/// One directed cycle of the track graph as a 0/1-ish visit vector.
fn random_cycle(r: &mut Rng8, t: &TrainTrack) -> Vec<i64> {
    let open: Vec<usize> = (0..t.segments.len()).filter(|&i| !t.segments[i].closed).collect();
    let mut counts = vec![0i64; t.segments.len()];
    if open.is_empty() {
        return counts;
    }
    let mut path = vec![*open.choose(r).unwrap()];
    loop {
        let last = *path.last().unwrap();
        let sw = t
            .switches
            .iter()
            .find(|sw| sw.side_a.iter().any(|e| e.segment == t.segments[last].id))
            .unwrap();
        let next_id = &sw.side_b.choose(r).unwrap().segment;
        let next = t.segment_index(next_id).unwrap();
        if let Some(start) = path.iter().position(|&s| s == next) {
            for &s in &path[start..] {
                counts[s] += 1;
            }
            return counts;
        }
        path.push(next);
    }
}

/// Integer weights satisfying every switch equation: a sum of random cycles,
/// capped entrywise at `max`.
pub fn random_int_weights(r: &mut Rng8, t: &TrainTrack, max: i64) -> Vec<i64> {
    let mut w = vec![0i64; t.segments.len()];
    let rounds = r.gen_range(1..=4);
    for _ in 0..rounds {
        let c = random_cycle(r, t);
        let k = r.gen_range(1..=3);
        let trial: Vec<i64> = w.iter().zip(&c).map(|(a, b)| a + k * b).collect();
        if trial.iter().all(|&x| x <= max) {
            w = trial;
        }
    }
    for (i, s) in t.segments.iter().enumerate() {
        if s.closed {
            w[i] = r.gen_range(0..=max.min(3));
        }
    }
    w
}

/// Rational weights on the track whose common denominator is at most `max_den`.
pub fn random_rational_weights(r: &mut Rng8, t: &TrainTrack, max_den: i64) -> Vec<Rational> {
    loop {
        let mut w = vec![q(0); t.segments.len()];
        for _ in 0..r.gen_range(1..=3) {
            let c = random_cycle(r, t);
            let coeff = qr(r.gen_range(1..=30), r.gen_range(1..=100));
            for (x, k) in w.iter_mut().zip(&c) {
                *x += &coeff * q(*k);
            }
        }
        for (i, s) in t.segments.iter().enumerate() {
            if s.closed {
                w[i] = qr(r.gen_range(0..=5), r.gen_range(1..=20));
            }
        }
        let lcm = w.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        if lcm <= BigInt::from(max_den) {
            return w;
        }
    }
}

pub fn weights_on(t: &TrainTrack, w: &[Rational]) -> WeightVector {
    WeightVector::new(t.segment_ids(), w.to_vec()).unwrap()
}

pub fn int_weights_on(t: &TrainTrack, w: &[i64]) -> WeightVector {
    weights_on(t, &w.iter().map(|&x| q(x)).collect::<Vec<_>>())
}

/// A random presentation with at most `max_sectors` sectors over a random
/// track of at most `max_segments` segments.
pub fn random_presentation(
    r: &mut Rng8,
    max_sectors: usize,
    max_segments: usize,
) -> BranchedSurfacePresentation {
    let track = Arc::new(random_track(r, max_segments, true));
    random_presentation_on(r, "P", track, max_sectors)
}

pub fn random_presentation_on(
    r: &mut Rng8,
    name: &str,
    track: Arc<TrainTrack>,
    max_sectors: usize,
) -> BranchedSurfacePresentation {
    let ids = track.segment_ids();
    let n = r.gen_range(1..=max_sectors);
    let sectors: Vec<Sector> = (0..n)
        .map(|i| {
            let nb = if ids.is_empty() { 0 } else { r.gen_range(0..=3) };
            let boundary: Vec<String> = (0..nb).map(|_| ids.choose(r).unwrap().clone()).collect();
            let mut z = Sector::new(format!("{name}z{i}"), r.gen_range(-3..=1), r.gen_range(0..=4));
            z.boundary = boundary;
            z
        })
        .collect();
    let eqs: Vec<BranchEquation> = (0..r.gen_range(0..=2))
        .map(|_| {
            let mut terms: Vec<(i64, String)> = Vec::new();
            for j in 0..n {
                if r.gen_bool(0.5) {
                    terms.push((r.gen_range(-2..=2), format!("{name}z{j}")));
                }
            }
            BranchEquation::new(terms)
        })
        .collect();
    BranchedSurfacePresentation::new(name, sectors, eqs, track, true, true)
}

/// Members whose sectors have nonpositive chi_g and nonempty boundary, so
/// chi is bounded on every fiber.
pub fn random_bounded_member(
    r: &mut Rng8,
    name: &str,
    track: Arc<TrainTrack>,
    max_sectors: usize,
) -> BranchedSurfacePresentation {
    let ids = track.segment_ids();
    let n = r.gen_range(1..=max_sectors);
    let sectors: Vec<Sector> = (0..n)
        .map(|i| {
            let nb = r.gen_range(1..=3);
            let boundary: Vec<String> = (0..nb).map(|_| ids.choose(r).unwrap().clone()).collect();
            let mut z = Sector::new(format!("{name}z{i}"), r.gen_range(-4..=0), r.gen_range(0..=3));
            z.boundary = boundary;
            z
        })
        .collect();
    let eqs = if n >= 2 && r.gen_bool(0.4) {
        vec![BranchEquation::new([(1, format!("{name}z0")), (-1, format!("{name}z1"))])]
    } else {
        vec![]
    };
    BranchedSurfacePresentation::new(name, sectors, eqs, track, true, true)
}

/// Boundary of a random nonnegative integer combination of cone cell
/// vertices, so that the fiber is nonempty; or, half the time, arbitrary
/// small weights.
pub fn random_boundary(r: &mut Rng8, bs: &BranchedSurfacePresentation) -> Vec<Rational> {
    let m = bs.boundary_track.segments.len();
    if r.gen_bool(0.5) {
        return (0..m).map(|_| q(r.gen_range(0..=3))).collect();
    }
    let mut a = branch_rows(bs);
    let n = bs.sectors.len();
    let mut b = vec![q(0); a.len()];
    a.push(vec![q(1); n]);
    b.push(q(1));
    let verts = tight_vertices(&a, &b, n);
    let mut v = vec![q(0); n];
    for vert in &verts {
        let c = q(r.gen_range(0..=3));
        for (x, y) in v.iter_mut().zip(vert) {
            *x += &c * y;
        }
    }
    incidence(bs)
        .iter()
        .map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Component lengths of the strand model, by union-find over strands.
pub fn strand_oracle(t: &TrainTrack, w: &[i64]) -> Vec<usize> {
    let mut base = Vec::new();
    let mut total = 0usize;
    for &x in w {
        base.push(total);
        total += x as usize;
    }
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for sw in &t.switches {
        let stack = |side: &[EndRef]| -> Vec<usize> {
            side.iter()
                .flat_map(|e| {
                    let s = t.segment_index(&e.segment).unwrap();
                    (0..w[s] as usize).map(move |k| (s, k))
                })
                .map(|(s, k)| base[s] + k)
                .collect()
        };
        let incoming = stack(&sw.side_a);
        let outgoing = stack(&sw.side_b);
        assert_eq!(incoming.len(), outgoing.len(), "switch equation");
        for (a, b) in incoming.into_iter().zip(outgoing) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
    }
    let mut sizes = std::collections::HashMap::new();
    for x in 0..total {
        let root = find(&mut parent, x);
        *sizes.entry(root).or_insert(0usize) += 1;
    }
    let mut out: Vec<usize> = sizes.into_values().collect();
    out.sort();
    out
}

/// Direct integer simulation of every separatrix. Returns true when some
/// realized cusp's separatrix ends at a cusp.
pub fn orbit_oracle_reducible(t: &TrainTrack, w: &[Rational]) -> bool {
    let lcm = w.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let wi: Vec<i64> = w
        .iter()
        .map(|x| (x * Rational::from_integer(lcm.clone())).to_integer().to_i64().unwrap())
        .collect();
    let idx = |e: &EndRef| t.segment_index(&e.segment).unwrap();
    let prefix = |side: &[EndRef]| -> Vec<i64> {
        let mut acc = vec![0];
        for e in side {
            acc.push(acc.last().unwrap() + wi[idx(e)]);
        }
        acc
    };
    let realized_at = |side: &[EndRef], h: i64| -> bool {
        let p = prefix(side);
        let total = *p.last().unwrap();
        h > 0 && h < total && (0..side.len() - 1).any(|g| p[g + 1] == h && wi[idx(&side[g])] > 0)
    };
    let bound: i64 = wi.iter().sum::<i64>() + 1;
    let mut any = false;
    for (si, sw) in t.switches.iter().enumerate() {
        for forward in [true, false] {
            let from = if forward { &sw.side_a } else { &sw.side_b };
            let p = prefix(from);
            for g in 0..from.len().saturating_sub(1) {
                let h = p[g + 1];
                if !(wi[idx(&from[g])] > 0 && h < *p.last().unwrap()) {
                    continue;
                }
                let mut cur = si;
                let mut height = h;
                let mut seen = HashSet::new();
                let mut steps = 0;
                let hit = loop {
                    let swc = &t.switches[cur];
                    let far = if forward { &swc.side_b } else { &swc.side_a };
                    if realized_at(far, height) {
                        break true;
                    }
                    let fp = prefix(far);
                    let pos = (0..far.len())
                        .find(|&j| wi[idx(&far[j])] > 0 && fp[j] < height && height < fp[j + 1])
                        .expect("strictly interior height");
                    let seg = idx(&far[pos]);
                    let rel = height - fp[pos];
                    if !seen.insert((seg, rel)) {
                        break false;
                    }
                    steps += 1;
                    assert!(steps <= bound, "orbit longer than the state count");
                    let (next, npos) = t
                        .switches
                        .iter()
                        .enumerate()
                        .find_map(|(k, s)| {
                            let side = if forward { &s.side_a } else { &s.side_b };
                            side.iter().position(|e| idx(e) == seg).map(|p| (k, p))
                        })
                        .unwrap();
                    let arrive = if forward { &t.switches[next].side_a } else { &t.switches[next].side_b };
                    height = prefix(arrive)[npos] + rel;
                    cur = next;
                    if realized_at(arrive, height) {
                        break true;
                    }
                };
                any |= hit;
            }
        }
    }
    any
}
