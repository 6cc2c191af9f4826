//! Sampling audit of homogeneity, concavity and superadditivity of `X`.
//!
//! Probes run in two stages. The deterministic stage uses the cell vertices
//! of the boundary track's weight cone and their midpoints. The random stage
//! draws nonnegative combinations of those vertices from a seeded generator,
//! so a given seed always reproduces the same report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cones::ConeRepr;
use crate::rational::{ratio, Rational};
use crate::report::{AuditReport, Finding, FindingKind};

use super::{Family, FamilyEvaluator, XValue};

pub const DEFAULT_AUDIT_SEED: u64 = 0x1a3c_0de5;

#[derive(Debug, Clone)]
enum Probe {
    Homogeneity { w: Vec<Rational>, lambda: Rational },
    Concavity { w0: Vec<Rational>, w1: Vec<Rational>, t: Rational },
    Superadditivity { w0: Vec<Rational>, w1: Vec<Rational> },
}

pub fn audit_structure(fam: &Family, samples: usize) -> AuditReport {
    audit_structure_seeded(fam, samples, DEFAULT_AUDIT_SEED)
}

/// Runs the vertex probes plus `samples` random rounds of all three checks.
pub fn audit_structure_seeded(fam: &Family, samples: usize, seed: u64) -> AuditReport {
    let mut report = AuditReport::new(format!("structure audit of {}", fam.name));
    for name in fam.undeclared_members() {
        report
            .notes
            .push(format!("member {name} is not declared aspherical and oriented"));
    }
    let vertices = ConeRepr::from_track(fam.boundary_track()).cell_vertices().vertices;
    if vertices.is_empty() {
        report.notes.push("boundary cone is zero; only w = 0 is admissible".into());
        return report;
    }
    let probes = probes(&vertices, samples, seed);
    report.checks = probes.len();
    let eval = FamilyEvaluator::new(fam);
    let outcomes: Vec<Vec<Finding>> = probes.par_iter().map(|p| run_probe(&eval, p)).collect();
    let mut seen_unbounded = false;
    for finding in outcomes.into_iter().flatten() {
        if finding.kind == FindingKind::Unbounded {
            if seen_unbounded {
                continue;
            }
            seen_unbounded = true;
        }
        report.findings.push(finding);
    }
    report
}

fn probes(vertices: &[Vec<Rational>], samples: usize, seed: u64) -> Vec<Probe> {
    let mut out = Vec::new();
    let half = ratio(1, 2);
    for v in vertices {
        out.push(Probe::Homogeneity {
            w: v.clone(),
            lambda: ratio(2, 1),
        });
    }
    for (i, a) in vertices.iter().enumerate() {
        for b in &vertices[i + 1..] {
            out.push(Probe::Concavity {
                w0: a.clone(),
                w1: b.clone(),
                t: half.clone(),
            });
            out.push(Probe::Superadditivity {
                w0: a.clone(),
                w1: b.clone(),
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let w0 = random_point(vertices, &mut rng);
        let w1 = random_point(vertices, &mut rng);
        let lambda = ratio(rng.gen_range(1..=12), rng.gen_range(1..=6));
        let q = rng.gen_range(2..=12);
        let t = ratio(rng.gen_range(1..q), q);
        out.push(Probe::Homogeneity {
            w: w0.clone(),
            lambda,
        });
        out.push(Probe::Concavity {
            w0: w0.clone(),
            w1: w1.clone(),
            t,
        });
        out.push(Probe::Superadditivity { w0, w1 });
    }
    out
}

fn random_point(vertices: &[Vec<Rational>], rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let n = vertices[0].len();
    let mut w = vec![Rational::from_integer(0.into()); n];
    for v in vertices {
        if rng.gen_bool(0.5) {
            let c = ratio(rng.gen_range(1..=6), rng.gen_range(1..=3));
            for (x, y) in w.iter_mut().zip(v) {
                *x += &c * y;
            }
        }
    }
    w
}

fn combine(a: &[Rational], s: &Rational, b: &[Rational], t: &Rational) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x * s + y * t).collect()
}

fn unbounded_finding(label: &str, w: &[Rational]) -> Finding {
    Finding {
        kind: FindingKind::Unbounded,
        message: "X is unbounded; some member's asphericity declaration fails".into(),
        witness: vec![(label.into(), w.to_vec())],
    }
}

fn run_probe(eval: &FamilyEvaluator, probe: &Probe) -> Vec<Finding> {
    let x = |w: &[Rational]| eval.value(w);
    let one = Rational::from_integer(1.into());
    match probe {
        Probe::Homogeneity { w, lambda } => {
            let scaled: Vec<Rational> = w.iter().map(|v| v * lambda).collect();
            let (xw, xs) = (x(w), x(&scaled));
            if xw == XValue::Unbounded || xs == XValue::Unbounded {
                return vec![unbounded_finding("w", w)];
            }
            let expected = xw.scale(lambda);
            if xs == expected {
                return vec![];
            }
            vec![Finding {
                kind: FindingKind::Homogeneity,
                message: format!("X(lambda w) = {xs} but lambda X(w) = {expected}"),
                witness: vec![
                    ("w".into(), w.clone()),
                    ("lambda".into(), vec![lambda.clone()]),
                ],
            }]
        }
        Probe::Concavity { w0, w1, t } => {
            let s = &one - t;
            let mid = combine(w0, t, w1, &s);
            let (a, b, m) = (x(w0), x(w1), x(&mid));
            if [&a, &b, &m].contains(&&XValue::Unbounded) {
                return vec![unbounded_finding("w0", w0)];
            }
            let (Some(a), Some(b)) = (a.finite(), b.finite()) else {
                return vec![];
            };
            let bound = a * t + b * &s;
            let violated = match &m {
                XValue::Finite(q) => q < &bound,
                _ => true,
            };
            if !violated {
                return vec![];
            }
            let mut witness = vec![
                ("w0".into(), w0.clone()),
                ("w1".into(), w1.clone()),
                ("t".into(), vec![t.clone()]),
                ("bound".into(), vec![bound.clone()]),
            ];
            if let Some(q) = m.finite() {
                witness.push(("X(mid)".into(), vec![q.clone()]));
            }
            vec![Finding {
                kind: FindingKind::Concavity,
                message: format!("X(t w0 + (1-t) w1) = {m} < {bound} = t X(w0) + (1-t) X(w1)"),
                witness,
            }]
        }
        Probe::Superadditivity { w0, w1 } => {
            let sum = combine(w0, &one, w1, &one);
            let (a, b, c) = (x(w0), x(w1), x(&sum));
            if [&a, &b, &c].contains(&&XValue::Unbounded) {
                return vec![unbounded_finding("w0", w0)];
            }
            let (Some(a), Some(b)) = (a.finite(), b.finite()) else {
                return vec![];
            };
            let bound = a + b;
            let violated = match &c {
                XValue::Finite(q) => q < &bound,
                _ => true,
            };
            if !violated {
                return vec![];
            }
            let mut witness = vec![
                ("w0".into(), w0.clone()),
                ("w1".into(), w1.clone()),
                ("bound".into(), vec![bound.clone()]),
            ];
            if let Some(q) = c.finite() {
                witness.push(("X(sum)".into(), vec![q.clone()]));
            }
            vec![Finding {
                kind: FindingKind::Superadditivity,
                message: format!("X(w0 + w1) = {c} < {bound} = X(w0) + X(w1)"),
                witness,
            }]
        }
    }
}
