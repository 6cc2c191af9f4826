mod common;

use std::sync::Arc;

use common::*;
use lamcone::maxchi::{
    additivity_check, close_under_sums, profile, x_family, x_single, Family, XValue,
};
use lamcone::model::WeightVector;
use lamcone::parser::parse_document;
use lamcone::rational::Rational;
use proptest::prelude::*;
use rand::Rng;

fn as_oracle(x: &XValue) -> OracleX {
    match x {
        XValue::Infeasible => OracleX::Infeasible,
        XValue::Unbounded => OracleX::Unbounded,
        XValue::Finite(v) => OracleX::Finite(v.clone()),
    }
}

#[test]
fn torus_handle_values() {
    let doc = parse_document(&fixture("torus-handle.lam")).unwrap();
    let w = &doc.weights("W1").unwrap().vector;
    let bg = x_single(doc.presentation("BG").unwrap(), w).unwrap();
    let bh = x_single(doc.presentation("BH").unwrap(), w).unwrap();
    assert_eq!(bg.value, XValue::Finite(q(-3)));
    assert_eq!(bh.value, XValue::Finite(qr(-1, 3)));
    let fam = doc.family("F").unwrap().unwrap();
    let res = x_family(&fam, w).unwrap();
    assert_eq!(res.value, XValue::Finite(qr(-1, 3)));
    assert_eq!(res.witnesses.len(), 1);
    assert_eq!(res.witnesses[0].presentation, "BH");
    assert_eq!(res.witnesses[0].v.values(), &[qr(1, 3)]);
}

#[test]
fn sphere_is_unbounded() {
    let doc = parse_document(&fixture("sphere-audit.lam")).unwrap();
    let fam = doc.family("F").unwrap().unwrap();
    let res = x_family(&fam, &doc.weights("W1").unwrap().vector).unwrap();
    assert_eq!(res.value, XValue::Unbounded);
    assert_eq!(res.unbounded, vec!["BS".to_string()]);
}

#[test]
fn adversarial_profile_kinks_at_the_midpoint() {
    let doc = parse_document(&fixture("adversarial-pair.lam")).unwrap();
    let fam = doc.family("P").unwrap().unwrap();
    let e1 = &doc.weights("E1").unwrap().vector;
    let e2 = &doc.weights("E2").unwrap().vector;
    let p = profile(&fam, e1, e2).unwrap();
    assert_eq!(p.breakpoints(), vec![qr(1, 2)]);
    assert_eq!(p.value_at(&qr(1, 2)), XValue::Finite(qr(-11, 2)));
    let m = &doc.weights("M").unwrap().vector;
    assert_eq!(x_family(&fam, m).unwrap().value, XValue::Finite(qr(-11, 2)));
    // Closing under sums adds B1.B2, which carries the midpoint at -1.
    let closed = close_under_sums(&fam);
    assert_eq!(x_family(&closed, m).unwrap().value, XValue::Finite(q(-1)));
}

#[test]
fn interior_flag_tracks_zero_sectors() {
    let doc = parse_document(&fixture("adversarial-pair.lam")).unwrap();
    let fam = doc.family("P").unwrap().unwrap();
    // At E1 the best carrier B1 must leave B1b empty.
    let res = x_family(&fam, &doc.weights("E1").unwrap().vector).unwrap();
    assert_eq!(res.witnesses[0].presentation, "B1");
    assert!(!res.witnesses[0].interior);
    // At M both sectors of B1 carry weight.
    let res = x_family(&fam, &doc.weights("M").unwrap().vector).unwrap();
    assert!(res.witnesses.iter().all(|w| w.interior));
}

#[test]
fn additivity_over_disjoint_tracks() {
    let a = parse_document(&fixture("torus-handle.lam")).unwrap();
    let b = parse_document(&fixture("adversarial-pair.lam")).unwrap();
    let fa = a.family("F").unwrap().unwrap();
    let fb = close_under_sums(&b.family("P").unwrap().unwrap());
    let wa = &a.weights("W1").unwrap().vector;
    let wb = &b.weights("M").unwrap().vector;
    let r = additivity_check(&[(&fa, wa), (&fb, wb)]).unwrap();
    assert!(r.holds());
    assert_eq!(r.sum, XValue::Finite(qr(-4, 3)));
}

fn random_family(r: &mut Rng8, members: usize) -> Family {
    let t = Arc::new(random_track(r, 4, true));
    let ms = (0..members)
        .map(|k| Arc::new(random_bounded_member(r, &format!("M{k}"), t.clone(), 3)))
        .collect();
    Family::new("F", ms).unwrap()
}

fn random_w(r: &mut Rng8, fam: &Family) -> WeightVector {
    let t = fam.boundary_track();
    let vals: Vec<Rational> = (0..t.segments.len()).map(|_| qr(r.gen_range(0..=4), r.gen_range(1..=3))).collect();
    weights_on(t, &vals)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lp_matches_vertex_enumeration(seed in any::<u64>()) {
        let mut r = rng(seed);
        let b = random_presentation(&mut r, 8, 5);
        let w = random_boundary(&mut r, &b);
        let got = x_single(&b, &weights_on(&b.boundary_track, &w)).unwrap();
        prop_assert_eq!(as_oracle(&got.value), x_oracle(&b, &w));
        if let Some(v) = &got.witness {
            let chi: Rational = b.sectors.iter().zip(v.values()).map(|(z, x)| chi_g(z) * x).sum();
            prop_assert_eq!(XValue::Finite(chi), got.value.clone());
        }
    }

    #[test]
    fn homogeneity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let fam = random_family(&mut r, 2);
        let w = random_w(&mut r, &fam);
        let lam = qr(r.gen_range(1..=12), r.gen_range(1..=7));
        let x = x_family(&fam, &w).unwrap().value;
        let xl = x_family(&fam, &w.scale(&lam).unwrap()).unwrap().value;
        prop_assert_eq!(xl, x.scale(&lam));
    }

    #[test]
    fn members_are_superadditive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let b = random_presentation(&mut r, 6, 4);
        let w0 = weights_on(&b.boundary_track, &random_boundary(&mut r, &b));
        let w1 = weights_on(&b.boundary_track, &random_boundary(&mut r, &b));
        let x0 = x_single(&b, &w0).unwrap().value;
        let x1 = x_single(&b, &w1).unwrap().value;
        let xs = x_single(&b, &w0.add(&w1).unwrap()).unwrap().value;
        if let (XValue::Finite(_), XValue::Finite(_)) = (&x0, &x1) {
            prop_assert!(xs >= x0.add(&x1), "{} < {} + {}", xs, x0, x1);
        }
    }

    #[test]
    fn profile_matches_pointwise(seed in any::<u64>()) {
        let mut r = rng(seed);
        let fam = random_family(&mut r, 3);
        let w0 = random_w(&mut r, &fam);
        let w1 = random_w(&mut r, &fam);
        let p = profile(&fam, &w0, &w1).unwrap();
        for _ in 0..32 {
            let d = r.gen_range(1..=40);
            let t = qr(r.gen_range(0..=d), d);
            let w = w0.lerp(&w1, &t).unwrap();
            prop_assert_eq!(p.value_at(&t), x_family(&fam, &w).unwrap().value, "t = {}", t);
        }
    }

    #[test]
    fn closing_never_decreases(seed in any::<u64>()) {
        let mut r = rng(seed);
        let fam = random_family(&mut r, 2);
        let closed = close_under_sums(&fam);
        for _ in 0..4 {
            let w = random_w(&mut r, &fam);
            let before = x_family(&fam, &w).unwrap().value;
            let after = x_family(&closed, &w).unwrap().value;
            prop_assert!(after >= before);
        }
    }
}
