mod common;

use common::*;
use lamcone::dynamics::{
    components, is_irreducible, pinch, required_steps, split_at_cusp, steps_as_u64, strand_model,
    trace_separatrix, Direction, DynamicsError, Irreducibility, TraceOutcome,
};
use lamcone::model::{CuspId, Side, TrainTrack, WeightVector};
use lamcone::parser::parse_document;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn lengths(t: &TrainTrack, w: &WeightVector) -> Vec<usize> {
    let mut l: Vec<usize> = components(&strand_model(t, w).unwrap())
        .iter()
        .map(|c| c.length)
        .collect();
    l.sort();
    l
}

#[test]
fn theta_fixture() {
    let doc = parse_document(&fixture("theta.lam")).unwrap();
    let t = doc.track("T").unwrap();
    let w = &doc.weights("W").unwrap().vector;
    assert_eq!(lengths(t, w), vec![2, 2]);
    let r = trace_separatrix(t, w, &"s1:B:0".parse().unwrap(), Direction::Backward, 100).unwrap();
    assert_eq!(
        r.outcome,
        TraceOutcome::HitsCusp {
            target: CuspId::new("s2", Side::A, 0),
            steps: 1
        }
    );
    let err = trace_separatrix(t, w, &"s1:B:0".parse().unwrap(), Direction::Forward, 100).unwrap_err();
    assert!(matches!(err, DynamicsError::Direction { .. }));
    // A zero branch hides both cusps.
    let z = &doc.weights("Z").unwrap().vector;
    let err = trace_separatrix(t, z, &"s1:B:0".parse().unwrap(), Direction::Backward, 100).unwrap_err();
    assert!(matches!(err, DynamicsError::CuspNotRealized(_)));
    assert!(matches!(is_irreducible(t, z, 100).unwrap(), Irreducibility::Irreducible { .. }));
}

#[test]
fn rational_theta_is_reducible() {
    let doc = parse_document(&fixture("theta.lam")).unwrap();
    let t = doc.track("T").unwrap();
    let w = &doc.weights("R").unwrap().vector;
    let bound = steps_as_u64(&required_steps(w));
    assert!(matches!(is_irreducible(t, w, bound).unwrap(), Irreducibility::Reducible { .. }));
    assert!(orbit_oracle_reducible(t, w.values()));
}

#[test]
fn four_valent_moves() {
    let doc = parse_document(&fixture("theta.lam")).unwrap();
    let t = doc.track("X").unwrap();
    for name in ["V", "C"] {
        let w = &doc.weights(name).unwrap().vector;
        for cusp in t.cusps() {
            let Ok((t2, w2, rec)) = split_at_cusp(t, w, &cusp) else { continue };
            assert!(t2.validate().is_valid());
            assert_eq!(lengths(&t2, &w2), lengths(t, w), "{name} at {cusp}");
            assert_eq!(pinch(&t2, &w2, &rec).unwrap(), ((**t).clone(), w.clone()));
        }
    }
}

fn split_walk(seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let t0 = random_track(&mut r, 6, true);
    let w0 = int_weights_on(&t0, &random_int_weights(&mut r, &t0, 10));
    let before = lengths(&t0, &w0);
    let (mut t, mut w) = (t0.clone(), w0.clone());
    let mut history = Vec::new();
    for _ in 0..20 {
        let mut cusps = t.cusps();
        cusps.shuffle(&mut r);
        let Some((t2, w2, rec)) = cusps.iter().find_map(|c| split_at_cusp(&t, &w, c).ok()) else {
            break;
        };
        prop_assert!(t2.validate().is_valid());
        prop_assert_eq!(&lengths(&t2, &w2), &before);
        history.push((t, w, rec));
        t = t2;
        w = w2;
    }
    while let Some((tp, wp, rec)) = history.pop() {
        let (t3, w3) = pinch(&t, &w, &rec).unwrap();
        prop_assert_eq!(&t3, &tp);
        prop_assert_eq!(&w3, &wp);
        t = t3;
        w = w3;
    }
    prop_assert_eq!(t, t0);
    prop_assert_eq!(w, w0);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn components_match_union_find(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = random_track(&mut r, 6, true);
        let wi = random_int_weights(&mut r, &t, 10);
        let w = int_weights_on(&t, &wi);
        let model = strand_model(&t, &w).unwrap();
        let comps = components(&model);
        prop_assert_eq!(lengths(&t, &w), strand_oracle(&t, &wi));
        let mut totals = vec![0usize; wi.len()];
        for c in &comps {
            prop_assert!(c.orientation_consistent);
            for (a, b) in totals.iter_mut().zip(&c.visits) {
                *a += b;
            }
        }
        let expect: Vec<usize> = wi.iter().map(|&x| x as usize).collect();
        prop_assert_eq!(totals, expect);
    }

    #[test]
    fn split_sequences_preserve_leaves_and_pinch_back(seed in any::<u64>()) {
        split_walk(seed)?;
    }

    #[test]
    fn traces_match_the_orbit_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = random_track(&mut r, 6, true);
        let w = weights_on(&t, &random_rational_weights(&mut r, &t, 10_000));
        let needed = required_steps(&w);
        let bound = steps_as_u64(&needed);
        let verdict = is_irreducible(&t, &w, bound).unwrap();
        let reducible = matches!(verdict, Irreducibility::Reducible { .. });
        let undecided = matches!(verdict, Irreducibility::Undecided { .. });
        prop_assert!(!undecided);
        prop_assert_eq!(reducible, orbit_oracle_reducible(&t, w.values()));
        for c in t.cusps() {
            if let Ok(tr) = trace_separatrix(&t, &w, &c, Direction::of_cusp(&c), bound) {
                prop_assert!((tr.transcript.len() as u64) < needed.to_u64().unwrap());
                let hit = matches!(tr.outcome, TraceOutcome::HitsCusp { .. });
                prop_assert!(hit, "{}", tr);
            }
        }
    }
}
