mod common;

use std::sync::Arc;

use common::*;
use lamcone::maxchi::Family;
use lamcone::model::{BranchedSurfacePresentation, TrainTrack};
use lamcone::parser::{
    document_to_json, parse_document, serialize_document, Document, FamilyDecl, NamedWeights,
    ParseErrorKind, WeightTarget,
};
use lamcone::rational::Rational;
use proptest::prelude::*;
use rand::Rng;

fn renamed(t: TrainTrack, name: &str) -> TrainTrack {
    TrainTrack::new(name, t.segments, t.switches)
}

fn random_document(seed: u64) -> Document {
    let mut r = rng(seed);
    let mut doc = Document::default();
    for k in 0..r.gen_range(0..=2) {
        let t = Arc::new(renamed(random_track(&mut r, 5, true), &format!("T{k}")));
        doc.tracks.push(t.clone());
        let vals: Vec<Rational> = (0..t.segments.len())
            .map(|_| qr(r.gen_range(0..=9), r.gen_range(1..=6)))
            .collect();
        doc.weights.push(NamedWeights {
            name: format!("W{k}"),
            target: WeightTarget::Track(t.name.clone()),
            vector: weights_on(&t, &vals),
        });
        let mut members = Vec::new();
        for j in 0..r.gen_range(0..=2) {
            let name = format!("B{k}_{j}");
            let mut b = random_presentation_on(&mut r, &name, t.clone(), 4);
            if r.gen_bool(0.3) {
                b.sectors[0].corners = 0;
                b.sectors[0].oriented = false;
                b.oriented = false;
            }
            if b.validate().is_valid() {
                members.push(name);
                doc.presentations.push(Arc::new(b));
            }
        }
        if !members.is_empty() {
            doc.families.push(FamilyDecl {
                name: format!("F{k}"),
                track: t.name.clone(),
                members,
            });
        }
    }
    if r.gen_bool(0.5) {
        let mut b = random_presentation_on(&mut r, "Free", Arc::new(TrainTrack::default()), 3);
        for z in &mut b.sectors {
            z.boundary.clear();
        }
        let b = BranchedSurfacePresentation::new(
            b.name.clone(),
            b.sectors.clone(),
            b.equations.clone(),
            b.boundary_track.clone(),
            false,
            true,
        );
        let ids = b.sector_ids();
        let vals: Vec<Rational> = ids.iter().map(|_| qr(r.gen_range(0..=5), 2)).collect();
        doc.weights.push(NamedWeights {
            name: "V".into(),
            target: WeightTarget::Surface("Free".into()),
            vector: lamcone::model::WeightVector::new(ids, vals).unwrap(),
        });
        doc.presentations.push(Arc::new(b));
    }
    doc
}

#[test]
fn fixtures_round_trip() {
    for name in [
        "fig1.lam",
        "torus-handle.lam",
        "nonbound.lam",
        "theta.lam",
        "adversarial-pair.lam",
        "sphere-audit.lam",
    ] {
        let doc = parse_document(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        let text = serialize_document(&doc);
        assert_eq!(parse_document(&text).unwrap(), doc, "{name}");
        assert_eq!(serialize_document(&parse_document(&text).unwrap()), text);
    }
}

#[test]
fn broken_fixture_fails_validation() {
    let e = parse_document(&fixture("broken.lam")).unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::Validation);
    assert_eq!(e.reports.len(), 1);
    assert_eq!(e.reports[0].violations.len(), 4);
}

#[test]
fn json_export_is_versioned() {
    let doc = parse_document(&fixture("torus-handle.lam")).unwrap();
    let j = document_to_json(&doc);
    assert_eq!(j["schema"], 1);
    assert_eq!(j["weights"][0]["values"]["alpha"]["num"], "1");
    assert_eq!(j["surfaces"][1]["sectors"][0]["boundary"].as_array().unwrap().len(), 3);
}

#[test]
fn families_build_from_documents() {
    let doc = parse_document(&fixture("adversarial-pair.lam")).unwrap();
    let f: Family = doc.family("P").unwrap().unwrap();
    assert_eq!(f.boundary_track().name, "T");
    assert!(doc.family("nope").is_none());
}

#[test]
fn error_positions() {
    let cases: &[(&str, ParseErrorKind, usize, usize)] = &[
        ("track T {\n  segment a\n  switch s: a -> a\n", ParseErrorKind::Syntax, 4, 1),
        ("weights W on T { a = 1 }", ParseErrorKind::Semantic, 1, 14),
        ("track T { closed a }\nweights W on T { a = 2/0 }", ParseErrorKind::Syntax, 2, 24),
        ("track T { closed a }\nweights W on T { a = -1 }", ParseErrorKind::Semantic, 2, 9),
        ("surface B { sector x chi=1\n boundary y: a }", ParseErrorKind::Semantic, 2, 11),
        ("track T { closed a }\ntrack U { closed a }\nfamily F { }", ParseErrorKind::Semantic, 3, 8),
    ];
    for (text, kind, line, col) in cases {
        let e = parse_document(text).unwrap_err();
        assert_eq!((e.kind, e.line, e.col), (*kind, *line, *col), "{text:?}: {e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn random_documents_round_trip(seed in any::<u64>()) {
        let doc = random_document(seed);
        let text = serialize_document(&doc);
        let back = parse_document(&text);
        prop_assert!(back.is_ok(), "{}\n{}", text, back.unwrap_err());
        prop_assert_eq!(back.unwrap(), doc);
    }

    #[test]
    fn parsing_is_total(text in "[ -~\n]{0,120}") {
        if let Err(e) = parse_document(&text) {
            prop_assert!(e.line >= 1 && e.col >= 1);
        }
    }

    #[test]
    fn mangled_fixtures_never_panic(cut in 0usize..600, junk in "[{}:=+/,*;# a-z0-9\n-]{0,8}") {
        let src = fixture("torus-handle.lam");
        let at = src.char_indices().map(|(i, _)| i).nth(cut % src.chars().count()).unwrap_or(0);
        let text = format!("{}{}{}", &src[..at], junk, &src[at..]);
        if let Err(e) = parse_document(&text) {
            prop_assert!(e.line >= 1 && e.col >= 1);
        }
    }
}
