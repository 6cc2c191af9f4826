use std::fmt::Write;

use crate::model::{BranchedSurfacePresentation, End, EndRef, TrainTrack};

use super::{Document, FamilyDecl, NamedWeights, WeightTarget};

fn entries(out: &mut String, list: &[EndRef], default: End) {
    for e in list {
        out.push(' ');
        out.push_str(&e.segment);
        if e.end != default {
            out.push(if e.end == End::Head { '+' } else { '-' });
        }
    }
}

fn track(out: &mut String, t: &TrainTrack) {
    writeln!(out, "track {} {{", t.name).unwrap();
    for s in &t.segments {
        let kw = if s.closed { "closed" } else { "segment" };
        let flag = if s.oriented { "" } else { " unoriented" };
        writeln!(out, "  {kw} {}{flag}", s.id).unwrap();
    }
    for sw in &t.switches {
        write!(out, "  switch {}:", sw.id).unwrap();
        entries(out, &sw.side_a, End::Head);
        out.push_str(" ->");
        entries(out, &sw.side_b, End::Tail);
        out.push('\n');
    }
    out.push_str("}\n");
}

fn surface(out: &mut String, b: &BranchedSurfacePresentation) {
    write!(out, "surface {}", b.name).unwrap();
    if !b.boundary_track.name.is_empty() {
        write!(out, " on {}", b.boundary_track.name).unwrap();
    }
    out.push_str(" {\n");
    for z in &b.sectors {
        write!(out, "  sector {} chi={}", z.id, z.euler_char).unwrap();
        if z.corners != 0 {
            write!(out, " corners={}", z.corners).unwrap();
        }
        if !z.oriented {
            out.push_str(" unoriented");
        }
        out.push('\n');
    }
    for z in b.sectors.iter().filter(|z| !z.boundary.is_empty()) {
        writeln!(out, "  boundary {}: {}", z.id, z.boundary.join(" ")).unwrap();
    }
    for eq in &b.equations {
        writeln!(out, "  branch_eq: {eq}").unwrap();
    }
    if b.aspherical {
        out.push_str("  aspherical\n");
    }
    if b.oriented {
        out.push_str("  oriented\n");
    }
    out.push_str("}\n");
}

fn weights(out: &mut String, w: &NamedWeights) {
    let target = match &w.target {
        WeightTarget::Track(t) => t.clone(),
        WeightTarget::Surface(s) => format!("surface {s}"),
    };
    let body: Vec<String> = w
        .vector
        .labels()
        .iter()
        .zip(w.vector.values())
        .map(|(l, v)| format!("{l} = {v}"))
        .collect();
    writeln!(out, "weights {} on {target} {{ {} }}", w.name, body.join(", ")).unwrap();
}

fn family(out: &mut String, f: &FamilyDecl) {
    write!(out, "family {}", f.name).unwrap();
    if !f.track.is_empty() {
        write!(out, " on {}", f.track).unwrap();
    }
    writeln!(out, " {{ {} }}", f.members.join(" ")).unwrap();
}

/// Canonical text form; parsing it back gives an equal document.
pub fn serialize_document(doc: &Document) -> String {
    let mut blocks = Vec::new();
    for t in &doc.tracks {
        let mut s = String::new();
        track(&mut s, t);
        blocks.push(s);
    }
    for b in &doc.presentations {
        let mut s = String::new();
        surface(&mut s, b);
        blocks.push(s);
    }
    for w in &doc.weights {
        let mut s = String::new();
        weights(&mut s, w);
        blocks.push(s);
    }
    for f in &doc.families {
        let mut s = String::new();
        family(&mut s, f);
        blocks.push(s);
    }
    blocks.join("\n")
}
