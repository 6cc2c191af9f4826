use serde_json::{json, Value};

use crate::model::{End, EndRef};

use super::{Document, WeightTarget};

fn end_refs(list: &[EndRef]) -> Value {
    list.iter()
        .map(|e| {
            let end = if e.end == End::Head { "head" } else { "tail" };
            json!({ "segment": e.segment, "end": end })
        })
        .collect()
}

pub fn document_to_json(doc: &Document) -> Value {
    let tracks: Vec<Value> = doc
        .tracks
        .iter()
        .map(|t| {
            json!({
                "name": t.name,
                "segments": t.segments.iter().map(|s| json!({
                    "id": s.id, "oriented": s.oriented, "closed": s.closed,
                })).collect::<Vec<_>>(),
                "switches": t.switches.iter().map(|sw| json!({
                    "id": sw.id, "side_a": end_refs(&sw.side_a), "side_b": end_refs(&sw.side_b),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let surfaces: Vec<Value> = doc
        .presentations
        .iter()
        .map(|b| {
            json!({
                "name": b.name,
                "track": b.boundary_track.name,
                "sectors": b.sectors.iter().map(|z| json!({
                    "id": z.id,
                    "chi": z.euler_char,
                    "corners": z.corners,
                    "oriented": z.oriented,
                    "boundary": z.boundary,
                })).collect::<Vec<_>>(),
                "branch_equations": b.equations.iter().map(|e| json!({
                    "text": e.to_string(),
                    "terms": e.terms.iter().map(|(c, s)| json!([c, s])).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
                "aspherical": b.aspherical,
                "oriented": b.oriented,
            })
        })
        .collect();
    let weights: Vec<Value> = doc
        .weights
        .iter()
        .map(|w| {
            let (kind, target) = match &w.target {
                WeightTarget::Track(t) => ("track", t),
                WeightTarget::Surface(s) => ("surface", s),
            };
            json!({
                "name": w.name,
                "target": { "kind": kind, "name": target },
                "values": w.vector.to_json(),
            })
        })
        .collect();
    let families: Vec<Value> = doc
        .families
        .iter()
        .map(|f| json!({ "name": f.name, "track": f.track, "members": f.members }))
        .collect();
    json!({
        "schema": 1,
        "tracks": tracks,
        "surfaces": surfaces,
        "weights": weights,
        "families": families,
    })
}
