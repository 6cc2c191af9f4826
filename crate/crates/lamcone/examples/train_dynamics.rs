//! Leaves of a measured train track: components, separatrix traces, and a
//! split that pinching undoes.

use lamcone::dynamics::{
    components, is_irreducible, pinch, required_steps, split_at_cusp, steps_as_u64, strand_model,
    trace_separatrix, Direction, Irreducibility,
};
use lamcone::parser::parse_document;

const DOC: &str = "
track X {
  segment a
  segment b
  segment d
  segment e
  switch x: a b -> d e
  switch y: d e -> a b
}
weights V on X { a = 3, b = 2, d = 2, e = 3 }
weights R on X { a = 1/3, b = 2/7, d = 2/7, e = 1/3 }
";

fn main() {
    let doc = parse_document(DOC).expect("example parses");
    let t = doc.track("X").unwrap();
    let v = &doc.weights("V").unwrap().vector;

    let model = strand_model(t, v).unwrap();
    let lengths: Vec<usize> = components(&model).iter().map(|c| c.length).collect();
    println!("leaf lengths under {v}: {lengths:?}");

    let bound = steps_as_u64(&required_steps(v));
    for cusp in t.cusps() {
        match trace_separatrix(t, v, &cusp, Direction::of_cusp(&cusp), bound) {
            Ok(tr) => println!("{tr}"),
            Err(e) => println!("{cusp}: {e}"),
        }
    }

    let cusp = "x:A:0".parse().unwrap();
    let (t2, v2, rec) = split_at_cusp(t, v, &cusp).unwrap();
    println!("{:?} at {cusp}: {} segments, weights {v2}", rec.kind, t2.segments.len());
    let (t3, v3) = pinch(&t2, &v2, &rec).unwrap();
    println!("pinch restores the original: {}", t3 == **t && v3 == *v);

    let r = &doc.weights("R").unwrap().vector;
    let verdict = is_irreducible(t, r, steps_as_u64(&required_steps(r))).unwrap();
    match verdict {
        Irreducibility::Reducible { witness } => println!("{r} is reducible: {witness}"),
        other => println!("{r}: {}", other.to_json()),
    }
}
