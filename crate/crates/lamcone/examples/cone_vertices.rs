//! Weight cone of a small branched surface: its defining equation, the
//! vertices of its unit cell, and a primitive interior point.

use lamcone::cones::{build_cone, ConeSource};
use lamcone::parser::parse_document;

const SURFACE: &str = "
surface B {
  sector x chi=0
  sector y chi=0
  sector z chi=0
  branch_eq: 3x = 2y + 2z
}
";

fn main() {
    let doc = parse_document(SURFACE).expect("example parses");
    let b = doc.presentation("B").unwrap();
    let cone = build_cone(ConeSource::Surface(b));

    for row in &cone.equalities {
        let terms: Vec<String> = row.iter().zip(&cone.labels).map(|(c, l)| format!("{c}{l}")).collect();
        println!("{} = 0", terms.join(" + "));
    }
    println!("dimension {}", cone.solution_dimension());

    let cell = cone.cell_vertices();
    for v in &cell.vertices {
        let coords: Vec<String> = v.iter().map(ToString::to_string).collect();
        println!("vertex ({})", coords.join(", "));
    }
    if let Some(p) = cone.interior_point() {
        println!("interior point {p}");
    }
}
