//! A curve that bounds nothing integrally until it is taken three times.

use lamcone::chi::{chi_functional, find_integer_multiple, verify_integer_multiple};
use lamcone::parser::parse_document;

fn main() {
    let doc = parse_document(
        "track A { closed alpha }
         surface BH on A {
           sector H chi=-1
           boundary H: alpha alpha alpha
           aspherical
           oriented
         }
         weights W1 on A { alpha = 1 }",
    )
    .expect("example parses");
    let bh = doc.presentation("BH").unwrap();
    let w = &doc.weights("W1").unwrap().vector;

    match find_integer_multiple(bh, w).unwrap() {
        Some(m) => {
            let chi = chi_functional(bh, &m.v).unwrap();
            println!("{} x {w} bounds {} (fiber point {})", m.k, m.v, m.fiber_point);
            println!("chi = {chi}, verified: {}", verify_integer_multiple(bh, w, &m));
        }
        None => println!("{w} is not a boundary of BH"),
    }
}
