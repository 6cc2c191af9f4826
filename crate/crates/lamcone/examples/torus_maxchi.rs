//! Maximal chi over a two-member family spanning a single closed curve.
//!
//! `BG` is a genus-two surface with one boundary circle (chi = -3); `BH`
//! wraps its boundary three times around the curve, so a third of it
//! already spans weight 1 and does much better.

use lamcone::maxchi::{x_family, x_single};
use lamcone::parser::parse_document;

const DOC: &str = "
track A { closed alpha }

surface BG on A {
  sector G chi=-3
  boundary G: alpha
  aspherical
  oriented
}

surface BH on A {
  sector H chi=-1
  boundary H: alpha alpha alpha
  aspherical
  oriented
}

weights W1 on A { alpha = 1 }
family F on A { BG BH }
";

fn main() {
    let doc = parse_document(DOC).expect("example parses");
    let w = &doc.weights("W1").unwrap().vector;

    for name in ["BG", "BH"] {
        let r = x_single(doc.presentation(name).unwrap(), w).unwrap();
        let at = r.witness.map(|v| v.to_string()).unwrap_or_default();
        println!("X_{name}({w}) = {} at {at}", r.value);
    }

    let fam = doc.family("F").unwrap().unwrap();
    let res = x_family(&fam, w).unwrap();
    println!("X_F({w}) = {}", res.value);
    for wit in &res.witnesses {
        println!("  attained by {} at {}", wit.presentation, wit.v);
    }
}
