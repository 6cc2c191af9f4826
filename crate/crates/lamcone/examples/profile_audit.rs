//! Profile of X along a segment of weights, and the structure audit, for a
//! pair of surfaces that are each good on one curve and bad on the other.
//!
//! The raw family is not concave: its profile kinks down at the midpoint.
//! Closing the family under sums adds the union of both members, which
//! repairs concavity and turns the audit clean.

use lamcone::maxchi::{audit_structure, close_under_sums, profile};
use lamcone::parser::parse_document;

const DOC: &str = "
track T {
  closed a b
}
surface B1 on T {
  sector B1a chi=-1
  sector B1b chi=-10
  boundary B1a: a
  boundary B1b: b
  aspherical
  oriented
}
surface B2 on T {
  sector B2a chi=-10
  sector B2b chi=-1
  boundary B2a: a
  boundary B2b: b
  aspherical
  oriented
}
weights E1 on T { a = 1, b = 0 }
weights E2 on T { a = 0, b = 1 }
family P on T { B1 B2 }
";

fn main() {
    let doc = parse_document(DOC).expect("example parses");
    let raw = doc.family("P").unwrap().unwrap();
    let e1 = &doc.weights("E1").unwrap().vector;
    let e2 = &doc.weights("E2").unwrap().vector;

    for (label, fam) in [("raw", raw.clone()), ("closed", close_under_sums(&raw))] {
        let p = profile(&fam, e1, e2).unwrap();
        println!("{label} profile from {e1} to {e2}:");
        print!("{}", p.to_csv());
        let report = audit_structure(&fam, 200);
        println!("{label} audit: {} checks, {} findings\n", report.checks, report.findings.len());
    }
}
