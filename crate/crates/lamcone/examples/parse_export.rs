//! Parse a `.lam` file, report validation problems, and print the document
//! in canonical text and as JSON.
//!
//! Usage: `cargo run --example parse_export -- path/to/file.lam`

use std::{env, fs, process};

use lamcone::parser::{document_to_json, parse_document, serialize_document};

fn main() {
    let path = env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/theta.lam").into());
    let text = fs::read_to_string(&path).unwrap_or_else(|e| {
        eprintln!("{path}: {e}");
        process::exit(2);
    });
    let doc = match parse_document(&text) {
        Ok(doc) => doc,
        Err(e) => {
            eprintln!("{path}:{e}");
            for r in &e.reports {
                eprintln!("{r}");
            }
            process::exit(1);
        }
    };
    print!("{}", serialize_document(&doc));
    println!();
    println!("{}", serde_json::to_string_pretty(&document_to_json(&doc)).unwrap());
}
