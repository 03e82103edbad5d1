//! Symmetry breaking for n = 7: class counts, the case split and its cover check.
//!
//! `cargo run --release --example symmetry_cases -- 4`

use keller::kellergraph::KellerInstance;
use keller::symmetry::{blocking_clauses, coord34_classes, cover_check, enumerate_cases, matrix_classes};

fn main() -> keller::Result<()> {
    let s = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(3);
    let inst = KellerInstance::new(7, s)?;
    let m = matrix_classes(&inst)?;
    let c = coord34_classes(&inst)?;
    println!("s={s}: {} matrix classes, {} coordinate-3/4 classes", m.len(), c.len());
    for a in m.iter().take(5) {
        println!("  {a}");
    }
    let cases = enumerate_cases(&inst)?;
    let hard = cases.iter().filter(|c| c.c2.is_some()).count();
    println!("{} cases, {hard} of them refine the hardest class", cases.len());
    println!("{} blocking clauses", blocking_clauses(&inst)?.len());
    let cover = cover_check(&cases, &inst)?;
    println!("cover check passed: {cover:?}");
    Ok(())
}
