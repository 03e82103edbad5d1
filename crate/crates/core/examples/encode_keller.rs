//! Encode G_{n,s} and print the per-family clause counts.
//!
//! `cargo run --example encode_keller -- 7 3`

use keller::encoder::{audit_counts, encode};
use keller::kellergraph::KellerInstance;

fn main() -> keller::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (n, s) = match args[..] {
        [n, s] => (n, s),
        _ => (7, 3),
    };
    let inst = KellerInstance::new(n, s)?;
    let db = encode(&inst)?;
    println!("G_{{{n},{s}}}: {} variables, {} clauses", db.num_vars(), db.len());
    for (family, first, last, count) in db.family_ranges() {
        println!("  {:<14} {count:>7} clauses, positions {first}..={last}", family.name());
    }
    let audit = audit_counts(&inst)?;
    println!("closed forms agree: {}", audit.is_consistent());
    if n == 2 && s == 2 {
        print!("{}", db.to_dimacs_string());
    }
    Ok(())
}
