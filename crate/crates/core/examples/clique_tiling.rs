//! Translate between tilings with corners in (1/s)Z^d and vertex sets of G_{d,s}.
//! A faceshare in the tiling shows up as a non-adjacent pair.
//!
//! With a path argument, runs the dimension-8 clique checks on that file.

use std::path::Path;

use keller::kellergraph::{check_clique, CliqueCheck, KellerInstance};
use keller::pipeline::verify_dim8;
use keller::tilinglab::{shift_column, tiling_to_clique, verify_faceshare_free, PeriodicTiling};

fn main() -> keller::Result<()> {
    let t = shift_column(&PeriodicTiling::lattice(3, 2).verify()?, 5, 0, 3)?;
    let vs = tiling_to_clique(&t);
    for v in &vs {
        print!("{v} ");
    }
    println!();
    let inst = KellerInstance::new(3, 2)?;
    println!("faceshare: {:?}", verify_faceshare_free(&t)?);
    match check_clique(&vs, &inst)? {
        CliqueCheck::Clique => println!("clique"),
        CliqueCheck::Violation(u, v) => println!("not a clique: {u} and {v} are not adjacent"),
    }

    if let Some(path) = std::env::args().nth(1) {
        let r = verify_dim8(Path::new(&path), &[3, 4, 6])?;
        println!("{}", serde_json::to_string_pretty(&r).expect("report serializes"));
    }
    Ok(())
}
