//! Solve the clique formula for small n and verify the UNSAT proofs.

use keller::dratcheck::check_proof;
use keller::encoder::{decode_model, encode};
use keller::kellergraph::{is_clique, KellerInstance};
use keller::satkit::{solve, Budget, SolveStatus};

fn main() -> keller::Result<()> {
    for (n, s) in [(2, 2), (3, 2), (3, 3), (4, 2)] {
        let inst = KellerInstance::new(n, s)?;
        let f = encode(&inst)?.into_formula();
        let r = solve(&f, &[], &Budget::unlimited(), 1)?;
        match r.status {
            SolveStatus::Unsat => {
                let p = r.proof.expect("UNSAT result carries a proof");
                let rep = check_proof(&f, &p);
                println!("G_{{{n},{s}}}: UNSAT, {} conflicts, proof of {} steps accepted={}", r.stats.conflicts, p.len(), rep.accepted);
            }
            SolveStatus::Sat => {
                let k = decode_model(r.model.as_ref().unwrap(), &inst)?;
                println!("G_{{{n},{s}}}: SAT, clique valid={}", is_clique(&k, &inst)?);
            }
            SolveStatus::Unknown => println!("G_{{{n},{s}}}: UNKNOWN"),
        }
    }
    Ok(())
}
