//! Produce a proof, round-trip it through binary DRAT, check it, trim it and
//! show that a damaged proof is rejected.

use keller::dratcheck::{check_proof, trim, Proof, ProofStep};
use keller::encoder::encode;
use keller::kellergraph::KellerInstance;
use keller::satkit::{parse_proof, solve, write_binary_drat, Budget};

fn main() -> keller::Result<()> {
    let inst = KellerInstance::new(3, 2)?;
    let f = encode(&inst)?.into_formula();
    let p = solve(&f, &[], &Budget::unlimited(), 3)?.proof.expect("unsat");

    let mut bin = Vec::new();
    write_binary_drat(&p, &mut bin)?;
    let back = parse_proof(&bin)?;
    assert_eq!(back, p);

    let rep = check_proof(&f, &back);
    println!("{} steps ({} bytes binary): accepted={} rup={} rat={}", rep.steps, bin.len(), rep.accepted, rep.rup_steps, rep.rat_steps);

    let t = trim(&f, &p)?;
    println!("trimmed {} -> {} steps, core uses {} clauses", t.original_steps, t.proof.len(), t.core.len());

    let bogus = Proof::new(vec![ProofStep::add(vec![])]);
    let bad = check_proof(&f, &bogus);
    println!("empty clause alone: accepted={} ({:?})", bad.accepted, bad.failure.map(|e| e.reason));
    Ok(())
}
