//! Check the three binary clauses that merge symmetric cells, each by RAT on its first literal.

use keller::kellergraph::KellerInstance;
use keller::pipeline::verify_rat_binaries;

fn main() -> keller::Result<()> {
    for s in [3, 4] {
        let inst = KellerInstance::new(7, s)?;
        for r in verify_rat_binaries(&inst)? {
            println!("s={s} {:?} pivot {} passed={} ({:.2}s)", r.clause, r.pivot, r.passed, r.seconds);
        }
    }
    Ok(())
}
