//! Small Keller graphs: adjacency, a random automorphism and the largest clique.

use keller::kellergraph::{adjacent, is_clique, Automorphism, ExplicitGraph, KellerInstance, Vertex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> keller::Result<()> {
    let inst = KellerInstance::new(2, 2)?;
    let u = Vertex::new(vec![0, 0]);
    let v = Vertex::new(vec![2, 3]);
    println!("{u} ~ {v}: {}", adjacent(&u, &v, &inst)?);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = Automorphism::random(&inst, &mut rng);
    let (au, av) = (a.apply(&u)?, a.apply(&v)?);
    println!("image {au} ~ {av}: {}", adjacent(&au, &av, &inst)?);

    for n in 2..=3 {
        let inst = KellerInstance::new(n, 2)?;
        let g = ExplicitGraph::build(&inst)?;
        let k = g.max_clique(1 << n);
        println!("G_{{{n},2}}: {} vertices, max clique {} (valid: {})", g.vertices().len(), k.len(), is_clique(&k, &inst)?);
    }
    Ok(())
}
