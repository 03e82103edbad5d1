//! Build cube tilings from the lattice, perturb them and inspect their structure.

use keller::tilinglab::{measure_discreteness, render_2d, replacement, shift_column, verify_faceshare_free, verify_tiling, write_tiling_file, PeriodicTiling, TilingVerdict};

fn main() -> keller::Result<()> {
    let t = PeriodicTiling::lattice(2, 2).verify()?;
    let t = shift_column(&t, 0, 1, 1)?;
    let t = replacement(&t, 0, 1, 3)?;
    print!("{}", render_2d(&t)?);
    print!("{}", write_tiling_file(&t.to_periodic()));
    println!("discreteness: {:?}", measure_discreteness(&t)?);
    println!("faceshare-free: {}", verify_faceshare_free(&t)?.is_free());

    let mut t3 = PeriodicTiling::lattice(3, 2).verify()?;
    for (x, b) in [(0, 1), (1, 3), (6, 2)] {
        t3 = shift_column(&t3, x, 2, b)?;
    }
    println!("d=3 after shifts: {:?}", verify_faceshare_free(&t3)?);

    // two cubes on the same corner
    let broken = PeriodicTiling::new(2, 2, vec![vec![0, 0], vec![0, 0], vec![0, 2], vec![2, 2]])?;
    match verify_tiling(&broken) {
        TilingVerdict::Tiling => println!("unexpected tiling"),
        other => println!("rejected: {other:?}"),
    }
    Ok(())
}
