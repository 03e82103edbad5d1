//! Break symmetries for s = 3, solve a few cases with stored proofs and print
//! the run report. Artifacts land in a temporary directory unless one is given.

use std::path::PathBuf;

use keller::pipeline::{break_symmetries, case_file_name, report_run, solve_file, BreakOptions, RunOptions, Selection, SolveOptions};
use keller::satkit::Budget;

fn main() -> keller::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("keller_case_pipeline"));
    let opts = RunOptions {
        seed: 11,
        budget: Budget { conflicts: Some(20_000), wall: None },
        out_dir: out.clone(),
        ..RunOptions::default()
    };
    let b = break_symmetries(3, &opts, &BreakOptions::default())?;
    println!("{} cases, cover passed={}, RAT verified={}", b.cases, b.cover_passed, b.rat_verified);

    let sopts = SolveOptions {
        selection: Some(Selection::parse("0,1,2")?),
        ..SolveOptions::default()
    };
    let m = solve_file(&out.join(case_file_name(3)), &opts, &sopts)?;
    for c in &m.cases {
        println!("case {:>5}: {} after {} conflicts", c.case_index, c.status, c.conflicts);
    }
    print!("{}", report_run(&out)?);
    Ok(())
}
