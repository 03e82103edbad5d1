//! Acceptance gate. Runs every criterion at its stated tolerance and prints
//! one PASS, FAIL or SKIPPED line per criterion; exits nonzero on any FAIL.

use std::collections::{HashMap, HashSet, VecDeque};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use keller::dratcheck::{check_proof, check_rat, trim};
use keller::encoder::{audit_counts, encode};
use keller::kellergraph::{max_clique_bruteforce, KellerInstance};
use keller::pipeline::{
    break_symmetries, encode_to_file, solve_file, verify_dim8, BreakOptions, CaseStatus, Dim8Status,
    ProofStorage, RunOptions, Selection, SolveOptions, Verdict,
};
use keller::satkit::{solve, Budget, SolveStatus};
use keller::symmetry::{
    coord34_classes, cover_check, distinct_matrix_classes, enumerate_cases, hardest_split, matrix_classes,
    phi, rat_binaries, valid_matrix_assignments, CaseCube, Coord34Assignment, MatrixAssignment,
    HARDEST_MATRIX,
};
use keller::tilinglab::{
    measure_discreteness, replacement, shift_column, verify_faceshare_free, verify_tiling, PeriodicTiling,
    TilingVerdict,
};

enum Outcome {
    Pass(String),
    Fail(String),
    Skipped(String),
}

type Criterion = fn() -> Outcome;

fn pass_if(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn within(elapsed: Duration, limit: Duration, detail: String) -> Outcome {
    if elapsed <= limit {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(format!("{detail}; took {elapsed:.1?}, limit {limit:?}"))
    }
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("keller-acceptance-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn encoding_counts() -> Outcome {
    let start = Instant::now();
    let dir = scratch("encode");
    let table = [(3, 39_424, 200_320), (4, 43_008, 265_728), (6, 50_176, 399_232)];
    let mut bad = Vec::new();
    for (s, vars, clauses) in table {
        let r = encode_to_file(&KellerInstance::new(7, s).unwrap(), &dir).unwrap();
        let header = format!("p cnf {vars} {clauses}\n");
        let text = std::fs::read_to_string(&r.file).unwrap();
        if (r.variables as usize, r.clauses) != (vars, clauses) || !text.contains(&header) {
            bad.push(format!("s={s}: {} vars, {} clauses", r.variables, r.clauses));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    if !bad.is_empty() {
        return Outcome::Fail(bad.join("; "));
    }
    within(start.elapsed(), Duration::from_secs(60), "(7,3)/(7,4)/(7,6) headers exact".into())
}

fn table1_audit() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in [2, 3, 4] {
        for s in [2, 3, 4, 6] {
            let a = audit_counts(&KellerInstance::new(n, s).unwrap()).unwrap();
            if !a.is_consistent() {
                bad.push(format!("({n},{s})"));
            }
        }
    }
    if !bad.is_empty() {
        return Outcome::Fail(format!("family counts differ for {}", bad.join(", ")));
    }
    within(start.elapsed(), Duration::from_secs(60), "12 instances, every family exact".into())
}

fn class_counts() -> Outcome {
    let start = Instant::now();
    let mut got = Vec::new();
    for s in [3, 4, 6] {
        let inst = KellerInstance::new(7, s).unwrap();
        let m = matrix_classes(&inst).unwrap().len();
        let c = coord34_classes(&inst).unwrap().len();
        let h = hardest_split(&inst, &MatrixAssignment(HARDEST_MATRIX), &Coord34Assignment([0; 8]))
            .unwrap()
            .len();
        let total = enumerate_cases(&inst).unwrap().len();
        got.push((m, c, h, total));
    }
    let want = vec![(25, 861, 33, 21_557), (28, 1_326, 33, 37_160), (28, 1_378, 33, 38_616)];
    if got != want {
        return Outcome::Fail(format!("got {got:?}"));
    }
    within(start.elapsed(), Duration::from_secs(300), format!("{got:?}"))
}

const PRINTED_S3: [[u8; 6]; 25] = [
    [0, 0, 1, 0, 1, 1],
    [0, 0, 1, 1, 1, 1],
    [0, 0, 1, 1, 1, 2],
    [0, 1, 1, 0, 0, 1],
    [0, 1, 1, 0, 1, 1],
    [0, 1, 1, 0, 2, 1],
    [0, 1, 1, 1, 0, 2],
    [0, 1, 1, 1, 1, 0],
    [0, 1, 1, 1, 1, 1],
    [0, 1, 1, 1, 1, 2],
    [0, 1, 1, 1, 2, 0],
    [0, 1, 1, 1, 2, 1],
    [0, 1, 1, 1, 2, 2],
    [0, 1, 1, 2, 1, 1],
    [0, 1, 1, 2, 2, 1],
    [0, 2, 1, 1, 1, 1],
    [0, 2, 1, 1, 1, 2],
    [0, 2, 1, 2, 1, 1],
    [1, 1, 1, 1, 1, 1],
    [1, 1, 1, 1, 1, 2],
    [1, 1, 1, 1, 2, 2],
    [1, 1, 1, 2, 2, 1],
    [1, 1, 2, 1, 2, 1],
    [1, 1, 2, 1, 2, 2],
    [1, 2, 2, 1, 1, 2],
];

fn printed_transversal() -> Outcome {
    let printed = distinct_matrix_classes(&PRINTED_S3);
    let valid = valid_matrix_assignments(3);
    let reached: HashSet<MatrixAssignment> = valid.iter().map(|m| m.canonical()).collect();
    let ours: HashSet<MatrixAssignment> = matrix_classes(&KellerInstance::new(7, 3).unwrap())
        .unwrap()
        .into_iter()
        .collect();
    pass_if(
        printed.len() == 25 && valid.len() == 125 && reached == printed && ours == printed,
        format!(
            "{} printed classes, {} valid assignments reach {} classes",
            printed.len(),
            valid.len(),
            reached.len()
        ),
    )
}

fn rat_binaries_verify() -> Outcome {
    let mut worst = Duration::ZERO;
    for s in [3, 4, 6] {
        let inst = KellerInstance::new(7, s).unwrap();
        let f = phi(&inst).unwrap().into_formula();
        for b in rat_binaries(&inst).unwrap() {
            let start = Instant::now();
            let ok = check_rat(&b, b[0], &f).unwrap();
            let t = start.elapsed();
            worst = worst.max(t);
            if !ok {
                return Outcome::Fail(format!("s={s}: {b:?} not RAT on {}", b[0]));
            }
            if t > Duration::from_secs(10) {
                return Outcome::Fail(format!("s={s}: {b:?} took {t:.1?}"));
            }
        }
        // negative control: without the initial units some binary fails
        let bare = encode(&inst).unwrap().into_formula();
        let failures = rat_binaries(&inst)
            .unwrap()
            .iter()
            .filter(|b| !check_rat(&b[..], b[0], &bare).unwrap())
            .count();
        if failures == 0 {
            return Outcome::Fail(format!("s={s}: negative control accepted all binaries"));
        }
    }
    Outcome::Pass(format!("9 binaries RAT, slowest {worst:.2?}; controls rejected"))
}

/// Union of the orbits of the case pairs under the generators of the joint
/// action, compared with the set of all valid pairs. s = 3 only.
fn orbit_cover_oracle(cases: &[CaseCube]) -> bool {
    let valid = valid_matrix_assignments(3);
    let m_index: HashMap<MatrixAssignment, usize> = valid.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let c_index = |c: &Coord34Assignment| c.0.iter().fold(0usize, |acc, &v| acc * 3 + v as usize);
    let key = |m: &MatrixAssignment, c: &Coord34Assignment| m_index[m] * 6561 + c_index(c);
    let mut covered = vec![false; valid.len() * 6561];
    let swap12 = [0u8, 2, 1];
    let seeds: HashSet<(MatrixAssignment, Coord34Assignment)> = cases.iter().map(|c| (c.matrix, c.coord34)).collect();
    for (m, c) in seeds {
        if covered[key(&m, &c)] {
            continue;
        }
        let mut queue = VecDeque::from([(m, c)]);
        covered[key(&m, &c)] = true;
        while let Some((m, c)) = queue.pop_front() {
            let next = [
                (m.conjugate([1, 0, 2]), c.permute_rows([1, 0, 2])),
                (m.conjugate([0, 2, 1]), c.permute_rows([0, 2, 1])),
                (m, c.swap_columns()),
                (m, c.permute_column(0, &swap12)),
                (m, c.permute_column(1, &swap12)),
            ];
            for (m2, c2) in next {
                let k = key(&m2, &c2);
                if !covered[k] {
                    covered[k] = true;
                    queue.push_back((m2, c2));
                }
            }
        }
    }
    covered.iter().all(|&b| b)
}

fn cover_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2020);
    let mut details = Vec::new();
    for s in [3, 4, 6] {
        let inst = KellerInstance::new(7, s).unwrap();
        let cases = enumerate_cases(&inst).unwrap();
        if let Err(e) = cover_check(&cases, &inst) {
            return Outcome::Fail(format!("s={s}: {e}"));
        }
        if s == 3 && !orbit_cover_oracle(&cases) {
            return Outcome::Fail("s=3: orbit oracle finds an uncovered pair".into());
        }
        for _ in 0..20 {
            let k = rng.gen_range(0..cases.len());
            let mut fewer = cases.clone();
            fewer.remove(k);
            match cover_check(&fewer, &inst) {
                Err(keller::Error::Cover(msg)) if msg.contains("not covered") => {}
                Err(e) => return Outcome::Fail(format!("s={s}, dropped {k}: unexpected error {e}")),
                Ok(_) => return Outcome::Fail(format!("s={s}, dropped {k}: cover still passed")),
            }
        }
        details.push(format!("s={s} {} cubes", cases.len()));
    }
    Outcome::Pass(format!("{}; 60 deletions each named an uncovered assignment", details.join(", ")))
}

fn small_end_to_end() -> Outcome {
    let dir = scratch("small");
    let mut lines = Vec::new();
    for n in [2, 3, 4] {
        let start = Instant::now();
        let inst = KellerInstance::new(n, 2).unwrap();
        let opts = RunOptions {
            out_dir: dir.join(format!("n{n}")),
            budget: Budget::unlimited(),
            ..RunOptions::default()
        };
        let enc = encode_to_file(&inst, &opts.out_dir).unwrap();
        let m = solve_file(&enc.file, &opts, &SolveOptions::default()).unwrap();
        let omega = max_clique_bruteforce(&inst, 1 << n).unwrap();
        let limit = if n == 4 { 3600 } else { 30 };
        if m.verdict != Verdict::Refuted || m.cases[0].status != CaseStatus::UnsatVerified || omega >= 1 << n {
            return Outcome::Fail(format!("n={n}: verdict {}, max clique {omega}", m.verdict));
        }
        if start.elapsed() > Duration::from_secs(limit) {
            return Outcome::Fail(format!("n={n}: took {:.1?}", start.elapsed()));
        }
        lines.push(format!("n={n} UNSAT-verified, max clique {omega}"));
    }

    let opts = RunOptions {
        out_dir: dir.join("s3"),
        seed: 1,
        budget: Budget::conflicts(20_000),
        ..RunOptions::default()
    };
    break_symmetries(3, &opts, &BreakOptions::default()).unwrap();
    let m = solve_file(
        &opts.out_dir.join("cases_7_3.icnf"),
        &opts,
        &SolveOptions {
            selection: Some(Selection::Sample(5)),
            proofs: ProofStorage::Trimmed,
            break_report: None,
        },
    )
    .unwrap();
    let _ = std::fs::remove_dir_all(&dir);
    let failures = m.count(CaseStatus::CheckFailed) + m.count(CaseStatus::Sat);
    let resolved = m.count(CaseStatus::UnsatVerified) + m.count(CaseStatus::Unknown);
    lines.push(format!(
        "n=7 s=3 sample {:?}: {} UNSAT-verified, {} UNKNOWN",
        m.selected,
        m.count(CaseStatus::UnsatVerified),
        m.count(CaseStatus::Unknown)
    ));
    pass_if(m.cases.len() == 5 && resolved == 5 && failures == 0, lines.join("; "))
}

fn trimming() -> Outcome {
    let mut lines = Vec::new();
    for n in [2, 3, 4] {
        let f = encode(&KellerInstance::new(n, 2).unwrap()).unwrap().into_formula();
        let r = solve(&f, &[], &Budget::unlimited(), 7).unwrap();
        let proof = r.proof.unwrap();
        let t = trim(&f, &proof).unwrap();
        if !t.report.accepted || !check_proof(&f, &t.proof).accepted || t.proof.len() > proof.len() {
            return Outcome::Fail(format!("n={n}: trimmed proof rejected or longer"));
        }
        if n == 3 && t.proof.len() >= proof.len() {
            return Outcome::Fail(format!("n=3: no reduction ({} steps)", proof.len()));
        }
        lines.push(format!("n={n} {} -> {}", proof.len(), t.proof.len()));
    }
    // sampled dimension-7 cases, trimmed against formula and cube
    let inst = KellerInstance::new(7, 3).unwrap();
    let f = keller::symmetry::symmetry_broken(&inst, true).unwrap().into_formula();
    let cases = enumerate_cases(&inst).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut done = 0;
    while done < 3 {
        let c = &cases[rng.gen_range(0..cases.len())];
        let r = solve(&f, &c.literals, &Budget::conflicts(5_000), 3).unwrap();
        if r.status != SolveStatus::Unsat {
            continue;
        }
        let target = f.with_units(&c.literals);
        let proof = r.proof.unwrap();
        let t = trim(&target, &proof).unwrap();
        if !t.report.accepted || t.proof.len() > proof.len() {
            return Outcome::Fail(format!("case {}: trimmed proof rejected or longer", c.index));
        }
        lines.push(format!("case {} {} -> {}", c.index, proof.len(), t.proof.len()));
        done += 1;
    }
    Outcome::Pass(lines.join(", "))
}

fn tiling_suite() -> Outcome {
    let lattice = PeriodicTiling::lattice(3, 2);
    if verify_tiling(&lattice) != TilingVerdict::Tiling {
        return Outcome::Fail("lattice rejected".into());
    }
    let v = lattice.verify().unwrap();
    if verify_faceshare_free(&v).unwrap().is_free() {
        return Outcome::Fail("lattice reported faceshare-free".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut applications = 0;
    let mut max_count = 0;
    while applications < 1000 {
        let d = rng.gen_range(1..=8);
        let s = rng.gen_range(1..=if d > 6 { 2 } else { 3 });
        let mut t = PeriodicTiling::lattice(d, s).verify().unwrap();
        let dir = rng.gen_range(0..d);
        for _ in 0..rng.gen_range(1..6) {
            let x = rng.gen_range(0..1usize << d);
            t = shift_column(&t, x, dir, rng.gen_range(0..2 * s as i64)).unwrap();
        }
        for _ in 0..10 {
            let i = rng.gen_range(0..d);
            let a = rng.gen_range(0..s as i64);
            let b = rng.gen_range(-(2 * s as i64)..2 * s as i64);
            t = match replacement(&t, i, a, b) {
                Ok(t) => t,
                Err(e) => return Outcome::Fail(format!("replacement {applications}: {e}")),
            };
            applications += 1;
            if verify_tiling(&t.to_periodic()) != TilingVerdict::Tiling {
                return Outcome::Fail(format!("replacement {applications} broke the tiling"));
            }
            if let Err(e) = t.check_buddies() {
                return Outcome::Fail(e.to_string());
            }
            for _ in 0..2 {
                let p: Vec<i64> = (0..d).map(|_| rng.gen_range(0..2 * s as i64)).collect();
                if let Err(e) = t.check_i_lattice(&p, rng.gen_range(0..d)) {
                    return Outcome::Fail(e.to_string());
                }
            }
            match measure_discreteness(&t) {
                Ok(c) => max_count = max_count.max(*c.iter().max().unwrap()),
                Err(e) => return Outcome::Fail(e.to_string()),
            }
        }
    }
    Outcome::Pass(format!(
        "lattice TILING and not faceshare-free; {applications} replacements re-verified; max residues {max_count}"
    ))
}

fn dimension_eight() -> Outcome {
    let path = std::env::var_os("KELLER_DIM8_CLIQUE")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/clique_8_2.txt"));
    let start = Instant::now();
    let r = verify_dim8(&path, &[3, 4, 6]).unwrap();
    match r.status {
        Dim8Status::Skipped => Outcome::Skipped(format!("no clique file at {}", path.display())),
        Dim8Status::Failed => Outcome::Fail(r.reason.unwrap_or_default()),
        Dim8Status::Passed => pass_if(
            r.vertices == 256 && r.propagation_seconds < 1.0,
            format!(
                "256-clique, propagation {:.3}s, tiling faceshare-free, {:.1?} total",
                r.propagation_seconds,
                start.elapsed()
            ),
        ),
    }
}

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("encoding counts", encoding_counts),
        ("per-family count audit", table1_audit),
        ("symmetry class counts", class_counts),
        ("printed s=3 transversal", printed_transversal),
        ("RAT binaries", rat_binaries_verify),
        ("cover check", cover_checks),
        ("small-dimension end-to-end and n=7 sample", small_end_to_end),
        ("proof trimming", trimming),
        ("tiling suite", tiling_suite),
        ("dimension 8", dimension_eight),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skipped(d) => ("SKIPPED", d),
        };
        println!("{tag} criterion {:>2} {name} ({secs:.1}s): {detail}", i + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
