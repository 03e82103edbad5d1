//! Command-line front end. Every global flag can also come from a
//! `key=value` config file; flags given on the command line win.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::kellergraph::{parse_clique_file, KellerInstance};
use crate::pipeline::{
    break_symmetries, check_files, encode_to_file, recheck_run, report_run, solve_file, trim_files,
    verify_clique_file, verify_dim8, BreakOptions, Dim8Status, ProofStorage, RunOptions, Selection,
    SolveOptions, Verdict,
};
use crate::satkit::Budget;
use crate::tilinglab::{
    clique_to_tiling, measure_discreteness, parse_tiling_file, render_2d, verify_faceshare_free,
    verify_tiling, PeriodicTiling, TilingVerdict,
};

#[derive(Debug, Parser)]
#[command(name = "keller", version, about = "Keller graph CNF, symmetry breaking, solving and proof checking")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalFlags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalFlags {
    /// Worker threads for case solving
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Conflict limit per case
    #[arg(long, global = true)]
    pub budget_conflicts: Option<u64>,
    /// Wall-clock limit per case, in seconds
    #[arg(long, global = true)]
    pub budget_wall: Option<f64>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Apply deletions of unit and reason clauses while checking
    #[arg(long, global = true)]
    pub strict_deletions: bool,
    /// key=value file with defaults for the flags above
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the clique-existence CNF of G_{n,s}
    Encode {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        s: usize,
    },
    /// Enumerate the symmetry-broken cases of G_{7,s} and check the cover
    Break {
        #[arg(short)]
        s: usize,
        /// Drop one case before the cover check
        #[arg(long)]
        drop_case: Option<usize>,
        /// Also refute the uncovered-assignment formula with the solver
        #[arg(long)]
        sat_cover: bool,
        #[arg(long)]
        skip_rat: bool,
    },
    /// Solve cases of a CNF or iCNF file and check every proof
    Solve {
        input: PathBuf,
        /// `all`, `sample:K`, or a list like `0,5,10-12`
        #[arg(long)]
        cases: Option<String>,
        /// Shorthand for `--cases sample:K`
        #[arg(long, conflicts_with = "cases")]
        sample: Option<usize>,
        /// none, trimmed or raw
        #[arg(long, default_value = "trimmed")]
        proofs: String,
        #[arg(long)]
        break_report: Option<PathBuf>,
    },
    /// Check a DRAT proof (text or binary)
    Check {
        formula: PathBuf,
        proof: PathBuf,
        /// Conjoin this cube of an iCNF file
        #[arg(long)]
        case: Option<usize>,
    },
    /// Keep only the proof steps the refutation uses
    Trim {
        formula: PathBuf,
        proof: PathBuf,
        #[arg(long)]
        case: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Verify a periodic cube tiling
    Tile {
        /// Tiling file (`tiling d s` then 2^d corners)
        #[arg(long, conflicts_with_all = ["lattice", "clique"])]
        file: Option<PathBuf>,
        /// The lattice tiling of this dimension
        #[arg(long)]
        lattice: Option<usize>,
        /// Tiling built from a clique file
        #[arg(long)]
        clique: Option<PathBuf>,
        #[arg(short, default_value_t = 2)]
        s: usize,
        /// Print 2-D tilings as text
        #[arg(long)]
        art: bool,
    },
    /// Check that a clique file lists pairwise adjacent vertices
    VerifyClique { file: PathBuf },
    /// Satisfiability and tiling checks from a 256-clique of G_{8,2}
    VerifyDim8 {
        file: PathBuf,
        /// Also embed into G_{8,s} for these s
        #[arg(long, value_delimiter = ',')]
        embed: Vec<usize>,
    },
    /// Summarize a run directory
    Report {
        dir: PathBuf,
        /// Re-check stored proofs first
        #[arg(long)]
        recheck: bool,
    },
}

/// Parse `key=value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<GlobalFlags> {
    let mut map = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(idx + 1, format!("expected key=value, got `{line}`")))?;
        map.insert(k.trim().replace('_', "-"), (idx + 1, v.trim().to_string()));
    }
    let mut g = GlobalFlags::default();
    for (key, (line, value)) in map {
        let bad = |e: String| Error::parse(line, format!("{key}: {e}"));
        match key.as_str() {
            "jobs" => g.jobs = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
            "seed" => g.seed = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
            "budget-conflicts" => g.budget_conflicts = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
            "budget-wall" => g.budget_wall = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
            "out-dir" => g.out_dir = Some(PathBuf::from(value)),
            "strict-deletions" => g.strict_deletions = value.parse().map_err(|e| bad(format!("{e}")))?,
            _ => return Err(Error::parse(line, format!("unknown key `{key}`"))),
        }
    }
    Ok(g)
}

/// Command-line values over config-file values over defaults.
pub fn resolve_options(flags: &GlobalFlags) -> Result<RunOptions> {
    let file = match &flags.config {
        Some(p) => parse_config(&fs::read_to_string(p)?)?,
        None => GlobalFlags::default(),
    };
    let defaults = RunOptions::default();
    let wall = flags.budget_wall.or(file.budget_wall);
    if let Some(w) = wall {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::Input(format!("budget-wall must be positive, got {w}")));
        }
    }
    Ok(RunOptions {
        jobs: flags.jobs.or(file.jobs).unwrap_or(defaults.jobs),
        seed: flags.seed.or(file.seed).unwrap_or(defaults.seed),
        budget: Budget {
            conflicts: flags.budget_conflicts.or(file.budget_conflicts).or(defaults.budget.conflicts),
            wall: wall.map(Duration::from_secs_f64),
        },
        out_dir: flags.out_dir.clone().or(file.out_dir).unwrap_or(defaults.out_dir),
        strict_deletions: flags.strict_deletions || file.strict_deletions,
    })
}

/// Exit code for a failed command: 2 for bad input, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Cover(_) | Error::ProofRejected(_) | Error::Internal(_) => 1,
        _ => 2,
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run_command(cmd: Command, opts: &RunOptions) -> Result<i32> {
    match cmd {
        Command::Encode { n, s } => {
            let r = encode_to_file(&KellerInstance::new(n, s)?, &opts.out_dir)?;
            println!("p cnf {} {}", r.variables, r.clauses);
            for (family, count) in &r.families {
                println!("c {family} {count}");
            }
            println!("c wrote {}", r.file.display());
            Ok(0)
        }
        Command::Break {
            s,
            drop_case,
            sat_cover,
            skip_rat,
        } => {
            let r = break_symmetries(
                s,
                opts,
                &BreakOptions {
                    drop_case,
                    sat_cover,
                    skip_rat,
                },
            )?;
            println!(
                "s={s}: {} matrix classes, {} coordinate-3/4 classes, {} hard subcases, {} cases",
                r.matrix_classes, r.coord34_classes, r.hardest_subcases, r.cases
            );
            println!(
                "blocking clauses: {} matrix, {} coordinate-3/4, {} hard case",
                r.matrix_blocking, r.coord34_blocking, r.hardest_blocking
            );
            println!("cover check passed; RAT binaries {}", if r.rat_verified { "verified" } else { "not checked" });
            Ok(0)
        }
        Command::Solve {
            input,
            cases,
            sample,
            proofs,
            break_report,
        } => {
            let selection = match (cases, sample) {
                (Some(c), _) => Some(Selection::parse(&c)?),
                (None, Some(k)) => Some(Selection::Sample(k)),
                (None, None) => None,
            };
            let proofs: ProofStorage = proofs.parse()?;
            let m = solve_file(
                &input,
                opts,
                &SolveOptions {
                    selection,
                    proofs,
                    break_report,
                },
            )?;
            for c in &m.cases {
                println!(
                    "case {:>6}  {:<15} conflicts {}",
                    c.case_index, c.status, c.conflicts
                );
            }
            println!("verdict: {}", m.verdict);
            Ok(match m.verdict {
                Verdict::CheckFailed => 1,
                _ => 0,
            })
        }
        Command::Check { formula, proof, case } => {
            let r = check_files(&formula, &proof, case, opts)?;
            println!("{}", r.to_json());
            Ok(r.exit_code())
        }
        Command::Trim {
            formula,
            proof,
            case,
            output,
        } => {
            let r = trim_files(&formula, &proof, case, &output, opts)?;
            print_json(&r)?;
            Ok(if r.verified { 0 } else { 1 })
        }
        Command::Tile {
            file,
            lattice,
            clique,
            s,
            art,
        } => tile(file, lattice, clique, s, art),
        Command::VerifyClique { file } => {
            let r = verify_clique_file(&file)?;
            print_json(&r)?;
            Ok(if r.is_clique { 0 } else { 1 })
        }
        Command::VerifyDim8 { file, embed } => {
            let r = verify_dim8(&file, &embed)?;
            print_json(&r)?;
            Ok(match r.status {
                Dim8Status::Passed | Dim8Status::Skipped => 0,
                Dim8Status::Failed => 1,
            })
        }
        Command::Report { dir, recheck } => {
            if recheck {
                recheck_run(&dir, opts)?;
            }
            print!("{}", report_run(&dir)?);
            Ok(0)
        }
    }
}

fn tile(file: Option<PathBuf>, lattice: Option<usize>, clique: Option<PathBuf>, s: usize, art: bool) -> Result<i32> {
    let tiling = match (file, lattice, clique) {
        (Some(f), _, _) => parse_tiling_file(&fs::read_to_string(f)?)?,
        (None, Some(d), _) => PeriodicTiling::lattice(d, s),
        (None, None, Some(c)) => {
            let (inst, vs) = parse_clique_file(&fs::read_to_string(c)?)?;
            clique_to_tiling(&vs, &inst)?.to_periodic()
        }
        (None, None, None) => return Err(Error::Input("give --file, --lattice or --clique".into())),
    };
    let verdict = verify_tiling(&tiling);
    println!("tiling: {verdict}");
    if verdict != TilingVerdict::Tiling {
        return Ok(1);
    }
    let v = tiling.verify()?;
    println!("faceshare-free: {}", verify_faceshare_free(&v)?.is_free());
    println!("residues per coordinate: {:?}", measure_discreteness(&v)?);
    if art && v.dim() == 2 {
        print!("{}", render_2d(&v)?);
    }
    Ok(0)
}

/// Parse arguments, run, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = resolve_options(&cli.global).and_then(|opts| run_command(cli.command, &opts));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Options as a subcommand would see them, for tools embedding the CLI.
pub fn options_from_config(path: &Path) -> Result<RunOptions> {
    resolve_options(&GlobalFlags {
        config: Some(path.to_path_buf()),
        ..GlobalFlags::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_mirrors_flags() {
        let g = parse_config(
            "# defaults\njobs = 4\nseed=9\nbudget-conflicts=100\nbudget_wall=2.5\nout-dir=runs\nstrict-deletions=true\n",
        )
        .unwrap();
        assert_eq!(g.jobs, Some(4));
        assert_eq!(g.seed, Some(9));
        assert_eq!(g.budget_conflicts, Some(100));
        assert_eq!(g.budget_wall, Some(2.5));
        assert_eq!(g.out_dir, Some(PathBuf::from("runs")));
        assert!(g.strict_deletions);
        assert!(parse_config("colour=blue").is_err());
        assert!(parse_config("jobs").is_err());
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("keller.conf");
        fs::write(&path, "jobs=3\nseed=5\n").unwrap();
        let opts = resolve_options(&GlobalFlags {
            seed: Some(7),
            config: Some(path.clone()),
            ..GlobalFlags::default()
        })
        .unwrap();
        assert_eq!((opts.jobs, opts.seed), (3, 7));
        assert_eq!(options_from_config(&path).unwrap().seed, 5);
    }

    #[test]
    fn encode_exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        assert_eq!(run(["keller", "--out-dir", out, "encode", "-n", "2", "-s", "2"]), 0);
        let text = fs::read_to_string(dir.path().join("keller_2_2.cnf")).unwrap();
        assert!(text.contains("p cnf 32 74\n"));
        assert_eq!(run(["keller", "--out-dir", out, "encode", "-n", "1", "-s", "3"]), 2);
        assert_eq!(run(["keller", "frobnicate"]), 2);
    }
}
