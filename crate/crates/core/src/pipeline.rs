//! End-to-end runs: encode, break symmetries into cases, solve and check
//! every selected case, and aggregate the results into a manifest.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dratcheck::{check_proof_with, check_rat, trim_with, CheckOptions, CheckReport, Proof};
use crate::encoder::{clique_to_units, decode_model, encode, ClauseFamily};
use crate::error::{Error, Result};
use crate::kellergraph::{check_clique, parse_clique_file, write_clique_file, CliqueCheck, KellerInstance, Vertex};
use crate::satkit::{
    parse_dimacs, parse_proof, propagate, solve, write_icnf, write_text_drat, Budget, Formula, ParseOptions,
    PropagationOutcome, SolveStatus, Valuation,
};
use crate::symmetry::{
    coord34_blocking_clauses, coord34_classes, cover_check, cover_check_sat, enumerate_cases,
    hardest_blocking_clauses, hardest_split, matrix_blocking_clauses, matrix_classes, phi, rat_binaries,
    symmetry_broken, write_class_list, CoverSummary, HARDEST_MATRIX,
};
use crate::symmetry::{Coord34Assignment, MatrixAssignment};
use crate::tilinglab::{clique_to_tiling, measure_discreteness, verify_faceshare_free};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_artifact(dir: &Path, name: &str, bytes: &[u8], out: &mut Vec<Artifact>) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, bytes)?;
    out.push(Artifact {
        file: name.to_string(),
        sha256: sha256_hex(bytes),
    });
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub file: String,
    pub sha256: String,
}

/// Settings shared by every command.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub jobs: usize,
    pub seed: u64,
    pub budget: Budget,
    pub out_dir: PathBuf,
    pub strict_deletions: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            jobs: 1,
            seed: 0,
            budget: Budget::default(),
            out_dir: PathBuf::from("out"),
            strict_deletions: false,
        }
    }
}

impl RunOptions {
    fn check_options(&self) -> CheckOptions {
        CheckOptions {
            strict_deletions: self.strict_deletions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EncodeReport {
    pub n: usize,
    pub s: usize,
    pub file: PathBuf,
    pub sha256: String,
    pub variables: u32,
    pub clauses: usize,
    pub families: Vec<(String, usize)>,
}

/// Write `keller_<n>_<s>.cnf` into the output directory.
pub fn encode_to_file(inst: &KellerInstance, out_dir: &Path) -> Result<EncodeReport> {
    let db = encode(inst)?;
    fs::create_dir_all(out_dir)?;
    let text = db.to_dimacs_string();
    let file = out_dir.join(format!("keller_{}_{}.cnf", inst.n(), inst.s()));
    fs::write(&file, text.as_bytes())?;
    let families = db
        .family_ranges()
        .into_iter()
        .map(|(f, _, _, count)| (f.name().to_string(), count))
        .collect();
    Ok(EncodeReport {
        n: inst.n(),
        s: inst.s(),
        file,
        sha256: sha256_hex(text.as_bytes()),
        variables: db.num_vars(),
        clauses: db.len(),
        families,
    })
}

/// Class counts for the full dimension-7 split: matrix classes,
/// coordinate-3/4 classes, hard-case subcases, cases.
pub fn expected_break_counts(s: usize) -> Option<(usize, usize, usize, usize)> {
    match s {
        3 => Some((25, 861, 33, 21_557)),
        4 => Some((28, 1_326, 33, 37_160)),
        6 => Some((28, 1_378, 33, 38_616)),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatRecord {
    pub clause: Vec<i32>,
    pub pivot: i32,
    pub passed: bool,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakReport {
    pub s: usize,
    pub matrix_classes: usize,
    pub coord34_classes: usize,
    pub hardest_subcases: usize,
    pub cases: usize,
    pub matrix_blocking: usize,
    pub coord34_blocking: usize,
    pub hardest_blocking: usize,
    /// False when s has no reference counts to compare against.
    pub counts_validated: bool,
    pub cover_passed: bool,
    pub cover: Option<CoverStats>,
    pub sat_cover_passed: Option<bool>,
    pub rat: Vec<RatRecord>,
    pub rat_verified: bool,
    pub artifacts: Vec<Artifact>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverStats {
    pub valid_matrices: usize,
    pub coord34_assignments: usize,
    pub c2_assignments: usize,
    pub cubes: usize,
}

impl From<CoverSummary> for CoverStats {
    fn from(c: CoverSummary) -> Self {
        CoverStats {
            valid_matrices: c.valid_matrices,
            coord34_assignments: c.coord34_assignments,
            c2_assignments: c.c2_assignments,
            cubes: c.cubes,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct BreakOptions {
    /// Remove this case before the cover check (negative control).
    pub drop_case: Option<usize>,
    /// Also run the SAT form of the cover check.
    pub sat_cover: bool,
    /// Skip the RAT checks of the three binaries.
    pub skip_rat: bool,
}

pub fn break_report_name(s: usize) -> String {
    format!("break_7_{s}.json")
}

pub fn case_file_name(s: usize) -> String {
    format!("cases_7_{s}.icnf")
}

/// Check the three binaries in order, each against Φ plus the binaries
/// before it, with the first literal as pivot.
pub fn verify_rat_binaries(inst: &KellerInstance) -> Result<Vec<RatRecord>> {
    let mut db = phi(inst)?.into_formula();
    db.set_keller_instance(inst.n(), inst.s());
    let mut out = Vec::new();
    for b in rat_binaries(inst)? {
        let start = Instant::now();
        let passed = check_rat(&b, b[0], &db)?;
        out.push(RatRecord {
            clause: b.to_vec(),
            pivot: b[0],
            passed,
            seconds: start.elapsed().as_secs_f64(),
        });
        db.push_clause(b.to_vec());
    }
    Ok(out)
}

/// Enumerate cases for G_{7,s}, validate the counts, run the cover check and
/// the RAT checks, and write every artifact.
pub fn break_symmetries(s: usize, opts: &RunOptions, bopts: &BreakOptions) -> Result<BreakReport> {
    let inst = KellerInstance::new(7, s)?;
    let expected = expected_break_counts(s);
    if expected.is_none() {
        eprintln!("warning: s = {s} has no reference class counts; counts are unvalidated");
    }
    let matrices = matrix_classes(&inst)?;
    let coords = coord34_classes(&inst)?;
    let hard = hardest_split(
        &inst,
        &MatrixAssignment(HARDEST_MATRIX),
        &Coord34Assignment([0; 8]),
    )?;
    let mut cases = enumerate_cases(&inst)?;
    if let Some((m, c, h, total)) = expected {
        let got = (matrices.len(), coords.len(), hard.len(), cases.len());
        if got != (m, c, h, total) {
            return Err(Error::Internal(format!(
                "class counts for s = {s} are {got:?}, expected {:?}",
                (m, c, h, total)
            )));
        }
    }

    let dir = &opts.out_dir;
    fs::create_dir_all(dir)?;
    let mut artifacts = Vec::new();

    let phi_db = phi(&inst)?;
    write_artifact(dir, &format!("phi_7_{s}.cnf"), phi_db.to_dimacs_string().as_bytes(), &mut artifacts)?;
    drop(phi_db);

    let mut rat_text = Vec::new();
    let rat_proof = Proof::new(
        rat_binaries(&inst)?
            .iter()
            .map(|b| crate::dratcheck::ProofStep::add(b.to_vec()))
            .collect(),
    );
    write_text_drat(&rat_proof, &mut rat_text)?;
    write_artifact(dir, &format!("rat_7_{s}.drat"), &rat_text, &mut artifacts)?;

    let mb = matrix_blocking_clauses(&inst)?;
    let cb = coord34_blocking_clauses(&inst)?;
    let hb = hardest_blocking_clauses(&inst)?;
    let mut blocking = Vec::new();
    let all_blocking: Vec<Vec<i32>> = mb.iter().chain(&cb).chain(&hb).cloned().collect();
    blocking.extend_from_slice(
        format!(
            "c keller 7 {s}\nc family {} count {}\np cnf {} {}\n",
            ClauseFamily::TrustedSymmetry.name(),
            all_blocking.len(),
            crate::encoder::VarMap::new(&inst).num_vars(),
            all_blocking.len()
        )
        .as_bytes(),
    );
    crate::satkit::write_clause_lines(&mut blocking, &all_blocking)?;
    write_artifact(dir, &format!("blocking_7_{s}.cnf"), &blocking, &mut artifacts)?;

    write_artifact(dir, &format!("matrix_classes_7_{s}.txt"), write_class_list(&matrices).as_bytes(), &mut artifacts)?;
    write_artifact(dir, &format!("coord34_classes_7_{s}.txt"), write_class_list(&coords).as_bytes(), &mut artifacts)?;
    write_artifact(dir, &format!("hardest_classes_7_{s}.txt"), write_class_list(&hard).as_bytes(), &mut artifacts)?;

    let mut formula = symmetry_broken(&inst, true)?.into_formula();
    formula.set_keller_instance(7, s);
    let cubes: Vec<Vec<i32>> = cases.iter().map(|c| c.literals.clone()).collect();
    let mut icnf = Vec::new();
    write_icnf(&formula, &cubes, &mut icnf)?;
    write_artifact(dir, &case_file_name(s), &icnf, &mut artifacts)?;
    drop(icnf);
    drop(formula);

    if let Some(k) = bopts.drop_case {
        if k >= cases.len() {
            return Err(Error::Input(format!("no case {k} to drop")));
        }
        cases.remove(k);
    }
    let cover = cover_check(&cases, &inst)?;
    let sat_cover_passed = if bopts.sat_cover {
        Some(cover_check_sat(&cases, &inst, &opts.budget, opts.seed)?.passed())
    } else {
        None
    };
    if sat_cover_passed == Some(false) {
        return Err(Error::Cover("SAT cover check did not refute the uncovered-assignment formula".into()));
    }

    let rat = if bopts.skip_rat {
        Vec::new()
    } else {
        verify_rat_binaries(&inst)?
    };
    let rat_verified = !rat.is_empty() && rat.iter().all(|r| r.passed);
    if !bopts.skip_rat && !rat_verified {
        let bad = rat.iter().find(|r| !r.passed).expect("some binary failed");
        return Err(Error::ProofRejected(format!(
            "binary {:?} is not RAT on pivot {}",
            bad.clause, bad.pivot
        )));
    }

    let report = BreakReport {
        s,
        matrix_classes: matrices.len(),
        coord34_classes: coords.len(),
        hardest_subcases: hard.len(),
        cases: cover.cubes,
        matrix_blocking: mb.len(),
        coord34_blocking: cb.len(),
        hardest_blocking: hb.len(),
        counts_validated: expected.is_some(),
        cover_passed: true,
        cover: Some(cover.into()),
        sat_cover_passed,
        rat,
        rat_verified,
        artifacts,
    };
    fs::write(dir.join(break_report_name(s)), serde_json::to_vec_pretty(&report)?)?;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseStatus {
    #[serde(rename = "UNSAT-verified")]
    UnsatVerified,
    #[serde(rename = "SAT")]
    Sat,
    #[serde(rename = "UNKNOWN")]
    Unknown,
    #[serde(rename = "check-failed")]
    CheckFailed,
}

impl CaseStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseStatus::UnsatVerified => "UNSAT-verified",
            CaseStatus::Sat => "SAT",
            CaseStatus::Unknown => "UNKNOWN",
            CaseStatus::CheckFailed => "check-failed",
        }
    }
}

impl fmt::Display for CaseStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub case_index: usize,
    pub status: CaseStatus,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub proof_steps: Option<usize>,
    pub trimmed_steps: Option<usize>,
    pub proof_file: Option<String>,
    pub proof_sha256: Option<String>,
    /// Decoded clique for SAT cases, one vertex per entry.
    pub clique: Option<Vec<Vec<u32>>>,
    pub clique_verified: Option<bool>,
    pub note: Option<String>,
}

/// Outcome of a structural check that the verdict depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureCheck {
    Passed,
    Failed,
    NotRun,
    /// Nothing to check: the formula was solved without a case split.
    NotNeeded,
}

impl StructureCheck {
    fn ok(self) -> bool {
        matches!(self, StructureCheck::Passed | StructureCheck::NotNeeded)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "refuted")]
    Refuted,
    #[serde(rename = "counterexample candidate")]
    CounterexampleCandidate,
    #[serde(rename = "satisfiable")]
    Satisfiable,
    #[serde(rename = "check-failed")]
    CheckFailed,
    #[serde(rename = "incomplete")]
    Incomplete,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Refuted => "refuted",
            Verdict::CounterexampleCandidate => "counterexample candidate",
            Verdict::Satisfiable => "satisfiable",
            Verdict::CheckFailed => "check-failed",
            Verdict::Incomplete => "incomplete",
        };
        f.pad(s)
    }
}

/// "refuted" needs every case of the split UNSAT-verified, the cover check
/// and the RAT binaries both accounted for.
pub fn verdict(
    records: &[CaseRecord],
    case_count: usize,
    n: Option<usize>,
    cover: StructureCheck,
    rat: StructureCheck,
) -> Verdict {
    if records.iter().any(|r| r.status == CaseStatus::Sat) {
        return if n == Some(7) {
            Verdict::CounterexampleCandidate
        } else {
            Verdict::Satisfiable
        };
    }
    if records.iter().any(|r| r.status == CaseStatus::CheckFailed)
        || cover == StructureCheck::Failed
        || rat == StructureCheck::Failed
    {
        return Verdict::CheckFailed;
    }
    let mut seen: Vec<usize> = records
        .iter()
        .filter(|r| r.status == CaseStatus::UnsatVerified)
        .map(|r| r.case_index)
        .collect();
    seen.sort_unstable();
    seen.dedup();
    let all = case_count > 0 && seen.len() == case_count && seen.iter().all(|&i| i < case_count);
    if all && cover.ok() && rat.ok() {
        Verdict::Refuted
    } else {
        Verdict::Incomplete
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub case_seconds: BTreeMap<usize, f64>,
    pub runtimes_csv_sha256: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub instance: Option<(usize, usize)>,
    pub input: String,
    pub input_sha256: String,
    pub case_count: usize,
    pub selected: Vec<usize>,
    pub seed: u64,
    pub budget_conflicts: Option<u64>,
    pub budget_wall_seconds: Option<f64>,
    pub cover: StructureCheck,
    pub rat: StructureCheck,
    pub cases: Vec<CaseRecord>,
    pub verdict: Verdict,
    pub artifacts: Vec<Artifact>,
    /// Wall-clock data; everything outside this field is reproducible.
    pub timings: Timings,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&fs::read(path)?)?)
    }

    pub fn count(&self, status: CaseStatus) -> usize {
        self.cases.iter().filter(|c| c.status == status).count()
    }

    /// The manifest with its timing field cleared, for comparisons.
    pub fn without_timings(&self) -> RunManifest {
        let mut m = self.clone();
        m.timings = Timings {
            total_seconds: 0.0,
            case_seconds: BTreeMap::new(),
            runtimes_csv_sha256: None,
        };
        m
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    All,
    Indices(Vec<usize>),
    /// A seeded uniform sample of this many cases.
    Sample(usize),
}

impl Selection {
    /// `all`, a count prefixed by `sample:`, or a comma list of indices and
    /// `a-b` ranges.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "all" {
            return Ok(Selection::All);
        }
        if let Some(k) = text.strip_prefix("sample:") {
            let k = k
                .parse()
                .map_err(|_| Error::Input(format!("bad sample size `{k}`")))?;
            return Ok(Selection::Sample(k));
        }
        let mut out = Vec::new();
        for part in text.split(',') {
            let part = part.trim();
            let bad = || Error::Input(format!("bad case selection `{part}`"));
            if let Some((a, b)) = part.split_once('-') {
                let a: usize = a.parse().map_err(|_| bad())?;
                let b: usize = b.parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            } else {
                out.push(part.parse().map_err(|_| bad())?);
            }
        }
        Ok(Selection::Indices(out))
    }

    pub fn resolve(&self, case_count: usize, seed: u64) -> Result<Vec<usize>> {
        let mut out = match self {
            Selection::All => (0..case_count).collect(),
            Selection::Indices(v) => {
                if let Some(&bad) = v.iter().find(|&&i| i >= case_count) {
                    return Err(Error::Input(format!("case {bad} outside 0..{case_count}")));
                }
                v.clone()
            }
            Selection::Sample(k) => {
                if *k > case_count {
                    return Err(Error::Input(format!("cannot sample {k} of {case_count} cases")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                index::sample(&mut rng, case_count, *k).into_vec()
            }
        };
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProofStorage {
    None,
    #[default]
    Trimmed,
    Raw,
}

impl std::str::FromStr for ProofStorage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ProofStorage::None),
            "trimmed" => Ok(ProofStorage::Trimmed),
            "raw" => Ok(ProofStorage::Raw),
            _ => Err(Error::Input(format!("proof storage must be none, trimmed or raw, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub selection: Option<Selection>,
    pub proofs: ProofStorage,
    /// Structure report from `break`; looked up next to the input if unset.
    pub break_report: Option<PathBuf>,
}

pub fn proof_file_name(case_index: usize) -> String {
    format!("case_{case_index:06}.drat")
}

struct CaseRun {
    record: CaseRecord,
    seconds: f64,
    proof: Option<Vec<u8>>,
}

fn per_case_seed(seed: u64, case_index: usize) -> u64 {
    seed ^ (case_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn run_case(formula: &Formula, index: usize, cube: &[i32], opts: &RunOptions, storage: ProofStorage) -> Result<CaseRun> {
    let start = Instant::now();
    let result = solve(formula, cube, &opts.budget, per_case_seed(opts.seed, index))?;
    let mut record = CaseRecord {
        case_index: index,
        status: CaseStatus::Unknown,
        conflicts: result.stats.conflicts,
        decisions: result.stats.decisions,
        propagations: result.stats.propagations,
        proof_steps: None,
        trimmed_steps: None,
        proof_file: None,
        proof_sha256: None,
        clique: None,
        clique_verified: None,
        note: None,
    };
    let mut stored = None;
    match result.status {
        SolveStatus::Unknown => record.note = Some("budget exhausted".into()),
        SolveStatus::Sat => {
            record.status = CaseStatus::Sat;
            if let (Some((n, s)), Some(model)) = (formula.keller_instance(), &result.model) {
                let inst = KellerInstance::new(n, s)?;
                let clique = decode_model(model, &inst)?;
                record.clique_verified = Some(check_clique(&clique, &inst)?.is_clique());
                record.clique = Some(clique.iter().map(|v| v.coords().to_vec()).collect());
                if n == 7 {
                    record.note = Some("counterexample candidate".into());
                }
            }
        }
        SolveStatus::Unsat => {
            let proof = result.proof.expect("UNSAT carries a proof");
            record.proof_steps = Some(proof.len());
            let target = formula.with_units(cube);
            let report = check_proof_with(&target, &proof, opts.check_options());
            if !report.accepted {
                record.status = CaseStatus::CheckFailed;
                record.note = report.failure.map(|f| format!("step {}: {}", f.step, f.reason));
            } else {
                record.status = CaseStatus::UnsatVerified;
                let keep = match storage {
                    ProofStorage::None => None,
                    ProofStorage::Raw => Some(proof),
                    ProofStorage::Trimmed => match trim_with(&target, &proof, opts.check_options()) {
                        Ok(t) if t.report.accepted => {
                            record.trimmed_steps = Some(t.proof.len());
                            Some(t.proof)
                        }
                        Ok(_) | Err(_) => {
                            record.status = CaseStatus::CheckFailed;
                            record.note = Some("trimmed proof did not re-verify".into());
                            None
                        }
                    },
                };
                if let Some(p) = keep {
                    let mut bytes = Vec::new();
                    write_text_drat(&p, &mut bytes)?;
                    record.proof_file = Some(format!("proofs/{}", proof_file_name(index)));
                    record.proof_sha256 = Some(sha256_hex(&bytes));
                    stored = Some(bytes);
                }
            }
        }
    }
    Ok(CaseRun {
        record,
        seconds: start.elapsed().as_secs_f64(),
        proof: stored,
    })
}

/// Cases of a formula: its cubes, or the formula itself as case 0.
pub fn formula_cases(formula: &Formula) -> Vec<Vec<i32>> {
    if formula.cubes().is_empty() {
        vec![Vec::new()]
    } else {
        formula.cubes().to_vec()
    }
}

fn structure_from_break(path: &Path) -> Result<(StructureCheck, StructureCheck)> {
    let report: BreakReport = serde_json::from_slice(&fs::read(path)?)?;
    let pass = |ok: bool| if ok { StructureCheck::Passed } else { StructureCheck::Failed };
    let rat = if report.rat.is_empty() {
        StructureCheck::NotRun
    } else {
        pass(report.rat_verified)
    };
    Ok((pass(report.cover_passed), rat))
}

/// Solve the selected cases of `input` in parallel, check each UNSAT proof
/// right away, and write `manifest.json`, `runtimes.csv` and the proofs.
pub fn solve_file(input: &Path, opts: &RunOptions, sopts: &SolveOptions) -> Result<RunManifest> {
    let start = Instant::now();
    let bytes = fs::read(input)?;
    let mut formula = parse_dimacs(&bytes, ParseOptions::default())?;
    let cubes = formula_cases(&formula);
    formula.take_cubes();
    let split = !(cubes.len() == 1 && cubes[0].is_empty());
    let selection = sopts.selection.clone().unwrap_or(Selection::All);
    let selected = selection.resolve(cubes.len(), opts.seed)?;

    let (cover, rat) = if !split {
        (StructureCheck::NotNeeded, StructureCheck::NotNeeded)
    } else {
        let guess = formula
            .keller_instance()
            .map(|(_, s)| input.with_file_name(break_report_name(s)));
        match sopts.break_report.clone().or(guess) {
            Some(p) if p.exists() => structure_from_break(&p)?,
            _ => (StructureCheck::NotRun, StructureCheck::NotRun),
        }
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let mut runs: Vec<CaseRun> = pool.install(|| {
        selected
            .par_iter()
            .map(|&i| run_case(&formula, i, &cubes[i], opts, sopts.proofs))
            .collect::<Result<Vec<_>>>()
    })?;
    runs.sort_by_key(|r| r.record.case_index);

    let dir = &opts.out_dir;
    fs::create_dir_all(dir)?;
    let mut artifacts = Vec::new();
    if runs.iter().any(|r| r.proof.is_some()) {
        fs::create_dir_all(dir.join("proofs"))?;
    }
    for r in &runs {
        if let (Some(bytes), Some(name)) = (&r.proof, &r.record.proof_file) {
            write_artifact(dir, name, bytes, &mut artifacts)?;
        }
        if let (Some(clique), Some((n, s))) = (&r.record.clique, formula.keller_instance()) {
            let inst = KellerInstance::new(n, s)?;
            let vs: Vec<Vertex> = clique.iter().map(|c| Vertex::new(c.clone())).collect();
            let name = format!("clique_case_{:06}.txt", r.record.case_index);
            write_artifact(dir, &name, write_clique_file(&inst, &vs).as_bytes(), &mut artifacts)?;
        }
    }

    let mut csv = String::from("case_index,status,conflicts,seconds\n");
    for r in &runs {
        csv.push_str(&format!(
            "{},{},{},{:.6}\n",
            r.record.case_index, r.record.status, r.record.conflicts, r.seconds
        ));
    }
    fs::write(dir.join("runtimes.csv"), csv.as_bytes())?;

    let records: Vec<CaseRecord> = runs.iter().map(|r| r.record.clone()).collect();
    let n = formula.keller_instance().map(|(n, _)| n);
    let manifest = RunManifest {
        instance: formula.keller_instance(),
        input: input.display().to_string(),
        input_sha256: sha256_hex(&bytes),
        case_count: cubes.len(),
        selected,
        seed: opts.seed,
        budget_conflicts: opts.budget.conflicts,
        budget_wall_seconds: opts.budget.wall.map(|w| w.as_secs_f64()),
        cover,
        rat,
        verdict: verdict(&records, cubes.len(), n, cover, rat),
        cases: records,
        artifacts,
        timings: Timings {
            total_seconds: start.elapsed().as_secs_f64(),
            case_seconds: runs.iter().map(|r| (r.record.case_index, r.seconds)).collect(),
            runtimes_csv_sha256: Some(sha256_hex(csv.as_bytes())),
        },
    };
    fs::write(dir.join("manifest.json"), serde_json::to_vec_pretty(&manifest)?)?;
    Ok(manifest)
}

/// Read a formula and, for a case split, conjoin the selected cube.
pub fn load_case(formula_path: &Path, case: Option<usize>) -> Result<Formula> {
    let mut f = parse_dimacs(&fs::read(formula_path)?, ParseOptions::default())?;
    let cubes = f.take_cubes();
    match case {
        None => Ok(f),
        Some(i) => {
            let cube = cubes
                .get(i)
                .ok_or_else(|| Error::Input(format!("case {i} outside 0..{}", cubes.len())))?;
            Ok(f.with_units(cube))
        }
    }
}

pub fn check_files(formula: &Path, proof: &Path, case: Option<usize>, opts: &RunOptions) -> Result<CheckReport> {
    let f = load_case(formula, case)?;
    let p = parse_proof(&fs::read(proof)?)?;
    Ok(check_proof_with(&f, &p, opts.check_options()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrimReport {
    pub original_steps: usize,
    pub trimmed_steps: usize,
    pub core_clauses: usize,
    pub output: PathBuf,
    pub sha256: String,
    pub verified: bool,
}

pub fn trim_files(
    formula: &Path,
    proof: &Path,
    case: Option<usize>,
    output: &Path,
    opts: &RunOptions,
) -> Result<TrimReport> {
    let f = load_case(formula, case)?;
    let p = parse_proof(&fs::read(proof)?)?;
    let t = trim_with(&f, &p, opts.check_options())?;
    let mut bytes = Vec::new();
    write_text_drat(&t.proof, &mut bytes)?;
    if let Some(parent) = output.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(output, &bytes)?;
    Ok(TrimReport {
        original_steps: t.original_steps,
        trimmed_steps: t.proof.len(),
        core_clauses: t.core.len(),
        output: output.to_path_buf(),
        sha256: sha256_hex(&bytes),
        verified: t.report.accepted,
    })
}

/// Re-check every stored proof of a run and rewrite its manifest.
pub fn recheck_run(dir: &Path, opts: &RunOptions) -> Result<RunManifest> {
    let path = dir.join("manifest.json");
    let mut m = RunManifest::read(&path)?;
    let given = PathBuf::from(&m.input);
    let input = if given.exists() {
        given
    } else {
        let local = given.file_name().map(|f| dir.join(f));
        local.filter(|p| p.exists()).ok_or_else(|| {
            Error::Input(format!("input `{}` not found for recheck", m.input))
        })?
    };
    let mut formula = parse_dimacs(&fs::read(&input)?, ParseOptions::default())?;
    let cubes = formula_cases(&formula);
    formula.take_cubes();
    for rec in m.cases.iter_mut() {
        let Some(file) = rec.proof_file.clone() else { continue };
        let bytes = fs::read(dir.join(&file))?;
        let ok_hash = rec.proof_sha256.as_deref() == Some(sha256_hex(&bytes).as_str());
        let target = formula.with_units(&cubes[rec.case_index]);
        let accepted = parse_proof(&bytes)
            .map(|p| check_proof_with(&target, &p, opts.check_options()).accepted)
            .unwrap_or(false);
        if !accepted {
            rec.status = CaseStatus::CheckFailed;
            rec.note = Some(format!("stored proof {file} rejected on recheck"));
        } else if !ok_hash {
            rec.note = Some(format!("stored proof {file} changed but still verifies"));
        }
    }
    let n = m.instance.map(|(n, _)| n);
    m.verdict = verdict(&m.cases, m.case_count, n, m.cover, m.rat);
    fs::write(&path, serde_json::to_vec_pretty(&m)?)?;
    Ok(m)
}

/// Plain-text summary of a run directory.
pub fn report_run(dir: &Path) -> Result<String> {
    let m = RunManifest::read(&dir.join("manifest.json"))?;
    let mut out = String::new();
    match m.instance {
        Some((n, s)) => out.push_str(&format!("instance      G_{{{n},{s}}}\n")),
        None => out.push_str("instance      (plain CNF)\n"),
    }
    out.push_str(&format!("input         {} ({})\n", m.input, &m.input_sha256[..16]));
    out.push_str(&format!("cases         {} selected of {}\n", m.selected.len(), m.case_count));
    for status in [
        CaseStatus::UnsatVerified,
        CaseStatus::Sat,
        CaseStatus::Unknown,
        CaseStatus::CheckFailed,
    ] {
        out.push_str(&format!("  {:<16}{}\n", status.as_str(), m.count(status)));
    }
    let conflicts: u64 = m.cases.iter().map(|c| c.conflicts).sum();
    out.push_str(&format!("conflicts     {conflicts}\n"));
    out.push_str(&format!("cover         {:?}\n", m.cover));
    out.push_str(&format!("rat binaries  {:?}\n", m.rat));
    out.push_str(&format!("wall seconds  {:.2}\n", m.timings.total_seconds));
    out.push_str(&format!("verdict       {}\n", m.verdict));
    for (s, name) in [(3, "3"), (4, "4"), (6, "6")] {
        let p = dir.join(break_report_name(s));
        if p.exists() {
            let b: BreakReport = serde_json::from_slice(&fs::read(&p)?)?;
            out.push_str(&format!(
                "break s={name}     {} cases, cover {}, rat {}\n",
                b.cases,
                if b.cover_passed { "passed" } else { "FAILED" },
                if b.rat_verified { "verified" } else { "not verified" }
            ));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliqueReport {
    pub n: usize,
    pub s: usize,
    pub vertices: usize,
    pub is_clique: bool,
    pub violation: Option<(String, String)>,
}

pub fn verify_clique_file(path: &Path) -> Result<CliqueReport> {
    let text = fs::read_to_string(path)?;
    let (inst, vs) = parse_clique_file(&text)?;
    let check = check_clique(&vs, &inst)?;
    let violation = match &check {
        CliqueCheck::Clique => None,
        CliqueCheck::Violation(u, v) => Some((u.to_string(), v.to_string())),
    };
    Ok(CliqueReport {
        n: inst.n(),
        s: inst.s(),
        vertices: vs.len(),
        is_clique: violation.is_none(),
        violation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Dim8Status {
    Passed,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingRecord {
    pub s: usize,
    pub is_clique: bool,
    pub propagation_conflict_free: bool,
    pub sat: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dim8Report {
    pub status: Dim8Status,
    pub file: String,
    pub reason: Option<String>,
    pub vertices: usize,
    pub is_clique: bool,
    pub sat_by_propagation: bool,
    pub propagation_seconds: f64,
    pub tiling_verified: bool,
    pub faceshare_free: bool,
    pub discreteness: Vec<usize>,
    pub embeddings: Vec<EmbeddingRecord>,
}

impl Dim8Report {
    fn skipped(file: &Path, reason: String) -> Self {
        Dim8Report {
            status: Dim8Status::Skipped,
            file: file.display().to_string(),
            reason: Some(reason),
            vertices: 0,
            is_clique: false,
            sat_by_propagation: false,
            propagation_seconds: 0.0,
            tiling_verified: false,
            faceshare_free: false,
            discreteness: Vec::new(),
            embeddings: Vec::new(),
        }
    }
}

/// Map a vertex of G_{n,s} to G_{n,s'}: each coordinate s·w + k becomes
/// s'·w + k.
pub fn embed_vertex(v: &Vertex, s: usize, s_new: usize) -> Result<Vertex> {
    if s_new < s {
        return Err(Error::Input(format!("cannot embed s = {s} into the smaller s = {s_new}")));
    }
    Ok(Vertex::new(
        v.coords()
            .iter()
            .map(|&c| {
                let (w, k) = (c as usize / s, c as usize % s);
                (s_new * w + k) as u32
            })
            .collect(),
    ))
}

/// Fix the clique's units in encode(inst) and propagate. Returns whether
/// propagation finished without conflict, whether the result satisfies
/// every clause, and the elapsed time.
pub fn clique_propagation(clique: &[Vertex], inst: &KellerInstance) -> Result<(bool, bool, Duration)> {
    let mut f = encode(inst)?.into_formula();
    f.set_keller_instance(inst.n(), inst.s());
    let units = clique_to_units(clique, inst)?;
    let start = Instant::now();
    let outcome = propagate(&f, &units);
    let elapsed = start.elapsed();
    Ok(match outcome {
        PropagationOutcome::Conflict { .. } => (false, false, elapsed),
        PropagationOutcome::Fixpoint(a) => {
            let sat = f.clauses().iter().all(|c| c.iter().any(|&l| a.lit_value(l) == Some(true)));
            (true, sat, elapsed)
        }
    })
}

/// The dimension-8 path on an externally supplied clique of G_{8,2}. A
/// missing file is reported as SKIPPED.
pub fn verify_dim8(path: &Path, embed: &[usize]) -> Result<Dim8Report> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Ok(Dim8Report::skipped(path, "clique file not found".into()));
        }
        Err(e) => return Err(e.into()),
    };
    let (inst, vs) = parse_clique_file(&text)?;
    if (inst.n(), inst.s()) != (8, 2) {
        return Err(Error::Input(format!("expected a clique of G_{{8,2}}, got {inst}")));
    }
    let mut report = Dim8Report::skipped(path, String::new());
    report.reason = None;
    report.status = Dim8Status::Failed;
    report.vertices = vs.len();
    if let CliqueCheck::Violation(u, v) = check_clique(&vs, &inst)? {
        report.reason = Some(format!("{u} and {v} are not adjacent"));
        return Ok(report);
    }
    report.is_clique = vs.len() == inst.block_count();
    if !report.is_clique {
        report.reason = Some(format!("clique has {} vertices, need {}", vs.len(), inst.block_count()));
        return Ok(report);
    }
    let (free, sat, elapsed) = clique_propagation(&vs, &inst)?;
    report.sat_by_propagation = free && sat;
    report.propagation_seconds = elapsed.as_secs_f64();
    match clique_to_tiling(&vs, &inst) {
        Ok(t) => {
            report.tiling_verified = true;
            report.faceshare_free = verify_faceshare_free(&t)?.is_free();
            report.discreteness = measure_discreteness(&t)?;
        }
        Err(e) => report.reason = Some(e.to_string()),
    }
    for &s in embed {
        let big = KellerInstance::new(8, s)?;
        let moved = vs.iter().map(|v| embed_vertex(v, 2, s)).collect::<Result<Vec<_>>>()?;
        let is_clique = check_clique(&moved, &big)?.is_clique();
        let (free, sat, _) = clique_propagation(&moved, &big)?;
        report.embeddings.push(EmbeddingRecord {
            s,
            is_clique,
            propagation_conflict_free: free,
            sat,
        });
    }
    let all = report.sat_by_propagation
        && report.tiling_verified
        && report.faceshare_free
        && report.embeddings.iter().all(|e| e.is_clique && e.sat);
    if all {
        report.status = Dim8Status::Passed;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(i: usize, status: CaseStatus) -> CaseRecord {
        CaseRecord {
            case_index: i,
            status,
            conflicts: 0,
            decisions: 0,
            propagations: 0,
            proof_steps: None,
            trimmed_steps: None,
            proof_file: None,
            proof_sha256: None,
            clique: None,
            clique_verified: None,
            note: None,
        }
    }

    #[test]
    fn verdict_needs_every_piece() {
        use StructureCheck::*;
        let all: Vec<_> = (0..3).map(|i| rec(i, CaseStatus::UnsatVerified)).collect();
        assert_eq!(verdict(&all, 3, Some(7), Passed, Passed), Verdict::Refuted);
        assert_eq!(verdict(&all, 3, Some(7), NotRun, Passed), Verdict::Incomplete);
        assert_eq!(verdict(&all, 3, Some(7), Passed, NotRun), Verdict::Incomplete);
        assert_eq!(verdict(&all, 3, Some(7), Failed, Passed), Verdict::CheckFailed);
        assert_eq!(verdict(&all[..2], 3, Some(7), Passed, Passed), Verdict::Incomplete);
        assert_eq!(verdict(&all[..1], 1, Some(3), NotNeeded, NotNeeded), Verdict::Refuted);

        let mut mixed = all.clone();
        mixed[1].status = CaseStatus::Unknown;
        assert_eq!(verdict(&mixed, 3, Some(7), Passed, Passed), Verdict::Incomplete);
        mixed[2].status = CaseStatus::CheckFailed;
        assert_eq!(verdict(&mixed, 3, Some(7), Passed, Passed), Verdict::CheckFailed);
        mixed[0].status = CaseStatus::Sat;
        assert_eq!(verdict(&mixed, 3, Some(7), Passed, Passed), Verdict::CounterexampleCandidate);
        assert_eq!(verdict(&mixed, 3, Some(3), Passed, Passed), Verdict::Satisfiable);
        assert_eq!(verdict(&[], 0, None, NotNeeded, NotNeeded), Verdict::Incomplete);
    }

    #[test]
    fn selections() {
        assert_eq!(Selection::parse("all").unwrap(), Selection::All);
        assert_eq!(Selection::parse("3,1-2,3").unwrap().resolve(5, 0).unwrap(), vec![1, 2, 3]);
        assert!(Selection::parse("2-1").is_err());
        assert!(Selection::parse("x").is_err());
        assert!(Selection::Indices(vec![9]).resolve(5, 0).is_err());
        let a = Selection::parse("sample:5").unwrap().resolve(21_557, 1).unwrap();
        assert_eq!(a, Selection::Sample(5).resolve(21_557, 1).unwrap());
        assert_eq!(a.len(), 5);
        assert!(Selection::Sample(6).resolve(5, 1).is_err());
    }

    #[test]
    fn embedding_preserves_offsets_and_blocks() {
        let v = Vertex::new(vec![0, 1, 2, 3]);
        assert_eq!(embed_vertex(&v, 2, 3).unwrap(), Vertex::new(vec![0, 1, 3, 4]));
        assert!(embed_vertex(&v, 3, 2).is_err());
    }

    #[test]
    fn missing_dim8_file_is_skipped() {
        let r = verify_dim8(Path::new("/nonexistent/clique_8_2.txt"), &[3]).unwrap();
        assert_eq!(r.status, Dim8Status::Skipped);
    }

    #[test]
    fn small_end_to_end() {
        let dir = tempfile::tempdir().unwrap();
        let opts = RunOptions {
            out_dir: dir.path().to_path_buf(),
            ..RunOptions::default()
        };
        let inst = KellerInstance::new(2, 2).unwrap();
        let enc = encode_to_file(&inst, dir.path()).unwrap();
        assert_eq!((enc.variables, enc.clauses), (32, 74));
        let m = solve_file(&enc.file, &opts, &SolveOptions::default()).unwrap();
        assert_eq!(m.verdict, Verdict::Refuted);
        assert_eq!(m.cases[0].status, CaseStatus::UnsatVerified);
        let again = recheck_run(dir.path(), &opts).unwrap();
        assert_eq!(again.verdict, Verdict::Refuted);
        assert!(report_run(dir.path()).unwrap().contains("verdict       refuted"));
    }
}
