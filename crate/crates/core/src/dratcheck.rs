//! Forward DRAT checking with RUP and RAT (pivot = first literal), optional
//! dependency recording, and backward trimming.

use std::collections::HashMap;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::satkit::{Formula, Propagator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Add,
    Delete,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub kind: StepKind,
    pub clause: Vec<i32>,
}

impl ProofStep {
    pub fn add(clause: Vec<i32>) -> Self {
        ProofStep {
            kind: StepKind::Add,
            clause,
        }
    }

    pub fn delete(clause: Vec<i32>) -> Self {
        ProofStep {
            kind: StepKind::Delete,
            clause,
        }
    }

    /// RAT witness literal: the first literal of an added clause.
    pub fn pivot(&self) -> Option<i32> {
        match self.kind {
            StepKind::Add => self.clause.first().copied(),
            StepKind::Delete => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Proof {
    pub steps: Vec<ProofStep>,
}

impl Proof {
    pub fn new(steps: Vec<ProofStep>) -> Self {
        Proof { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn additions(&self) -> usize {
        self.steps.iter().filter(|s| s.kind == StepKind::Add).count()
    }

    /// Append another proof's steps.
    pub fn extend(&mut self, other: Proof) {
        self.steps.extend(other.steps);
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Honor deletions of unit and reason clauses, recomputing the root
    /// assignment afterwards.
    pub strict_deletions: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepFailure {
    pub step: usize,
    pub clause: Vec<i32>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub accepted: bool,
    pub steps: usize,
    pub additions_checked: usize,
    pub rup_steps: usize,
    pub rat_steps: usize,
    pub deletions: usize,
    pub ignored_deletions: usize,
    pub missing_deletions: usize,
    /// Steps kept by trimming, when trimming ran.
    pub marked_steps: Option<usize>,
    /// Original clauses used by the refutation, when dependencies were
    /// recorded.
    pub core_clauses: Option<usize>,
    pub seconds: f64,
    pub failure: Option<StepFailure>,
}

impl CheckReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// 0 when accepted, 1 when rejected.
    pub fn exit_code(&self) -> i32 {
        if self.accepted {
            0
        } else {
            1
        }
    }
}

fn clause_key(clause: &[i32]) -> Vec<i32> {
    let mut k = clause.to_vec();
    k.sort_unstable();
    k.dedup();
    k
}

/// Incremental checker state: the propagator plus lookup tables.
struct Checker {
    prop: Propagator,
    index: HashMap<Vec<i32>, Vec<usize>>,
    occurs: HashMap<i32, Vec<usize>>,
    record: bool,
    deps: Vec<Vec<usize>>,
    root_deps: Option<Vec<usize>>,
    strict: bool,
}

enum Verdict {
    Rup(Vec<usize>),
    Rat(Vec<usize>),
    Fail(String),
}

impl Checker {
    fn new(formula: &Formula, record: bool, strict: bool) -> Self {
        let mut c = Checker {
            prop: Propagator::new(formula.num_vars()),
            index: HashMap::new(),
            occurs: HashMap::new(),
            record,
            deps: Vec::new(),
            root_deps: None,
            strict,
        };
        for clause in formula.clauses() {
            c.insert(clause);
        }
        c.prop.propagate();
        c
    }

    fn insert(&mut self, clause: &[i32]) -> usize {
        let id = self.prop.add_clause(clause);
        let key = clause_key(clause);
        for &l in &key {
            self.occurs.entry(l).or_default().push(id);
        }
        self.index.entry(key).or_default().push(id);
        if self.record {
            self.deps.push(Vec::new());
        }
        id
    }

    fn root_dependencies(&mut self) -> Vec<usize> {
        if let Some(d) = &self.root_deps {
            return d.clone();
        }
        let c = self.prop.root_conflict().expect("root conflict present");
        let mut out = Vec::new();
        if self.record {
            self.prop.clause_dependencies(c, &mut out);
        }
        self.root_deps = Some(out.clone());
        out
    }

    /// Reverse unit propagation; `Some(deps)` on success.
    fn rup(&mut self, clause: &[i32]) -> Option<Vec<usize>> {
        if self.prop.root_conflict().is_some() {
            return Some(self.root_dependencies());
        }
        let mark = self.prop.trail_len();
        let mut deps = Vec::new();
        let mut result = None;
        for &l in clause {
            if !self.prop.assume(-l) {
                if self.record {
                    self.prop.literal_dependencies(l, &mut deps);
                }
                result = Some(std::mem::take(&mut deps));
                break;
            }
        }
        if result.is_none() {
            if let Some(c) = self.prop.propagate() {
                if self.record {
                    self.prop.clause_dependencies(c, &mut deps);
                }
                result = Some(deps);
            }
        }
        self.prop.backtrack(mark);
        if self.prop.root_conflict().is_some() {
            // the conflict only used root facts; it is permanent
            self.root_deps = result.clone();
        }
        result
    }

    fn check(&mut self, clause: &[i32]) -> Verdict {
        if let Some(d) = self.rup(clause) {
            return Verdict::Rup(d);
        }
        let Some(&pivot) = clause.first() else {
            return Verdict::Fail("empty clause is not RUP".into());
        };
        let candidates: Vec<usize> = self
            .occurs
            .get(&-pivot)
            .map(|v| v.iter().copied().filter(|&id| self.prop.is_active(id)).collect())
            .unwrap_or_default();
        let mut deps = Vec::new();
        for d in candidates {
            let other = self.prop.clause(d);
            let mut resolvent: Vec<i32> = clause.iter().copied().filter(|&l| l != pivot).collect();
            resolvent.extend(other.iter().copied().filter(|&l| l != -pivot));
            resolvent.sort_unstable_by_key(|l| (l.unsigned_abs(), *l));
            resolvent.dedup();
            if resolvent.windows(2).any(|w| w[0] == -w[1]) {
                continue;
            }
            match self.rup(&resolvent) {
                Some(r) => {
                    deps.push(d);
                    deps.extend(r);
                }
                None => {
                    return Verdict::Fail(format!(
                        "not RUP, and RAT on pivot {pivot} fails against clause {other:?}"
                    ))
                }
            }
        }
        Verdict::Rat(deps)
    }

    /// Returns (ignored, missing).
    fn delete(&mut self, clause: &[i32]) -> (bool, bool) {
        let key = clause_key(clause);
        let Some(ids) = self.index.get_mut(&key) else {
            return (false, true);
        };
        let Some(pos) = ids.iter().rposition(|&id| self.prop.is_active(id)) else {
            return (false, true);
        };
        let id = ids[pos];
        let pinned = key.len() <= 1 || self.prop.is_reason(id);
        if pinned && !self.strict {
            return (true, false);
        }
        self.prop.delete_clause(id);
        if pinned {
            self.prop.reset_root();
            self.root_deps = None;
        }
        (false, false)
    }
}

/// Whether the clause follows from `db` by unit propagation.
pub fn check_rup(clause: &[i32], db: &Formula) -> bool {
    let mut c = Checker::new(db, false, false);
    c.rup(clause).is_some()
}

/// RUP, or RAT with the given pivot against every clause of `db` containing
/// its negation.
pub fn check_rat(clause: &[i32], pivot: i32, db: &Formula) -> Result<bool> {
    if !clause.contains(&pivot) {
        return Err(Error::Input(format!("pivot {pivot} is not in clause {clause:?}")));
    }
    let mut ordered = vec![pivot];
    ordered.extend(clause.iter().copied().filter(|&l| l != pivot));
    let mut c = Checker::new(db, false, false);
    Ok(!matches!(c.check(&ordered), Verdict::Fail(_)))
}

pub fn check_proof(formula: &Formula, proof: &Proof) -> CheckReport {
    check_proof_with(formula, proof, CheckOptions::default())
}

pub fn check_proof_with(formula: &Formula, proof: &Proof, opts: CheckOptions) -> CheckReport {
    run(formula, proof, opts, false).0
}

struct Trace {
    /// Clause id assigned to each add step (None for unchecked steps).
    step_ids: Vec<Option<usize>>,
    /// Clause id removed by each delete step.
    deleted_ids: Vec<Option<usize>>,
    deps: Vec<Vec<usize>>,
    empty_step: Option<usize>,
    empty_deps: Vec<usize>,
}

fn run(formula: &Formula, proof: &Proof, opts: CheckOptions, record: bool) -> (CheckReport, Trace) {
    let start = Instant::now();
    let mut checker = Checker::new(formula, record, opts.strict_deletions);
    let mut report = CheckReport {
        accepted: false,
        steps: proof.steps.len(),
        additions_checked: 0,
        rup_steps: 0,
        rat_steps: 0,
        deletions: 0,
        ignored_deletions: 0,
        missing_deletions: 0,
        marked_steps: None,
        core_clauses: None,
        seconds: 0.0,
        failure: None,
    };
    let mut trace = Trace {
        step_ids: vec![None; proof.steps.len()],
        deleted_ids: vec![None; proof.steps.len()],
        deps: Vec::new(),
        empty_step: None,
        empty_deps: Vec::new(),
    };
    for (i, step) in proof.steps.iter().enumerate() {
        match step.kind {
            StepKind::Delete => {
                report.deletions += 1;
                let before = checker.index.get(&clause_key(&step.clause)).cloned();
                let (ignored, missing) = checker.delete(&step.clause);
                if ignored {
                    report.ignored_deletions += 1;
                } else if missing {
                    report.missing_deletions += 1;
                } else if let Some(ids) = before {
                    trace.deleted_ids[i] = ids.into_iter().rfind(|&id| !checker.prop.is_active(id));
                }
            }
            StepKind::Add => {
                report.additions_checked += 1;
                let deps = match checker.check(&step.clause) {
                    Verdict::Rup(d) => {
                        report.rup_steps += 1;
                        d
                    }
                    Verdict::Rat(d) => {
                        report.rat_steps += 1;
                        d
                    }
                    Verdict::Fail(reason) => {
                        report.failure = Some(StepFailure {
                            step: i,
                            clause: step.clause.clone(),
                            reason,
                        });
                        break;
                    }
                };
                if step.clause.is_empty() {
                    report.accepted = true;
                    trace.empty_step = Some(i);
                    trace.empty_deps = deps;
                    break;
                }
                let id = checker.insert(&step.clause);
                if record {
                    checker.deps[id] = deps;
                }
                checker.prop.propagate();
                trace.step_ids[i] = Some(id);
            }
        }
    }
    if !report.accepted && report.failure.is_none() {
        report.failure = Some(StepFailure {
            step: proof.steps.len(),
            clause: Vec::new(),
            reason: "proof does not derive the empty clause".into(),
        });
    }
    trace.deps = std::mem::take(&mut checker.deps);
    report.seconds = start.elapsed().as_secs_f64();
    (report, trace)
}

#[derive(Debug, Clone)]
pub struct TrimOutcome {
    pub proof: Proof,
    /// Indices of the original clauses used by the refutation.
    pub core: Vec<usize>,
    pub original_steps: usize,
    /// Re-verification of the trimmed proof.
    pub report: CheckReport,
}

/// Keep only the steps the refutation depends on, then re-verify.
pub fn trim(formula: &Formula, proof: &Proof) -> Result<TrimOutcome> {
    trim_with(formula, proof, CheckOptions::default())
}

pub fn trim_with(formula: &Formula, proof: &Proof, opts: CheckOptions) -> Result<TrimOutcome> {
    let (report, trace) = run(formula, proof, opts, true);
    if !report.accepted {
        let f = report.failure.expect("rejected proofs carry a failure");
        return Err(Error::ProofRejected(format!("step {}: {}", f.step, f.reason)));
    }
    let empty_step = trace.empty_step.expect("accepted proofs end with the empty clause");
    let base = formula.clauses().len();
    let total_ids = trace.deps.len();
    let mut needed = vec![false; total_ids];
    for &d in &trace.empty_deps {
        needed[d] = true;
    }
    for id in (0..total_ids).rev() {
        if needed[id] {
            for &d in &trace.deps[id] {
                needed[d] = true;
            }
        }
    }
    let mut steps = Vec::new();
    for (i, step) in proof.steps.iter().enumerate().take(empty_step) {
        match step.kind {
            StepKind::Add => {
                if trace.step_ids[i].is_some_and(|id| needed[id]) {
                    steps.push(step.clone());
                }
            }
            StepKind::Delete => {
                if trace.deleted_ids[i].is_some_and(|id| id < base || needed[id]) {
                    steps.push(step.clone());
                }
            }
        }
    }
    steps.push(ProofStep::add(Vec::new()));
    let trimmed = Proof::new(steps);
    let core: Vec<usize> = (0..base).filter(|&i| needed[i]).collect();
    let mut report = check_proof_with(formula, &trimmed, opts);
    if !report.accepted {
        return Err(Error::Internal(format!(
            "trimmed proof fails re-verification: {:?}",
            report.failure
        )));
    }
    report.marked_steps = Some(trimmed.len());
    report.core_clauses = Some(core.len());
    Ok(TrimOutcome {
        proof: trimmed,
        core,
        original_steps: proof.len(),
        report,
    })
}
