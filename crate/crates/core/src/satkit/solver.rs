//! A compact CDCL solver: first-UIP learning with recursive minimization,
//! VSIDS with phase saving, Luby restarts, LBD-based clause deletion, and
//! assumptions decided at the lowest levels. Every learned clause and every
//! deletion is written to a [`ProofSink`].

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Formula, Lit, Model, ProofSink};
use crate::dratcheck::Proof;
use crate::error::{Error, Result};

const TRUE: i8 = 1;
const FALSE: i8 = -1;
const UNDEF: i8 = 0;
const NO_REASON: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub seed: u64,
    pub restart_base: u64,
    pub var_decay: f64,
    pub clause_decay: f64,
    /// Conflicts before the first reduction of the learned clauses.
    pub reduce_first: u64,
    /// Growth of the reduction interval after each reduction.
    pub reduce_increment: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            restart_base: 64,
            var_decay: 0.95,
            clause_decay: 0.999,
            reduce_first: 2000,
            reduce_increment: 300,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(seed: u64) -> Self {
        SolverConfig {
            seed,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub conflicts: Option<u64>,
    pub wall: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            conflicts: Some(10_000_000),
            wall: None,
        }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget {
            conflicts: None,
            wall: None,
        }
    }

    pub fn conflicts(n: u64) -> Self {
        Budget {
            conflicts: Some(n),
            wall: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Sat,
    Unsat,
    Unknown,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Sat => "SAT",
            SolveStatus::Unsat => "UNSAT",
            SolveStatus::Unknown => "UNKNOWN",
        }
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learned: u64,
    pub deleted: u64,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub model: Option<Model>,
    /// For UNSAT results: a DRAT proof of the formula conjoined with the cube.
    pub proof: Option<Proof>,
    pub stats: SolveStats,
}

#[derive(Debug, Clone, Copy)]
struct Watch {
    clause: u32,
    blocker: Lit,
}

#[derive(Debug, Clone)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    lbd: u32,
    activity: f64,
}

/// Binary max-heap of variables keyed by activity.
#[derive(Debug, Clone, Default)]
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<usize>,
}

const NOT_IN_HEAP: usize = usize::MAX;

impl VarHeap {
    fn new(n: usize) -> Self {
        VarHeap {
            heap: Vec::with_capacity(n),
            pos: vec![NOT_IN_HEAP; n],
        }
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] != NOT_IN_HEAP
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v] = self.heap.len();
        self.heap.push(v as u32);
        self.up(self.heap.len() - 1, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()? as usize;
        let last = self.heap.pop().expect("nonempty heap");
        self.pos[top] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.down(0, act);
        }
        Some(top)
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.up(self.pos[v], act);
        }
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let p = self.heap[parent];
            if act[p as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = p;
            self.pos[p as usize] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let child = if r < n && act[self.heap[r] as usize] > act[self.heap[l] as usize] {
                r
            } else {
                l
            };
            let c = self.heap[child];
            if act[c as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = c;
            self.pos[c as usize] = i;
            i = child;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i;
    }
}

/// Luby sequence 1 1 2 1 1 2 4 ..., 0-based index.
fn luby(mut x: u64) -> u64 {
    let mut size = 1;
    let mut seq = 0;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1 << seq
}

enum Search {
    Sat,
    Unsat,
    Restart,
    Budget,
}

pub struct Solver {
    num_vars: usize,
    clauses: Vec<Clause>,
    learnts: Vec<u32>,
    watches: Vec<Vec<Watch>>,
    values: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    clause_inc: f64,
    heap: VarHeap,
    polarity: Vec<bool>,
    seen: Vec<u8>,
    level_stamp: Vec<u64>,
    stamp: u64,
    ok: bool,
    config: SolverConfig,
    stats: SolveStats,
    next_reduce: u64,
    reductions: u64,
}

impl Solver {
    pub fn new(formula: &Formula, config: SolverConfig) -> Self {
        Self::with_sink(formula, config, &mut super::NullProof)
    }

    /// Build the solver. An initial root conflict is logged as the empty
    /// clause.
    pub fn with_sink(formula: &Formula, config: SolverConfig, sink: &mut dyn ProofSink) -> Self {
        let n = formula.num_vars() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let activity: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 1e-5).collect();
        let mut heap = VarHeap::new(n);
        for v in 0..n {
            heap.insert(v, &activity);
        }
        let mut s = Solver {
            num_vars: n,
            clauses: Vec::new(),
            learnts: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            values: vec![UNDEF; 2 * n],
            level: vec![0; n],
            reason: vec![NO_REASON; n],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity,
            var_inc: 1.0,
            clause_inc: 1.0,
            heap,
            polarity: vec![false; n],
            seen: vec![0; n],
            level_stamp: vec![0; n + 1],
            stamp: 0,
            ok: true,
            next_reduce: config.reduce_first,
            config,
            stats: SolveStats::default(),
            reductions: 0,
        };
        for c in formula.clauses() {
            if !s.add_original(c) {
                break;
            }
        }
        if s.ok && s.propagate().is_some() {
            s.ok = false;
        }
        if !s.ok {
            sink.add_clause(&[]);
        }
        s
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn add_original(&mut self, clause: &[i32]) -> bool {
        let mut lits: Vec<Lit> = clause.iter().map(|&l| Lit::from_dimacs(l)).collect();
        lits.sort();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] == !w[1]) {
            return true;
        }
        // root-false literals can stay; root-true literals satisfy the clause
        if lits.iter().any(|&l| self.value(l) == TRUE) {
            return true;
        }
        let mut open: Vec<Lit> = lits.iter().copied().filter(|&l| self.value(l) == UNDEF).collect();
        match open.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(open[0], NO_REASON);
                true
            }
            _ => {
                let false_lits = lits.iter().copied().filter(|&l| self.value(l) == FALSE);
                open.extend(false_lits);
                self.attach(open, false, 0);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool, lbd: u32) -> u32 {
        let id = self.clauses.len() as u32;
        self.watches[lits[0].index()].push(Watch {
            clause: id,
            blocker: lits[1],
        });
        self.watches[lits[1].index()].push(Watch {
            clause: id,
            blocker: lits[0],
        });
        self.clauses.push(Clause {
            lits,
            learnt,
            deleted: false,
            lbd,
            activity: 0.0,
        });
        if learnt {
            self.learnts.push(id);
        }
        id
    }

    #[inline]
    fn value(&self, l: Lit) -> i8 {
        self.values[l.index()]
    }

    #[inline]
    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    #[inline]
    fn enqueue(&mut self, l: Lit, reason: u32) {
        self.values[l.index()] = TRUE;
        self.values[(!l).index()] = FALSE;
        self.level[l.var()] = self.decision_level();
        self.reason[l.var()] = reason;
        self.trail.push(l);
    }

    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.index()]);
            let mut i = 0;
            let mut j = 0;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.values[w.blocker.index()] == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let clause = &mut self.clauses[w.clause as usize];
                if clause.deleted {
                    continue;
                }
                let lits = &mut clause.lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                let nw = Watch {
                    clause: w.clause,
                    blocker: first,
                };
                if first != w.blocker && self.values[first.index()] == TRUE {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..lits.len() {
                    if self.values[lits[k].index()] != FALSE {
                        lits.swap(1, k);
                        self.watches[lits[1].index()].push(nw);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = nw;
                j += 1;
                if self.values[first.index()] == FALSE {
                    conflict = Some(w.clause);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.values[first.index()] = TRUE;
                    self.values[(!first).index()] = FALSE;
                    self.level[first.var()] = self.trail_lim.len() as u32;
                    self.reason[first.var()] = w.clause;
                    self.trail.push(first);
                }
            }
            ws.truncate(j);
            self.watches[false_lit.index()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let start = self.trail_lim[lvl as usize];
        for idx in (start..self.trail.len()).rev() {
            let l = self.trail[idx];
            let v = l.var();
            self.values[l.index()] = UNDEF;
            self.values[(!l).index()] = UNDEF;
            self.reason[v] = NO_REASON;
            self.polarity[v] = !l.is_negative();
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = start;
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, c: u32) {
        let cl = &mut self.clauses[c as usize];
        if !cl.learnt {
            return;
        }
        cl.activity += self.clause_inc;
        if cl.activity > 1e20 {
            for &id in &self.learnts {
                self.clauses[id as usize].activity *= 1e-20;
            }
            self.clause_inc *= 1e-20;
        }
    }

    fn lbd(&mut self, lits: &[Lit]) -> u32 {
        self.stamp += 1;
        let mut count = 0;
        for &l in lits {
            let lv = self.level[l.var()] as usize;
            if self.level_stamp[lv] != self.stamp {
                self.level_stamp[lv] = self.stamp;
                count += 1;
            }
        }
        count
    }

    /// First-UIP analysis. Returns the learned clause (asserting literal
    /// first, highest remaining level second) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = vec![Lit::from_dimacs(1)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let current = self.decision_level();
        loop {
            self.bump_clause(confl);
            let lits = self.clauses[confl as usize].lits.clone();
            let start = usize::from(p.is_some());
            for &q in &lits[start..] {
                let v = q.var();
                if self.seen[v] == 0 && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = 1;
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var()] != 0 {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            self.seen[lit.var()] = 0;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[lit.var()];
        }
        learnt[0] = !p.expect("uip");

        // recursive minimization
        let mut to_clear: Vec<usize> = learnt[1..].iter().map(|l| l.var()).collect();
        let mut abstract_levels = 0u64;
        for l in &learnt[1..] {
            abstract_levels |= 1 << (self.level[l.var()] & 63);
        }
        let mut kept = vec![learnt[0]];
        for &l in &learnt[1..] {
            if self.reason[l.var()] == NO_REASON
                || !self.redundant(l, abstract_levels, &mut to_clear)
            {
                kept.push(l);
            }
        }
        for v in to_clear {
            self.seen[v] = 0;
        }
        let mut learnt = kept;

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var()] > self.level[learnt[max_i].var()] {
                    max_i = k;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var()]
        };
        (learnt, bt)
    }

    /// Whether `l` is implied by other literals already marked as seen.
    fn redundant(&mut self, l: Lit, abstract_levels: u64, to_clear: &mut Vec<usize>) -> bool {
        let mut stack = vec![l];
        let top = to_clear.len();
        while let Some(q) = stack.pop() {
            let r = self.reason[q.var()];
            debug_assert!(r != NO_REASON);
            let lits = &self.clauses[r as usize].lits;
            for &x in &lits[1..] {
                let v = x.var();
                if self.seen[v] != 0 || self.level[v] == 0 {
                    continue;
                }
                if self.reason[v] != NO_REASON && abstract_levels & (1 << (self.level[v] & 63)) != 0 {
                    self.seen[v] = 1;
                    stack.push(x);
                    to_clear.push(v);
                } else {
                    for &u in &to_clear[top..] {
                        self.seen[u] = 0;
                    }
                    to_clear.truncate(top);
                    return false;
                }
            }
        }
        true
    }

    /// The assumptions responsible for `p` being false, as a clause
    /// `¬p ∨ ¬a₁ ∨ ...` that is RUP in the current clause set.
    fn analyze_final(&mut self, p: Lit) -> Vec<Lit> {
        let mut out = vec![!p];
        if self.level[p.var()] == 0 {
            return out;
        }
        self.seen[p.var()] = 1;
        let start = self.trail_lim[0];
        for idx in (start..self.trail.len()).rev() {
            let l = self.trail[idx];
            let v = l.var();
            if self.seen[v] == 0 {
                continue;
            }
            let r = self.reason[v];
            if r == NO_REASON {
                out.push(!l);
            } else {
                let lits = self.clauses[r as usize].lits.clone();
                for &x in &lits[1..] {
                    if self.level[x.var()] > 0 {
                        self.seen[x.var()] = 1;
                    }
                }
            }
            self.seen[v] = 0;
        }
        self.seen[p.var()] = 0;
        out
    }

    fn locked(&self, id: u32) -> bool {
        let l = self.clauses[id as usize].lits[0];
        self.value(l) == TRUE && self.reason[l.var()] == id
    }

    fn reduce_db(&mut self, sink: &mut dyn ProofSink) {
        let mut cands: Vec<u32> = self
            .learnts
            .iter()
            .copied()
            .filter(|&id| !self.clauses[id as usize].deleted)
            .collect();
        cands.sort_by(|&a, &b| {
            let ca = &self.clauses[a as usize];
            let cb = &self.clauses[b as usize];
            cb.lbd
                .cmp(&ca.lbd)
                .then(ca.activity.total_cmp(&cb.activity))
                .then(a.cmp(&b))
        });
        let target = cands.len() / 2;
        let mut removed = 0;
        for &id in &cands {
            if removed >= target {
                break;
            }
            if self.clauses[id as usize].lbd <= 2 || self.locked(id) {
                continue;
            }
            let c = &mut self.clauses[id as usize];
            c.deleted = true;
            let dimacs: Vec<i32> = c.lits.iter().map(|l| l.to_dimacs()).collect();
            c.lits = Vec::new();
            sink.delete_clause(&dimacs);
            removed += 1;
        }
        self.stats.deleted += removed as u64;
        let clauses = &self.clauses;
        self.learnts.retain(|&id| !clauses[id as usize].deleted);
        for ws in self.watches.iter_mut() {
            ws.retain(|w| !clauses[w.clause as usize].deleted);
        }
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            let pos = Lit::from_dimacs(v as i32 + 1);
            if self.value(pos) == UNDEF {
                return Some(if self.polarity[v] { pos } else { !pos });
            }
        }
        None
    }

    fn to_dimacs(lits: &[Lit]) -> Vec<i32> {
        lits.iter().map(|l| l.to_dimacs()).collect()
    }

    fn search(
        &mut self,
        limit: u64,
        assumptions: &[Lit],
        budget: &Budget,
        start: Instant,
        sink: &mut dyn ProofSink,
    ) -> Search {
        let mut local = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                local += 1;
                if self.decision_level() == 0 {
                    sink.add_clause(&[]);
                    self.ok = false;
                    return Search::Unsat;
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                sink.add_clause(&Self::to_dimacs(&learnt));
                self.stats.learned += 1;
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let lbd = self.lbd(&learnt);
                    let first = learnt[0];
                    let id = self.attach(learnt, true, lbd);
                    self.bump_clause(id);
                    self.enqueue(first, id);
                }
                self.var_inc /= self.config.var_decay;
                self.clause_inc /= self.config.clause_decay;

                if budget.conflicts.is_some_and(|m| self.stats.conflicts >= m) {
                    return Search::Budget;
                }
                if self.stats.conflicts.is_multiple_of(256)
                    && budget.wall.is_some_and(|w| start.elapsed() >= w)
                {
                    return Search::Budget;
                }
            } else {
                if local >= limit {
                    return Search::Restart;
                }
                if self.stats.conflicts >= self.next_reduce {
                    self.reductions += 1;
                    self.next_reduce = self.stats.conflicts
                        + self.config.reduce_first
                        + self.reductions * self.config.reduce_increment;
                    self.reduce_db(sink);
                }
                let mut next = None;
                while (self.decision_level() as usize) < assumptions.len() {
                    let a = assumptions[self.decision_level() as usize];
                    match self.value(a) {
                        TRUE => self.trail_lim.push(self.trail.len()),
                        FALSE => {
                            let clause = self.analyze_final(a);
                            sink.add_clause(&Self::to_dimacs(&clause));
                            sink.add_clause(&[]);
                            return Search::Unsat;
                        }
                        _ => {
                            next = Some(a);
                            break;
                        }
                    }
                }
                let decision = match next {
                    Some(a) => a,
                    None => match self.pick_branch() {
                        Some(l) => l,
                        None => return Search::Sat,
                    },
                };
                self.stats.decisions += 1;
                self.trail_lim.push(self.trail.len());
                self.enqueue(decision, NO_REASON);
            }
        }
    }

    /// Solve under assumptions. Cube literals must refer to existing
    /// variables.
    pub fn solve_with(
        &mut self,
        assumptions: &[i32],
        budget: &Budget,
        sink: &mut dyn ProofSink,
    ) -> Result<(SolveStatus, Option<Model>)> {
        for &a in assumptions {
            if a == 0 || a.unsigned_abs() as usize > self.num_vars {
                return Err(Error::Input(format!(
                    "assumption {a} outside variables 1..={}",
                    self.num_vars
                )));
            }
        }
        let start = Instant::now();
        if !self.ok {
            return Ok((SolveStatus::Unsat, None));
        }
        let assumptions: Vec<Lit> = assumptions.iter().map(|&a| Lit::from_dimacs(a)).collect();
        let mut restart = 0u64;
        let status = loop {
            let limit = luby(restart) * self.config.restart_base;
            match self.search(limit, &assumptions, budget, start, sink) {
                Search::Sat => break SolveStatus::Sat,
                Search::Unsat => break SolveStatus::Unsat,
                Search::Budget => break SolveStatus::Unknown,
                Search::Restart => {
                    restart += 1;
                    self.stats.restarts += 1;
                    self.cancel_until(0);
                    if budget.wall.is_some_and(|w| start.elapsed() >= w) {
                        break SolveStatus::Unknown;
                    }
                }
            }
        };
        let model = (status == SolveStatus::Sat).then(|| {
            Model::from_values(
                (0..self.num_vars)
                    .map(|v| self.values[2 * v] == TRUE)
                    .collect(),
            )
        });
        self.cancel_until(0);
        self.stats.seconds += start.elapsed().as_secs_f64();
        Ok((status, model))
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }
}

/// Solve `formula` under `cube`. UNSAT results carry a proof for the formula
/// conjoined with the cube; SAT models are checked against every clause and
/// the cube before being returned.
pub fn solve(formula: &Formula, cube: &[i32], budget: &Budget, seed: u64) -> Result<SolveResult> {
    solve_config(formula, cube, budget, SolverConfig::with_seed(seed))
}

pub fn solve_config(
    formula: &Formula,
    cube: &[i32],
    budget: &Budget,
    config: SolverConfig,
) -> Result<SolveResult> {
    let start = Instant::now();
    let mut proof = Proof::default();
    let mut solver = Solver::with_sink(formula, config, &mut proof);
    let (status, model) = solver.solve_with(cube, budget, &mut proof)?;
    if let Some(m) = &model {
        if let Some(i) = m.first_falsified(formula.clauses()) {
            return Err(Error::Internal(format!(
                "solver model falsifies clause {i}: {:?}",
                formula.clauses()[i]
            )));
        }
        if let Some(&l) = cube.iter().find(|&&l| !m.lit_true(l)) {
            return Err(Error::Internal(format!("solver model falsifies cube literal {l}")));
        }
    }
    if status == SolveStatus::Unsat && proof.steps.last().map(|s| s.clause.is_empty()) != Some(true)
    {
        return Err(Error::Internal("UNSAT proof does not end with the empty clause".into()));
    }
    let mut stats = solver.stats().clone();
    stats.seconds = start.elapsed().as_secs_f64();
    Ok(SolveResult {
        status,
        model,
        proof: (status == SolveStatus::Unsat).then_some(proof),
        stats,
    })
}
