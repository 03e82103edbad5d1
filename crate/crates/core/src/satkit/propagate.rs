//! Watched-literal unit propagation over a growable clause store.
//!
//! The store backs both the standalone [`propagate`] operation and the proof
//! checker. All clauses are added at the root; temporary assignments made on
//! top of the root trail are undone with [`Propagator::backtrack`].

use super::{Formula, Lit, PartialAssignment};

pub type ClauseId = usize;

const TRUE: i8 = 1;
const FALSE: i8 = -1;
const UNDEF: i8 = 0;
const NO_REASON: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Watch {
    clause: u32,
    blocker: Lit,
}

#[derive(Debug, Clone)]
struct Stored {
    lits: Vec<Lit>,
    active: bool,
    tautology: bool,
}

#[derive(Debug, Clone)]
pub struct Propagator {
    clauses: Vec<Stored>,
    watches: Vec<Vec<Watch>>,
    values: Vec<i8>,
    reasons: Vec<u32>,
    trail: Vec<Lit>,
    qhead: usize,
    root_conflict: Option<ClauseId>,
    propagations: u64,
    seen: Vec<u32>,
    stamp: u32,
    temporary: usize,
}

impl Propagator {
    pub fn new(num_vars: u32) -> Self {
        let n = num_vars as usize;
        Propagator {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            values: vec![UNDEF; 2 * n],
            reasons: vec![NO_REASON; n],
            trail: Vec::new(),
            qhead: 0,
            root_conflict: None,
            propagations: 0,
            seen: vec![0; n],
            stamp: 0,
            temporary: 0,
        }
    }

    pub fn from_formula(formula: &Formula) -> Self {
        let mut p = Propagator::new(formula.num_vars());
        for c in formula.clauses() {
            p.add_clause(c);
        }
        p
    }

    pub fn num_vars(&self) -> usize {
        self.reasons.len()
    }

    fn ensure_var(&mut self, var: usize) {
        if var >= self.reasons.len() {
            self.reasons.resize(var + 1, NO_REASON);
            self.seen.resize(var + 1, 0);
            self.values.resize(2 * (var + 1), UNDEF);
            self.watches.resize(2 * (var + 1), Vec::new());
        }
    }

    #[inline]
    fn value(&self, lit: Lit) -> i8 {
        self.values[lit.index()]
    }

    /// Value of a DIMACS literal under the current assignment.
    pub fn lit_value(&self, lit: i32) -> Option<bool> {
        let l = Lit::from_dimacs(lit);
        if l.var() >= self.num_vars() {
            return None;
        }
        match self.value(l) {
            TRUE => Some(true),
            FALSE => Some(false),
            _ => None,
        }
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_active(&self, id: ClauseId) -> bool {
        self.clauses[id].active
    }

    pub fn clause(&self, id: ClauseId) -> Vec<i32> {
        self.clauses[id].lits.iter().map(|l| l.to_dimacs()).collect()
    }

    /// The permanent root-level conflict, once one has been found.
    pub fn root_conflict(&self) -> Option<ClauseId> {
        self.root_conflict
    }

    pub fn propagations(&self) -> u64 {
        self.propagations
    }

    /// Add a clause at the root. Units are enqueued, falsified clauses are
    /// recorded as the root conflict. Call [`Propagator::propagate`] after.
    pub fn add_clause(&mut self, lits: &[i32]) -> ClauseId {
        let mut clause: Vec<Lit> = lits.iter().map(|&l| Lit::from_dimacs(l)).collect();
        clause.sort();
        clause.dedup();
        if let Some(max) = clause.iter().map(|l| l.var()).max() {
            self.ensure_var(max);
        }
        let tautology = clause.windows(2).any(|w| w[0] == !w[1]);
        let id = self.clauses.len();
        if tautology {
            self.clauses.push(Stored {
                lits: clause,
                active: true,
                tautology: true,
            });
            return id;
        }
        // non-false literals first
        clause.sort_by_key(|&l| match self.value(l) {
            TRUE => 0,
            UNDEF => 1,
            _ => 2,
        });
        let len = clause.len();
        let first_value = clause.first().map(|&l| self.value(l));
        let second_false = len < 2 || self.value(clause[1]) == FALSE;
        if len >= 2 {
            self.watches[clause[0].index()].push(Watch {
                clause: id as u32,
                blocker: clause[1],
            });
            self.watches[clause[1].index()].push(Watch {
                clause: id as u32,
                blocker: clause[0],
            });
        }
        let head = clause.first().copied();
        self.clauses.push(Stored {
            lits: clause,
            active: true,
            tautology: false,
        });
        match (head, first_value) {
            (None, _) | (_, Some(FALSE)) => {
                if self.root_conflict.is_none() {
                    self.root_conflict = Some(id);
                }
            }
            (Some(lit), Some(UNDEF)) if second_false => self.enqueue(lit, id as u32),
            _ => {}
        }
        id
    }

    /// Deactivate a clause. Its watches are dropped lazily. Assignments it
    /// already implied stay on the trail.
    pub fn delete_clause(&mut self, id: ClauseId) {
        self.clauses[id].active = false;
    }

    /// Whether this clause is the reason of a literal on the trail.
    pub fn is_reason(&self, id: ClauseId) -> bool {
        let c = &self.clauses[id];
        if c.tautology || c.lits.is_empty() {
            return false;
        }
        c.lits
            .iter()
            .any(|&l| self.value(l) == TRUE && self.reasons[l.var()] == id as u32)
    }

    #[inline]
    fn enqueue(&mut self, lit: Lit, reason: u32) {
        self.values[lit.index()] = TRUE;
        self.values[(!lit).index()] = FALSE;
        self.reasons[lit.var()] = reason;
        self.trail.push(lit);
    }

    /// Make a DIMACS literal true without a reason. Returns `false` if it is
    /// already false.
    pub fn assume(&mut self, lit: i32) -> bool {
        let l = Lit::from_dimacs(lit);
        self.ensure_var(l.var());
        match self.value(l) {
            TRUE => true,
            FALSE => false,
            _ => {
                self.enqueue(l, NO_REASON);
                self.temporary += 1;
                true
            }
        }
    }

    pub fn trail_len(&self) -> usize {
        self.trail.len()
    }

    pub fn trail(&self) -> impl Iterator<Item = i32> + '_ {
        self.trail.iter().map(|l| l.to_dimacs())
    }

    /// Reason clause of an assigned variable (1-based).
    pub fn reason(&self, var: u32) -> Option<ClauseId> {
        match self.reasons.get(var as usize - 1) {
            Some(&r) if r != NO_REASON => Some(r as usize),
            _ => None,
        }
    }

    /// Undo assignments until the trail has `len` entries.
    pub fn backtrack(&mut self, len: usize) {
        while self.trail.len() > len {
            let l = self.trail.pop().expect("nonempty trail");
            if self.reasons[l.var()] == NO_REASON {
                self.temporary -= 1;
            }
            self.values[l.index()] = UNDEF;
            self.values[(!l).index()] = UNDEF;
            self.reasons[l.var()] = NO_REASON;
        }
        self.qhead = self.qhead.min(len);
    }

    /// Clear every assignment and rebuild the root fixpoint from the active
    /// clauses.
    pub fn reset_root(&mut self) {
        self.backtrack(0);
        self.root_conflict = None;
        for w in self.watches.iter_mut() {
            w.clear();
        }
        let clauses = std::mem::take(&mut self.clauses);
        for (id, c) in clauses.iter().enumerate() {
            if !c.active || c.tautology {
                continue;
            }
            match c.lits.len() {
                0 => {
                    if self.root_conflict.is_none() {
                        self.root_conflict = Some(id);
                    }
                }
                1 => match self.value(c.lits[0]) {
                    UNDEF => self.enqueue(c.lits[0], id as u32),
                    FALSE
                        if self.root_conflict.is_none() => {
                            self.root_conflict = Some(id);
                        }
                    _ => {}
                },
                _ => {
                    self.watches[c.lits[0].index()].push(Watch {
                        clause: id as u32,
                        blocker: c.lits[1],
                    });
                    self.watches[c.lits[1].index()].push(Watch {
                        clause: id as u32,
                        blocker: c.lits[0],
                    });
                }
            }
        }
        self.clauses = clauses;
        self.propagate();
    }

    /// Propagate to fixpoint; returns a falsified clause on conflict. A
    /// conflict found with no temporary assignments becomes the root
    /// conflict.
    pub fn propagate(&mut self) -> Option<ClauseId> {
        if let Some(c) = self.root_conflict {
            return Some(c);
        }
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.index()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.values[w.blocker.index()] == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cid = w.clause as usize;
                let stored = &mut self.clauses[cid];
                if !stored.active {
                    continue;
                }
                let lits = &mut stored.lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                if self.values[first.index()] == TRUE {
                    ws[j] = Watch {
                        clause: w.clause,
                        blocker: first,
                    };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..lits.len() {
                    if self.values[lits[k].index()] != FALSE {
                        lits.swap(1, k);
                        self.watches[lits[1].index()].push(Watch {
                            clause: w.clause,
                            blocker: first,
                        });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watch {
                    clause: w.clause,
                    blocker: first,
                };
                j += 1;
                if self.values[first.index()] == FALSE {
                    conflict = Some(cid);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.values[first.index()] = TRUE;
                    self.values[(!first).index()] = FALSE;
                    self.reasons[first.var()] = w.clause;
                    self.trail.push(first);
                }
            }
            ws.truncate(j);
            self.watches[false_lit.index()] = ws;
            if let Some(c) = conflict {
                self.qhead = self.trail.len();
                if self.temporary == 0 {
                    self.root_conflict = Some(c);
                }
                return Some(c);
            }
        }
        None
    }

    /// Clauses that derive the falsification of `conflict` under the current
    /// trail: the clause itself plus the transitive reasons of its literals.
    pub fn clause_dependencies(&mut self, conflict: ClauseId, out: &mut Vec<ClauseId>) {
        self.next_stamp();
        out.push(conflict);
        let lits = self.clauses[conflict].lits.clone();
        let mut stack: Vec<usize> = Vec::new();
        for l in lits {
            self.visit(l.var(), &mut stack);
        }
        self.drain(stack, out);
    }

    /// Clauses that make the DIMACS literal `lit` true under the current
    /// trail.
    pub fn literal_dependencies(&mut self, lit: i32, out: &mut Vec<ClauseId>) {
        self.next_stamp();
        let mut stack = Vec::new();
        self.visit(Lit::from_dimacs(lit).var(), &mut stack);
        self.drain(stack, out);
    }

    fn next_stamp(&mut self) {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.seen.iter_mut().for_each(|s| *s = 0);
            self.stamp = 1;
        }
    }

    fn visit(&mut self, var: usize, stack: &mut Vec<usize>) {
        if self.seen[var] != self.stamp {
            self.seen[var] = self.stamp;
            stack.push(var);
        }
    }

    fn drain(&mut self, mut stack: Vec<usize>, out: &mut Vec<ClauseId>) {
        while let Some(v) = stack.pop() {
            let r = self.reasons[v];
            if r == NO_REASON {
                continue;
            }
            out.push(r as usize);
            for i in 0..self.clauses[r as usize].lits.len() {
                let u = self.clauses[r as usize].lits[i].var();
                self.visit(u, &mut stack);
            }
        }
    }

    pub fn assignment(&self) -> PartialAssignment {
        let mut pa = PartialAssignment::new(self.num_vars() as u32);
        for l in &self.trail {
            pa.set(l.to_dimacs());
        }
        pa
    }
}

/// Least fixpoint of unit propagation, or the clause that became falsified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropagationOutcome {
    Fixpoint(PartialAssignment),
    /// Index of a falsified clause; indices past the formula's clauses refer
    /// to the extra units, in order.
    Conflict { clause: usize },
}

impl PropagationOutcome {
    pub fn is_conflict(&self) -> bool {
        matches!(self, PropagationOutcome::Conflict { .. })
    }

    pub fn assignment(&self) -> Option<&PartialAssignment> {
        match self {
            PropagationOutcome::Fixpoint(a) => Some(a),
            PropagationOutcome::Conflict { .. } => None,
        }
    }
}

pub fn propagate(formula: &Formula, units: &[i32]) -> PropagationOutcome {
    let mut p = Propagator::from_formula(formula);
    for &u in units {
        p.add_clause(&[u]);
    }
    match p.propagate() {
        Some(c) => PropagationOutcome::Conflict { clause: c },
        None => PropagationOutcome::Fixpoint(p.assignment()),
    }
}
