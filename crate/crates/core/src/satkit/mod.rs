//! SAT plumbing: formulas, DIMACS and iCNF files, unit propagation, an
//! embedded CDCL solver with DRAT output, and case export.
//!
//! Literals at the API boundary are DIMACS integers (`i32`, nonzero, sign is
//! polarity). Internally the propagator and the solver use [`Lit`].

mod dimacs;
mod drat;
mod export;
mod propagate;
mod solver;

pub use dimacs::{parse_dimacs, write_clause_lines, write_dimacs, write_icnf, ParseOptions};
pub use drat::{
    parse_proof, write_binary_drat, write_text_drat, BinaryDratWriter, NullProof, ProofFormat,
    ProofSink, TextDratWriter,
};
pub use export::{export_cases, ExportEntry, ExportManifest};
pub use propagate::{propagate, PropagationOutcome, Propagator};
pub use solver::{solve, Budget, SolveResult, SolveStats, SolveStatus, Solver, SolverConfig};

use std::fmt;

/// Internal literal: `2·var + sign` with a 0-based variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn from_dimacs(l: i32) -> Lit {
        debug_assert!(l != 0);
        let var = l.unsigned_abs() - 1;
        Lit(var << 1 | (l < 0) as u32)
    }

    #[inline]
    pub fn to_dimacs(self) -> i32 {
        let v = (self.0 >> 1) as i32 + 1;
        if self.is_negative() {
            -v
        } else {
            v
        }
    }

    #[inline]
    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_negative(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A CNF formula with optional assumption cubes (from `a` lines).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Formula {
    num_vars: u32,
    clauses: Vec<Vec<i32>>,
    cubes: Vec<Vec<i32>>,
    instance: Option<(usize, usize)>,
}

impl Formula {
    pub fn new(num_vars: u32, clauses: Vec<Vec<i32>>) -> Self {
        Formula {
            num_vars,
            clauses,
            cubes: Vec::new(),
            instance: None,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn cubes(&self) -> &[Vec<i32>] {
        &self.cubes
    }

    /// The first cube, if any.
    pub fn cube(&self) -> Option<&[i32]> {
        self.cubes.first().map(Vec::as_slice)
    }

    /// `(n, s)` from a `c keller <n> <s>` comment, when present.
    pub fn keller_instance(&self) -> Option<(usize, usize)> {
        self.instance
    }

    pub fn set_keller_instance(&mut self, n: usize, s: usize) {
        self.instance = Some((n, s));
    }

    pub fn push_clause(&mut self, clause: Vec<i32>) {
        for &l in &clause {
            self.num_vars = self.num_vars.max(l.unsigned_abs());
        }
        self.clauses.push(clause);
    }

    pub fn push_cube(&mut self, cube: Vec<i32>) {
        for &l in &cube {
            self.num_vars = self.num_vars.max(l.unsigned_abs());
        }
        self.cubes.push(cube);
    }

    pub fn take_cubes(&mut self) -> Vec<Vec<i32>> {
        std::mem::take(&mut self.cubes)
    }

    /// This formula with a cube's literals added as unit clauses.
    pub fn with_units(&self, units: &[i32]) -> Formula {
        let mut out = Formula {
            num_vars: self.num_vars,
            clauses: self.clauses.clone(),
            cubes: Vec::new(),
            instance: self.instance,
        };
        for &u in units {
            out.push_clause(vec![u]);
        }
        out
    }
}

/// Anything that can report the value of a 1-based variable.
pub trait Valuation {
    fn value(&self, var: u32) -> Option<bool>;

    fn lit_value(&self, lit: i32) -> Option<bool> {
        self.value(lit.unsigned_abs()).map(|v| v == (lit > 0))
    }
}

/// A total assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    /// `values[v]` is the value of variable `v + 1`.
    pub fn from_values(values: Vec<bool>) -> Self {
        Model { values }
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn lit_true(&self, lit: i32) -> bool {
        self.values
            .get(lit.unsigned_abs() as usize - 1)
            .is_some_and(|&v| v == (lit > 0))
    }

    /// Index of the first clause this model falsifies.
    pub fn first_falsified(&self, clauses: &[Vec<i32>]) -> Option<usize> {
        clauses
            .iter()
            .position(|c| !c.iter().any(|&l| self.lit_true(l)))
    }

    pub fn true_literals(&self) -> Vec<i32> {
        self.values
            .iter()
            .enumerate()
            .map(|(v, &b)| if b { v as i32 + 1 } else { -(v as i32 + 1) })
            .collect()
    }
}

impl Valuation for Model {
    fn value(&self, var: u32) -> Option<bool> {
        self.values.get(var as usize - 1).copied()
    }
}

/// A partial assignment, typically a propagation fixpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialAssignment {
    values: Vec<Option<bool>>,
}

impl PartialAssignment {
    pub fn new(num_vars: u32) -> Self {
        PartialAssignment {
            values: vec![None; num_vars as usize],
        }
    }

    pub fn set(&mut self, lit: i32) {
        self.values[lit.unsigned_abs() as usize - 1] = Some(lit > 0);
    }

    pub fn assigned_literals(&self) -> Vec<i32> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(v, val)| val.map(|b| if b { v as i32 + 1 } else { -(v as i32 + 1) }))
            .collect()
    }

    pub fn assigned_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }
}

impl Valuation for PartialAssignment {
    fn value(&self, var: u32) -> Option<bool> {
        self.values.get(var as usize - 1).copied().flatten()
    }
}
