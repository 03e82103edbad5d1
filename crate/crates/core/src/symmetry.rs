//! Symmetry breaking for G_{7,s}: fixed units on the key vertices, the three
//! RAT binaries, canonical classes of the 3×3 matrix and of coordinates 3/4,
//! the split of the hardest case over c_2, blocking clauses for every
//! non-canonical assignment, the case list, and the cover check.
//!
//! Key vertices are named by block index: c_0, c_1, c_2, c_3, c_19, c_35,
//! c_67. Cell values are offsets in ⟨s⟩; every cell used here lies in a
//! coordinate whose block bit is 0, so offset and coordinate coincide.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::dratcheck::{check_proof, CheckReport};
use crate::encoder::{encode, ClauseDb, ClauseFamily, VarMap};
use crate::error::{Error, Result};
use crate::kellergraph::KellerInstance;
use crate::satkit::{solve, Budget, Formula, SolveStatus, SolveStats};

/// `(block, coordinate)` of the six matrix cells, in vector order.
pub const MATRIX_CELLS: [(usize, usize); 6] = [(19, 6), (19, 7), (35, 5), (35, 7), (67, 5), (67, 6)];
/// `(row, column)` of each matrix cell; rows are c_19, c_35, c_67 and
/// columns are coordinates 5, 6, 7.
const MATRIX_POS: [(usize, usize); 6] = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];
/// Cells of each column, in vector order.
const MATRIX_COLUMNS: [[usize; 2]; 3] = [[2, 4], [0, 5], [1, 3]];

pub const COORD34_CELLS: [(usize, usize); 8] = [
    (3, 3),
    (3, 4),
    (19, 3),
    (19, 4),
    (35, 3),
    (35, 4),
    (67, 3),
    (67, 4),
];

pub const C2_CELLS: [(usize, usize); 5] = [(2, 3), (2, 4), (2, 5), (2, 6), (2, 7)];

/// The matrix of the hard case, identical for every s.
pub const HARDEST_MATRIX: [u8; 6] = [0, 1, 1, 0, 0, 1];

const PERMS3: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

fn require_n7(inst: &KellerInstance) -> Result<()> {
    if inst.n() != 7 {
        return Err(Error::Unsupported(format!(
            "symmetry breaking is defined for n = 7, got n = {}",
            inst.n()
        )));
    }
    if inst.s() < 2 || inst.s() > 255 {
        return Err(Error::Unsupported(format!("s = {} is outside 2..=255", inst.s())));
    }
    Ok(())
}

fn format_vector(cells: &[u8]) -> String {
    let parts: Vec<String> = cells.iter().map(u8::to_string).collect();
    format!("({})", parts.join(","))
}

fn cell_literals(vars: &VarMap, cells: &[(usize, usize)], values: &[u8]) -> Vec<i32> {
    cells
        .iter()
        .zip(values)
        .map(|(&(i, j), &k)| vars.x(i, j, k as usize) as i32)
        .collect()
}

/// The 19 fixed units on c_0, c_1 and c_3.
pub fn initial_units(inst: &KellerInstance) -> Result<Vec<i32>> {
    require_n7(inst)?;
    let vars = VarMap::new(inst);
    let mut units = Vec::with_capacity(19);
    for j in 1..=7 {
        units.push(vars.x(0, j, 0) as i32);
    }
    units.push(vars.x(1, 1, 0) as i32);
    units.push(vars.x(1, 2, 1) as i32);
    for j in 3..=7 {
        units.push(vars.x(1, j, 0) as i32);
    }
    units.push(vars.x(3, 1, 0) as i32);
    units.push(vars.x(3, 2, 1) as i32);
    for j in 5..=7 {
        units.push(vars.x(3, j, 1) as i32);
    }
    Ok(units)
}

/// The encoding plus the initial units.
pub fn phi(inst: &KellerInstance) -> Result<ClauseDb> {
    let mut db = encode(inst)?;
    db.extend_units(&initial_units(inst)?, ClauseFamily::InitialUnit)?;
    Ok(db)
}

/// The three matrix pair constraints, pivot (RAT witness) first.
pub fn rat_binaries(inst: &KellerInstance) -> Result<[[i32; 2]; 3]> {
    require_n7(inst)?;
    let v = VarMap::new(inst);
    let x = |i, j| v.x(i, j, 1) as i32;
    Ok([
        [x(19, 6), x(35, 5)],
        [x(35, 7), x(67, 6)],
        [x(67, 5), x(19, 7)],
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixAssignment(pub [u8; 6]);

impl MatrixAssignment {
    pub fn cells(&self) -> &[u8; 6] {
        &self.0
    }

    /// All three pair constraints hold.
    pub fn is_valid(&self) -> bool {
        let c = &self.0;
        (c[0] == 1 || c[2] == 1) && (c[3] == 1 || c[5] == 1) && (c[4] == 1 || c[1] == 1)
    }

    /// Simultaneous row and column permutation: entry (r, c) moves to
    /// (σ(r), σ(c)).
    pub fn conjugate(&self, sigma: [usize; 3]) -> Self {
        let mut out = [0u8; 6];
        for (idx, &(r, c)) in MATRIX_POS.iter().enumerate() {
            let target = (sigma[r], sigma[c]);
            let t = MATRIX_POS.iter().position(|&p| p == target).expect("off-diagonal");
            out[t] = self.0[idx];
        }
        MatrixAssignment(out)
    }

    /// Apply a permutation of ⟨s⟩ fixing 0 and 1 to one column.
    pub fn permute_column(&self, column: usize, perm: &[u8]) -> Self {
        let mut out = self.0;
        for &cell in &MATRIX_COLUMNS[column] {
            out[cell] = perm[out[cell] as usize];
        }
        MatrixAssignment(out)
    }

    /// Smallest relabeling of the values ≥ 2 in each column.
    fn relabel(&self) -> Self {
        let mut out = self.0;
        for col in MATRIX_COLUMNS {
            let mut map: Vec<(u8, u8)> = Vec::new();
            for cell in col {
                let v = out[cell];
                if v < 2 {
                    continue;
                }
                let label = match map.iter().find(|m| m.0 == v) {
                    Some(m) => m.1,
                    None => {
                        let l = 2 + map.len() as u8;
                        map.push((v, l));
                        l
                    }
                };
                out[cell] = label;
            }
        }
        MatrixAssignment(out)
    }

    /// Lexicographically least member of the orbit.
    pub fn canonical(&self) -> Self {
        self.canonical_with_sigma().0
    }

    /// The canonical form and a conjugation reaching it.
    pub fn canonical_with_sigma(&self) -> (Self, [usize; 3]) {
        PERMS3
            .iter()
            .map(|&sigma| (self.conjugate(sigma).relabel(), sigma))
            .min()
            .expect("six permutations")
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical() == *self
    }

    pub fn literals(&self, inst: &KellerInstance) -> Vec<i32> {
        cell_literals(&VarMap::new(inst), &MATRIX_CELLS, &self.0)
    }
}

impl fmt::Display for MatrixAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_vector(&self.0))
    }
}

/// Every assignment of the six cells over ⟨s⟩ satisfying the pair
/// constraints.
pub fn valid_matrix_assignments(s: usize) -> Vec<MatrixAssignment> {
    let mut out = Vec::new();
    for code in 0..s.pow(6) {
        let mut cells = [0u8; 6];
        let mut c = code;
        for k in (0..6).rev() {
            cells[k] = (c % s) as u8;
            c /= s;
        }
        let m = MatrixAssignment(cells);
        if m.is_valid() {
            out.push(m);
        }
    }
    out
}

/// Canonical representatives of the valid matrix assignments, sorted.
pub fn matrix_classes(inst: &KellerInstance) -> Result<Vec<MatrixAssignment>> {
    require_n7(inst)?;
    let set: BTreeSet<MatrixAssignment> = valid_matrix_assignments(inst.s())
        .iter()
        .map(MatrixAssignment::canonical)
        .collect();
    Ok(set.into_iter().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord34Assignment(pub [u8; 8]);

impl Coord34Assignment {
    pub fn cells(&self) -> &[u8; 8] {
        &self.0
    }

    pub fn swap_columns(&self) -> Self {
        let mut out = self.0;
        for k in 0..4 {
            out.swap(2 * k, 2 * k + 1);
        }
        Coord34Assignment(out)
    }

    /// Apply a permutation of ⟨s⟩ fixing 0 to column 3 (`column = 0`) or
    /// column 4 (`column = 1`).
    pub fn permute_column(&self, column: usize, perm: &[u8]) -> Self {
        let mut out = self.0;
        for k in 0..4 {
            let cell = 2 * k + column;
            out[cell] = perm[out[cell] as usize];
        }
        Coord34Assignment(out)
    }

    /// Permute the rows c_19, c_35, c_67 as a matrix conjugation does: the
    /// row at position r moves to σ(r). c_3 stays.
    pub fn permute_rows(&self, sigma: [usize; 3]) -> Self {
        let mut out = self.0;
        for r in 0..3 {
            for col in 0..2 {
                out[2 + 2 * sigma[r] + col] = self.0[2 + 2 * r + col];
            }
        }
        Coord34Assignment(out)
    }

    fn relabel(&self) -> Self {
        let mut out = self.0;
        for col in 0..2 {
            let mut map: Vec<(u8, u8)> = Vec::new();
            for k in 0..4 {
                let cell = 2 * k + col;
                let v = out[cell];
                if v == 0 {
                    continue;
                }
                let label = match map.iter().find(|m| m.0 == v) {
                    Some(m) => m.1,
                    None => {
                        let l = 1 + map.len() as u8;
                        map.push((v, l));
                        l
                    }
                };
                out[cell] = label;
            }
        }
        Coord34Assignment(out)
    }

    pub fn canonical(&self) -> Self {
        self.relabel().min(self.swap_columns().relabel())
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical() == *self
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0)
    }

    pub fn literals(&self, inst: &KellerInstance) -> Vec<i32> {
        cell_literals(&VarMap::new(inst), &COORD34_CELLS, &self.0)
    }
}

impl fmt::Display for Coord34Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_vector(&self.0))
    }
}

fn all_vectors<const N: usize>(s: usize) -> impl Iterator<Item = [u8; N]> {
    (0..s.pow(N as u32)).map(move |code| {
        let mut cells = [0u8; N];
        let mut c = code;
        for k in (0..N).rev() {
            cells[k] = (c % s) as u8;
            c /= s;
        }
        cells
    })
}

pub fn coord34_classes(inst: &KellerInstance) -> Result<Vec<Coord34Assignment>> {
    require_n7(inst)?;
    let set: BTreeSet<Coord34Assignment> = all_vectors::<8>(inst.s())
        .map(|c| Coord34Assignment(c).canonical())
        .collect();
    Ok(set.into_iter().collect())
}

/// Coordinates 3 to 7 of c_2, used only inside the hard case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct C2Assignment(pub [u8; 5]);

impl C2Assignment {
    pub fn cells(&self) -> &[u8; 5] {
        &self.0
    }

    /// Shift coordinates 5..7 right: (a, b, c) ↦ (c, a, b).
    pub fn rotate(&self) -> Self {
        let c = self.0;
        C2Assignment([c[0], c[1], c[4], c[2], c[3]])
    }

    pub fn canonical(&self) -> Self {
        let c = self.0;
        let a = u8::from(c[0] != 0);
        let b = u8::from(c[1] != 0);
        let tail = [c[2].min(2), c[3].min(2), c[4].min(2)];
        let rotations = [
            tail,
            [tail[2], tail[0], tail[1]],
            [tail[1], tail[2], tail[0]],
        ];
        let t = rotations.into_iter().min().expect("three rotations");
        C2Assignment([a.min(b), a.max(b), t[0], t[1], t[2]])
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical() == *self
    }

    pub fn literals(&self, inst: &KellerInstance) -> Vec<i32> {
        cell_literals(&VarMap::new(inst), &C2_CELLS, &self.0)
    }
}

impl fmt::Display for C2Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_vector(&self.0))
    }
}

/// Whether `(matrix, coord34)` is the case that gets split over c_2.
pub fn is_hardest(matrix: &MatrixAssignment, coord34: &Coord34Assignment) -> bool {
    matrix.0 == HARDEST_MATRIX && coord34.is_zero()
}

/// The 33 canonical c_2 assignments of the hard case.
pub fn hardest_split(
    inst: &KellerInstance,
    matrix: &MatrixAssignment,
    coord34: &Coord34Assignment,
) -> Result<Vec<C2Assignment>> {
    require_n7(inst)?;
    if !is_hardest(matrix, coord34) {
        return Err(Error::Input(format!(
            "{matrix} × {coord34} is not the hard case; only {} × all-zero is split",
            format_vector(&HARDEST_MATRIX)
        )));
    }
    let set: BTreeSet<C2Assignment> = all_vectors::<5>(inst.s())
        .map(|c| C2Assignment(c).canonical())
        .collect();
    Ok(set.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseCube {
    pub index: usize,
    pub matrix: MatrixAssignment,
    pub coord34: Coord34Assignment,
    pub c2: Option<C2Assignment>,
    /// Positive x-literals: matrix cells, coordinate-3/4 cells, then c_2.
    pub literals: Vec<i32>,
}

impl CaseCube {
    fn new(
        index: usize,
        vars: &VarMap,
        matrix: MatrixAssignment,
        coord34: Coord34Assignment,
        c2: Option<C2Assignment>,
    ) -> Self {
        let mut literals = cell_literals(vars, &MATRIX_CELLS, &matrix.0);
        literals.extend(cell_literals(vars, &COORD34_CELLS, &coord34.0));
        if let Some(c) = &c2 {
            literals.extend(cell_literals(vars, &C2_CELLS, &c.0));
        }
        CaseCube {
            index,
            matrix,
            coord34,
            c2,
            literals,
        }
    }

    /// Rebuild a cube from its literals.
    pub fn from_literals(index: usize, literals: &[i32], inst: &KellerInstance) -> Result<Self> {
        Self::decode(index, literals, &VarMap::new(inst))
    }

    fn decode(index: usize, literals: &[i32], vars: &VarMap) -> Result<Self> {
        let mut values: HashMap<(usize, usize), u8> = HashMap::new();
        for &l in literals {
            let (i, j, k) = (l > 0)
                .then(|| vars.x_coords(l as u32))
                .flatten()
                .ok_or_else(|| Error::Input(format!("cube literal {l} is not a positive x variable")))?;
            if values.insert((i, j), k as u8).is_some() {
                return Err(Error::Input(format!("cube fixes cell c{i}_{j} twice")));
            }
        }
        let take = |cells: &[(usize, usize)]| -> Option<Vec<u8>> {
            cells.iter().map(|c| values.get(c).copied()).collect()
        };
        let m = take(&MATRIX_CELLS).ok_or_else(|| Error::Input("cube misses a matrix cell".into()))?;
        let c = take(&COORD34_CELLS)
            .ok_or_else(|| Error::Input("cube misses a coordinate-3/4 cell".into()))?;
        let c2 = take(&C2_CELLS);
        let expected = 14 + if c2.is_some() { 5 } else { 0 };
        if literals.len() != expected {
            return Err(Error::Input(format!(
                "cube has {} literals, expected {expected}",
                literals.len()
            )));
        }
        Ok(CaseCube::new(
            index,
            vars,
            MatrixAssignment(m.try_into().expect("six")),
            Coord34Assignment(c.try_into().expect("eight")),
            c2.map(|v| C2Assignment(v.try_into().expect("five"))),
        ))
    }

    pub fn is_hardest_subcase(&self) -> bool {
        self.c2.is_some()
    }
}

impl fmt::Display for CaseCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case {}: {} × {}", self.index, self.matrix, self.coord34)?;
        if let Some(c) = &self.c2 {
            write!(f, " × c2 {c}")?;
        }
        Ok(())
    }
}

/// Matrix classes × coordinate-3/4 classes, the hard pair replaced by its
/// c_2 subcases appended at the end.
pub fn enumerate_cases(inst: &KellerInstance) -> Result<Vec<CaseCube>> {
    let matrices = matrix_classes(inst)?;
    let coords = coord34_classes(inst)?;
    let vars = VarMap::new(inst);
    let mut cases = Vec::with_capacity(matrices.len() * coords.len() + 32);
    let mut hardest = None;
    for m in &matrices {
        for c in &coords {
            if is_hardest(m, c) {
                hardest = Some((*m, *c));
                continue;
            }
            cases.push(CaseCube::new(cases.len(), &vars, *m, *c, None));
        }
    }
    if let Some((m, c)) = hardest {
        for c2 in hardest_split(inst, &m, &c)? {
            cases.push(CaseCube::new(cases.len(), &vars, m, c, Some(c2)));
        }
    }
    Ok(cases)
}

/// One clause per valid non-canonical matrix assignment.
pub fn matrix_blocking_clauses(inst: &KellerInstance) -> Result<Vec<Vec<i32>>> {
    require_n7(inst)?;
    Ok(valid_matrix_assignments(inst.s())
        .into_iter()
        .filter(|m| !m.is_canonical())
        .map(|m| m.literals(inst).into_iter().map(|l| -l).collect())
        .collect())
}

pub fn coord34_blocking_clauses(inst: &KellerInstance) -> Result<Vec<Vec<i32>>> {
    require_n7(inst)?;
    let vars = VarMap::new(inst);
    Ok(all_vectors::<8>(inst.s())
        .map(Coord34Assignment)
        .filter(|c| !c.is_canonical())
        .map(|c| cell_literals(&vars, &COORD34_CELLS, &c.0).into_iter().map(|l| -l).collect())
        .collect())
}

/// Inside the hard case, forbid every non-canonical c_2 assignment.
pub fn hardest_blocking_clauses(inst: &KellerInstance) -> Result<Vec<Vec<i32>>> {
    require_n7(inst)?;
    let vars = VarMap::new(inst);
    let mut guard: Vec<i32> = cell_literals(&vars, &MATRIX_CELLS, &HARDEST_MATRIX);
    guard.extend(cell_literals(&vars, &COORD34_CELLS, &[0; 8]));
    let guard: Vec<i32> = guard.into_iter().map(|l| -l).collect();
    Ok(all_vectors::<5>(inst.s())
        .map(C2Assignment)
        .filter(|c| !c.is_canonical())
        .map(|c| {
            let mut clause = guard.clone();
            clause.extend(cell_literals(&vars, &C2_CELLS, &c.0).into_iter().map(|l| -l));
            clause
        })
        .collect())
}

/// All blocking clauses: matrix stage, coordinate-3/4 stage, hard case.
pub fn blocking_clauses(inst: &KellerInstance) -> Result<Vec<Vec<i32>>> {
    let mut out = matrix_blocking_clauses(inst)?;
    out.extend(coord34_blocking_clauses(inst)?);
    out.extend(hardest_blocking_clauses(inst)?);
    Ok(out)
}

/// Φ with the RAT binaries and, optionally, the blocking clauses.
pub fn symmetry_broken(inst: &KellerInstance, with_blocking: bool) -> Result<ClauseDb> {
    let mut db = phi(inst)?;
    for b in rat_binaries(inst)? {
        db.push(b.to_vec(), ClauseFamily::RatBinary)?;
    }
    if with_blocking {
        for c in blocking_clauses(inst)? {
            db.push(c, ClauseFamily::TrustedSymmetry)?;
        }
    }
    Ok(db)
}

/// Class list: one vector per line.
pub fn write_class_list<T: fmt::Display>(classes: &[T]) -> String {
    let mut out = String::new();
    for c in classes {
        out.push_str(&c.to_string());
        out.push('\n');
    }
    out
}

/// Parse `(a,b,...)` lines; blank lines and `#` comments are skipped.
pub fn parse_class_list(text: &str) -> Result<Vec<Vec<u8>>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let inner = line
            .strip_prefix('(')
            .and_then(|l| l.strip_suffix(')'))
            .ok_or_else(|| Error::parse(idx + 1, format!("expected `(a,b,...)`, got `{line}`")))?;
        let v = inner
            .split(',')
            .map(|t| t.trim().parse::<u8>())
            .collect::<std::result::Result<Vec<u8>, _>>()
            .map_err(|e| Error::parse(idx + 1, e.to_string()))?;
        out.push(v);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverSummary {
    pub valid_matrices: usize,
    pub matrix_classes: usize,
    pub coord34_assignments: usize,
    pub coord34_classes: usize,
    pub c2_assignments: usize,
    pub c2_classes: usize,
    pub cubes: usize,
}

/// Combinatorial cover check: every valid assignment of the case cells
/// canonicalizes, stage by stage, to the cells of exactly one cube.
///
/// Stages compose because each later group acts trivially on the earlier
/// cells: a matrix conjugation only permutes the coordinate-3/4 rows, which
/// is a bijection of ⟨s⟩^8, and the c_2 stage is the stabilizer of the hard
/// pair.
pub fn cover_check(cases: &[CaseCube], inst: &KellerInstance) -> Result<CoverSummary> {
    require_n7(inst)?;
    let s = inst.s();
    let vars = VarMap::new(inst);
    let mut pairs: HashMap<(MatrixAssignment, Coord34Assignment), usize> = HashMap::new();
    let mut hard: HashMap<C2Assignment, usize> = HashMap::new();
    for (pos, cube) in cases.iter().enumerate() {
        let decoded = CaseCube::decode(cube.index, &cube.literals, &vars)?;
        if decoded.matrix != cube.matrix || decoded.coord34 != cube.coord34 || decoded.c2 != cube.c2 {
            return Err(Error::Cover(format!("{cube}: literals disagree with its cells")));
        }
        if !cube.matrix.is_valid() || !cube.matrix.is_canonical() {
            return Err(Error::Cover(format!("{cube}: matrix cells are not a canonical valid class")));
        }
        if !cube.coord34.is_canonical() {
            return Err(Error::Cover(format!("{cube}: coordinate-3/4 cells are not canonical")));
        }
        let hardest = is_hardest(&cube.matrix, &cube.coord34);
        match (&cube.c2, hardest) {
            (Some(c2), true) => {
                if !c2.is_canonical() {
                    return Err(Error::Cover(format!("{cube}: c2 cells are not canonical")));
                }
                if let Some(prev) = hard.insert(*c2, pos) {
                    return Err(Error::Cover(format!(
                        "{cube} duplicates {}",
                        cases[prev]
                    )));
                }
            }
            (Some(_), false) => {
                return Err(Error::Cover(format!("{cube}: only the hard case is split over c2")))
            }
            (None, true) => {
                return Err(Error::Cover(format!("{cube}: the hard case must be split over c2")))
            }
            (None, false) => {
                if let Some(prev) = pairs.insert((cube.matrix, cube.coord34), pos) {
                    return Err(Error::Cover(format!("{cube} duplicates {}", cases[prev])));
                }
            }
        }
    }

    let valid = valid_matrix_assignments(s);
    let mut matrix_reps = BTreeSet::new();
    for m in &valid {
        matrix_reps.insert(m.canonical());
    }
    let mut coord_reps = BTreeSet::new();
    let mut coord_count = 0;
    for c in all_vectors::<8>(s) {
        coord_reps.insert(Coord34Assignment(c).canonical());
        coord_count += 1;
    }
    let mut c2_reps = BTreeSet::new();
    let mut c2_count = 0;
    for c in all_vectors::<5>(s) {
        c2_reps.insert(C2Assignment(c).canonical());
        c2_count += 1;
    }

    // every valid matrix assignment reaches a class; name one per missing class
    let uncovered_matrix = |m: &MatrixAssignment| {
        valid
            .iter()
            .find(|v| v.canonical() == *m)
            .copied()
            .unwrap_or(*m)
    };
    for m in &matrix_reps {
        for c in &coord_reps {
            if is_hardest(m, c) {
                for c2 in &c2_reps {
                    if !hard.contains_key(c2) {
                        return Err(Error::Cover(format!(
                            "assignment {} × {} × c2 {} is not covered by any cube",
                            uncovered_matrix(m),
                            c,
                            c2
                        )));
                    }
                }
            } else if !pairs.contains_key(&(*m, *c)) {
                return Err(Error::Cover(format!(
                    "assignment {} × {} is not covered by any cube",
                    uncovered_matrix(m),
                    c
                )));
            }
        }
    }
    let expected = matrix_reps.len() * coord_reps.len() - 1 + c2_reps.len();
    if cases.len() != expected {
        return Err(Error::Cover(format!(
            "{} cubes, but the classes account for {expected}",
            cases.len()
        )));
    }
    Ok(CoverSummary {
        valid_matrices: valid.len(),
        matrix_classes: matrix_reps.len(),
        coord34_assignments: coord_count,
        coord34_classes: coord_reps.len(),
        c2_assignments: c2_count,
        c2_classes: c2_reps.len(),
        cubes: cases.len(),
    })
}

/// The clauses over the case cells only: exactly-one per cell, the RAT
/// binaries, the blocking clauses, and one clause negating each cube.
pub fn cover_formula(cases: &[CaseCube], inst: &KellerInstance) -> Result<Formula> {
    require_n7(inst)?;
    let vars = VarMap::new(inst);
    let s = inst.s();
    let mut clauses = Vec::new();
    let cells: Vec<(usize, usize)> = MATRIX_CELLS
        .iter()
        .chain(COORD34_CELLS.iter())
        .chain(C2_CELLS.iter())
        .copied()
        .collect();
    for &(i, j) in &cells {
        clauses.push((0..s).map(|k| vars.x(i, j, k) as i32).collect());
        for k in 0..s {
            for k2 in k + 1..s {
                clauses.push(vec![-(vars.x(i, j, k) as i32), -(vars.x(i, j, k2) as i32)]);
            }
        }
    }
    for b in rat_binaries(inst)? {
        clauses.push(b.to_vec());
    }
    clauses.extend(blocking_clauses(inst)?);
    for cube in cases {
        clauses.push(cube.literals.iter().map(|&l| -l).collect());
    }
    let mut f = Formula::new(vars.num_vars(), clauses);
    f.set_keller_instance(inst.n(), s);
    Ok(f)
}

#[derive(Debug, Clone)]
pub struct SatCoverReport {
    pub status: SolveStatus,
    pub clauses: usize,
    pub stats: SolveStats,
    pub check: Option<CheckReport>,
}

impl SatCoverReport {
    pub fn passed(&self) -> bool {
        self.status == SolveStatus::Unsat && self.check.as_ref().is_some_and(|c| c.accepted)
    }
}

/// SAT-based cover check on [`cover_formula`]. Unsatisfiability of this
/// subset implies it for the full symmetry-broken formula with the cubes
/// negated. The refutation is checked.
pub fn cover_check_sat(
    cases: &[CaseCube],
    inst: &KellerInstance,
    budget: &Budget,
    seed: u64,
) -> Result<SatCoverReport> {
    let f = cover_formula(cases, inst)?;
    let r = solve(&f, &[], budget, seed)?;
    let check = r.proof.as_ref().map(|p| check_proof(&f, p));
    Ok(SatCoverReport {
        status: r.status,
        clauses: f.clauses().len(),
        stats: r.stats,
        check,
    })
}

/// Every distinct canonical assignment reached from a set of raw vectors.
pub fn distinct_matrix_classes(vectors: &[[u8; 6]]) -> HashSet<MatrixAssignment> {
    vectors.iter().map(|v| MatrixAssignment(*v).canonical()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::satkit::propagate;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn inst(s: usize) -> KellerInstance {
        KellerInstance::new(7, s).unwrap()
    }

    #[test]
    fn nineteen_units() {
        let i = inst(3);
        let u = initial_units(&i).unwrap();
        assert_eq!(u.len(), 19);
        let v = VarMap::new(&i);
        assert!(u.contains(&(v.x(3, 2, 1) as i32)));
        assert!(initial_units(&KellerInstance::new(6, 3).unwrap()).is_err());
    }

    #[test]
    fn units_force_the_s_plus_one_diagonal() {
        let i = inst(3);
        let db = phi(&i).unwrap();
        let out = propagate(&db.to_formula(), &[]);
        let a = out.assignment().expect("no conflict");
        let v = VarMap::new(&i);
        for (b, j) in [(19, 5), (35, 6), (67, 7)] {
            for coord in [1usize, 2] {
                let k = if coord == 1 { 0 } else { 1 };
                assert!(a.assigned_literals().contains(&(v.x(b, coord, k) as i32)));
            }
            assert!(a.assigned_literals().contains(&(v.x(b, j, 1) as i32)), "c{b}_{j}");
        }
    }

    #[test]
    fn valid_count_is_inclusion_exclusion() {
        for s in [3usize, 4, 6] {
            let s6 = s.pow(6) as i64;
            let t = s as i64 - 1;
            let st = s as i64;
            let ie = s6 - (3 * t * t * st.pow(4) - 3 * t.pow(4) * st * st + t.pow(6));
            assert_eq!(valid_matrix_assignments(s).len() as i64, ie);
            assert_eq!(ie, (2 * st - 1).pow(3));
        }
    }

    #[test]
    fn worked_example_orbit() {
        let a = MatrixAssignment([1, 2, 2, 2, 1, 1]);
        let b = MatrixAssignment([1, 1, 2, 1, 2, 2]);
        assert_eq!(a.canonical(), b.canonical());
        assert_eq!(a.canonical(), b);
    }

    #[test]
    fn hardest_matrix_is_canonical_for_all_s() {
        for s in [3, 4, 6] {
            assert!(matrix_classes(&inst(s))
                .unwrap()
                .contains(&MatrixAssignment(HARDEST_MATRIX)));
        }
    }

    /// Orbit of a matrix assignment under explicit group elements.
    fn matrix_orbit(m: MatrixAssignment, s: usize) -> BTreeSet<MatrixAssignment> {
        let mut seen = BTreeSet::from([m]);
        let mut stack = vec![m];
        let swap23: Vec<u8> = (0..s as u8)
            .map(|v| match v {
                2 => 3.min(s as u8 - 1),
                3 => 2,
                v => v,
            })
            .collect();
        let cycle: Vec<u8> = (0..s as u8)
            .map(|v| if v < 2 { v } else { 2 + (v - 1) % (s as u8 - 2) })
            .collect();
        while let Some(x) = stack.pop() {
            let mut next = vec![x.conjugate([1, 0, 2]), x.conjugate([1, 2, 0])];
            if s > 3 {
                for col in 0..3 {
                    next.push(x.permute_column(col, &swap23));
                    next.push(x.permute_column(col, &cycle));
                }
            }
            for y in next {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    #[test]
    fn matrix_classes_match_orbit_closure() {
        for s in [3usize, 4] {
            let mut remaining: BTreeSet<MatrixAssignment> = valid_matrix_assignments(s).into_iter().collect();
            let mut orbits = 0;
            while let Some(&m) = remaining.iter().next() {
                let orbit = matrix_orbit(m, s);
                let min = *orbit.iter().next().unwrap();
                for x in &orbit {
                    assert_eq!(x.canonical(), min);
                    remaining.remove(x);
                }
                orbits += 1;
            }
            assert_eq!(orbits, matrix_classes(&inst(s)).unwrap().len());
        }
    }

    #[test]
    fn burnside_column_counts() {
        // orbits of 4-tuples over ⟨s⟩ under permutations fixing 0
        fn column_orbits(s: usize) -> usize {
            let mut set = BTreeSet::new();
            for code in 0..s.pow(4) {
                let mut col = [0u8; 4];
                let mut c = code;
                for cell in &mut col {
                    *cell = (c % s) as u8;
                    c /= s;
                }
                let mut map = Vec::new();
                let norm: Vec<u8> = col
                    .iter()
                    .map(|&v| {
                        if v == 0 {
                            0
                        } else if let Some(p) = map.iter().position(|&m| m == v) {
                            p as u8 + 1
                        } else {
                            map.push(v);
                            map.len() as u8
                        }
                    })
                    .collect();
                set.insert(norm);
            }
            set.len()
        }
        for (s, per_column, pairs) in [(3, 41, 861), (4, 51, 1326), (6, 52, 1378)] {
            let c = column_orbits(s);
            assert_eq!(c, per_column);
            assert_eq!(c * (c + 1) / 2, pairs);
        }
    }

    #[test]
    fn canonical_forms_are_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for s in [3usize, 4, 6] {
            for _ in 0..400 {
                let mut cells = [0u8; 6];
                for c in cells.iter_mut() {
                    *c = rng.gen_range(0..s as u8);
                }
                let m = MatrixAssignment(cells);
                let canon = m.canonical();
                assert_eq!(canon.canonical(), canon);
                let sigma = *PERMS3.choose(&mut rng).unwrap();
                let mut perm: Vec<u8> = (2..s as u8).collect();
                perm.shuffle(&mut rng);
                let full: Vec<u8> = [0, 1].into_iter().chain(perm).collect();
                let g = m.conjugate(sigma).permute_column(rng.gen_range(0..3), &full);
                assert_eq!(g.canonical(), canon);

                let mut cells = [0u8; 8];
                for c in cells.iter_mut() {
                    *c = rng.gen_range(0..s as u8);
                }
                let c = Coord34Assignment(cells);
                let canon = c.canonical();
                assert_eq!(canon.canonical(), canon);
                assert!(canon.0[0] < 2 && canon.0[1] < 2);
                let mut perm: Vec<u8> = (1..s as u8).collect();
                perm.shuffle(&mut rng);
                let full: Vec<u8> = [0].into_iter().chain(perm).collect();
                let g = c.swap_columns().permute_column(rng.gen_range(0..2), &full);
                assert_eq!(g.canonical(), canon);
            }
        }
    }

    #[test]
    fn cyclic_classes_of_three_values() {
        // Burnside: (27 + 3 + 3) / 3
        let mut set = BTreeSet::new();
        for t in all_vectors::<3>(3) {
            let rots = [t, [t[2], t[0], t[1]], [t[1], t[2], t[0]]];
            set.insert(rots.into_iter().min().unwrap());
        }
        assert_eq!(set.len(), 11);
        let a = C2Assignment([0, 0, 0, 1, 2]);
        let b = C2Assignment([0, 0, 2, 0, 1]);
        assert_eq!(a.canonical(), b.canonical());
        assert_eq!(a.rotate(), b);
    }

    #[test]
    fn hardest_split_is_refused_elsewhere() {
        let i = inst(3);
        let m = MatrixAssignment(HARDEST_MATRIX);
        let zero = Coord34Assignment([0; 8]);
        assert_eq!(hardest_split(&i, &m, &zero).unwrap().len(), 33);
        assert!(hardest_split(&i, &MatrixAssignment([1; 6]), &zero).is_err());
        let subs = hardest_split(&i, &m, &zero).unwrap();
        let heads: BTreeSet<[u8; 2]> = subs.iter().map(|c| [c.0[0], c.0[1]]).collect();
        assert_eq!(heads, BTreeSet::from([[0, 0], [0, 1], [1, 1]]));
    }

    #[test]
    fn blocking_clause_counts_and_canonical_survival() {
        let i = inst(3);
        let mb = matrix_blocking_clauses(&i).unwrap();
        assert_eq!(mb.len(), 100);
        assert!(mb.iter().all(|c| c.len() == 6));
        assert_eq!(coord34_blocking_clauses(&i).unwrap().len(), 6561 - 861);
        assert_eq!(hardest_blocking_clauses(&i).unwrap().len(), 243 - 33);
        let cases = enumerate_cases(&i).unwrap();
        let all = blocking_clauses(&i).unwrap();
        for cube in cases.iter().step_by(97).chain(cases.iter().rev().take(33)) {
            let lits: HashSet<i32> = cube.literals.iter().copied().collect();
            for clause in &all {
                // a clause is violated only if every literal is the negation of a cube literal
                assert!(!clause.iter().all(|l| lits.contains(&-l)), "{cube} blocked");
            }
        }
        let blocked = MatrixAssignment([1, 2, 2, 2, 1, 1]).literals(&i);
        let neg: Vec<i32> = blocked.iter().map(|l| -l).collect();
        assert!(mb.contains(&neg));
    }

    #[test]
    fn case_list_and_cover() {
        let i = inst(3);
        let cases = enumerate_cases(&i).unwrap();
        assert_eq!(cases.len(), 21_557);
        assert!(cases.iter().enumerate().all(|(k, c)| c.index == k));
        let summary = cover_check(&cases, &i).unwrap();
        assert_eq!(summary.matrix_classes, 25);
        assert_eq!(summary.coord34_classes, 861);
        assert_eq!(summary.c2_classes, 33);

        let mut missing = cases.clone();
        let removed = missing.remove(1234);
        let err = cover_check(&missing, &i).unwrap_err().to_string();
        assert!(err.contains(&removed.coord34.to_string()), "{err}");

        let mut dup = cases.clone();
        dup.push(cases[5].clone());
        assert!(cover_check(&dup, &i).is_err());
    }

    #[test]
    fn cube_literals_round_trip() {
        let i = inst(4);
        let cases = enumerate_cases(&i).unwrap();
        for cube in cases.iter().step_by(1001).chain(cases.last()) {
            let back = CaseCube::from_literals(cube.index, &cube.literals, &i).unwrap();
            assert_eq!(&back, cube);
        }
    }

    #[test]
    fn class_list_round_trip() {
        let classes = matrix_classes(&inst(3)).unwrap();
        let text = write_class_list(&classes);
        let parsed = parse_class_list(&text).unwrap();
        assert_eq!(parsed.len(), 25);
        assert_eq!(parsed[0], classes[0].0.to_vec());
        assert!(parse_class_list("1,2\n").is_err());
    }
}
