//! CNF encoding of "does `G_{n,s}` contain a clique of size `2^n`?".
//!
//! Instead of one variable per vertex, the encoding picks one vertex `c_i`
//! per block and encodes its coordinates. Variable families:
//!
//! * `x[i,j,k]`: coordinate `j` of `c_i` equals `s·w(i)_j + k`.
//! * `y[i,i',j',k]`: for blocks at Hamming distance one, `c_i` and `c_i'`
//!   disagree on `x[·,j',k]` (one implication direction only).
//! * `z[i,i',j]`: `c_i` and `c_i'` are `s` apart in coordinate `j`.
//!
//! Numbering is fixed so that DIMACS and proof files are reproducible:
//! `x` ids come first in `(i, j, k)` order, then `y` ids by distance-one pair
//! in lexicographic `(i, i')` order, then `z` ids by `(i, i', j)`.
//! Coordinates `j` are 1-based throughout this module.

use std::fmt;
use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kellergraph::{block_of, BlockIndex, KellerInstance, Vertex};
use crate::satkit::{Formula, Valuation};

/// Clause provenance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ClauseFamily {
    /// At-least-one and pairwise at-most-one over the offsets of a coordinate.
    OneValue,
    /// `y → (x ≠ x')`, two clauses per `y`.
    DifferLink,
    /// Some `y` holds for a distance-one pair.
    Differ,
    /// `z → (x = x')` for every offset, two clauses per offset.
    OppositeLink,
    /// Some `z` holds for a pair of blocks.
    Opposite,
    /// Fixed coordinates of the key vertices.
    InitialUnit,
    /// Pair constraints on the 3×3 matrix, checked as RAT.
    RatBinary,
    /// Symmetry-breaking clauses justified by a group argument, not a proof.
    TrustedSymmetry,
    /// Units pinning an externally supplied clique.
    CliqueUnit,
}

impl ClauseFamily {
    pub const ENCODING: [ClauseFamily; 5] = [
        ClauseFamily::OneValue,
        ClauseFamily::DifferLink,
        ClauseFamily::Differ,
        ClauseFamily::OppositeLink,
        ClauseFamily::Opposite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClauseFamily::OneValue => "one-value",
            ClauseFamily::DifferLink => "differ-link",
            ClauseFamily::Differ => "differ",
            ClauseFamily::OppositeLink => "opposite-link",
            ClauseFamily::Opposite => "opposite",
            ClauseFamily::InitialUnit => "initial-unit",
            ClauseFamily::RatBinary => "rat-binary",
            ClauseFamily::TrustedSymmetry => "TRUSTED-SYMMETRY",
            ClauseFamily::CliqueUnit => "clique-unit",
        }
    }
}

impl fmt::Display for ClauseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const NO_PAIR: u32 = u32::MAX;

/// Bijection between encoding variables and DIMACS ids.
#[derive(Debug, Clone)]
pub struct VarMap {
    n: usize,
    s: usize,
    x_count: u32,
    y_count: u32,
    z_count: u32,
    /// Rank of the distance-one pair `(i, i + 2^(j-1))`, indexed by `i*n + j-1`.
    dist1_rank: Vec<u32>,
    /// Offset of the first `z` of pair `(i, i')`, indexed by `i*2^n + i'`.
    z_base: Vec<u32>,
}

impl VarMap {
    pub fn new(inst: &KellerInstance) -> Self {
        let n = inst.n();
        let s = inst.s();
        let blocks = inst.block_count();

        let mut dist1_rank = vec![NO_PAIR; blocks * n];
        let mut rank = 0u32;
        for i in 0..blocks {
            for j in 0..n {
                if i >> j & 1 == 0 {
                    dist1_rank[i * n + j] = rank;
                    rank += 1;
                }
            }
        }

        let mut z_base = vec![NO_PAIR; blocks * blocks];
        let mut offset = 0u32;
        for i in 0..blocks {
            for i2 in i + 1..blocks {
                z_base[i * blocks + i2] = offset;
                offset += (i ^ i2).count_ones();
            }
        }

        let x_count = (blocks * n * s) as u32;
        let y_count = rank * ((n - 1) * s) as u32;
        VarMap {
            n,
            s,
            x_count,
            y_count,
            z_count: offset,
            dist1_rank,
            z_base,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn x_count(&self) -> u32 {
        self.x_count
    }

    pub fn y_count(&self) -> u32 {
        self.y_count
    }

    pub fn z_count(&self) -> u32 {
        self.z_count
    }

    pub fn num_vars(&self) -> u32 {
        self.x_count + self.y_count + self.z_count
    }

    /// Id of `x[i,j,k]`.
    pub fn x(&self, i: usize, j: usize, k: usize) -> u32 {
        debug_assert!(i < 1 << self.n && (1..=self.n).contains(&j) && k < self.s);
        (1 + (i * self.n + (j - 1)) * self.s + k) as u32
    }

    /// Inverse of [`VarMap::x`]; `None` for `y` and `z` ids.
    pub fn x_coords(&self, var: u32) -> Option<(usize, usize, usize)> {
        if var == 0 || var > self.x_count {
            return None;
        }
        let idx = (var - 1) as usize;
        let k = idx % self.s;
        let rest = idx / self.s;
        Some((rest / self.n, rest % self.n + 1, k))
    }

    /// Id of `y[i,i',j',k]`, where `w(i) ⊕ w(i') = e_j` with `i < i'` and
    /// `j' ≠ j`.
    pub fn y(&self, i: usize, i2: usize, j2: usize, k: usize) -> u32 {
        let diff = i ^ i2;
        debug_assert!(i < i2 && diff.is_power_of_two());
        let j = diff.trailing_zeros() as usize + 1;
        debug_assert!(j2 != j && (1..=self.n).contains(&j2) && k < self.s);
        let rank = self.dist1_rank[i * self.n + (j - 1)];
        debug_assert!(rank != NO_PAIR);
        let j_rank = if j2 < j { j2 - 1 } else { j2 - 2 };
        self.x_count
            + 1
            + rank * ((self.n - 1) * self.s) as u32
            + (j_rank * self.s + k) as u32
    }

    /// Id of `z[i,i',j]`, where `i < i'` and `w(i)_j ≠ w(i')_j`.
    pub fn z(&self, i: usize, i2: usize, j: usize) -> u32 {
        let diff = i ^ i2;
        debug_assert!(i < i2 && diff >> (j - 1) & 1 == 1);
        let base = self.z_base[i * (1 << self.n) + i2];
        let below = (diff & ((1 << (j - 1)) - 1)).count_ones();
        self.x_count + self.y_count + 1 + base + below
    }
}

/// An indexed CNF with provenance per clause.
#[derive(Debug, Clone)]
pub struct ClauseDb {
    instance: KellerInstance,
    num_vars: u32,
    clauses: Vec<Vec<i32>>,
    families: Vec<ClauseFamily>,
}

/// Sort by variable id, positive before negative; duplicates removed.
/// Returns `None` for tautologies.
pub fn normalize_clause(mut lits: Vec<i32>) -> Option<Vec<i32>> {
    lits.sort_by_key(|&l| (l.unsigned_abs(), l < 0));
    lits.dedup();
    if lits.windows(2).any(|w| w[0] == -w[1]) {
        return None;
    }
    Some(lits)
}

impl ClauseDb {
    pub fn new(instance: KellerInstance, num_vars: u32) -> Self {
        ClauseDb {
            instance,
            num_vars,
            clauses: Vec::new(),
            families: Vec::new(),
        }
    }

    pub fn instance(&self) -> &KellerInstance {
        &self.instance
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn families(&self) -> &[ClauseFamily] {
        &self.families
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[i32], ClauseFamily)> {
        self.clauses
            .iter()
            .map(Vec::as_slice)
            .zip(self.families.iter().copied())
    }

    /// Normalizes and appends a clause. Tautologies and literals outside the
    /// variable range are rejected.
    pub fn push(&mut self, lits: Vec<i32>, family: ClauseFamily) -> Result<()> {
        if let Some(&bad) = lits
            .iter()
            .find(|&&l| l == 0 || l.unsigned_abs() > self.num_vars)
        {
            return Err(Error::Input(format!(
                "literal {bad} outside 1..={}",
                self.num_vars
            )));
        }
        let clause = normalize_clause(lits)
            .ok_or_else(|| Error::Input("tautological clause".to_string()))?;
        self.clauses.push(clause);
        self.families.push(family);
        Ok(())
    }

    pub fn extend_units(&mut self, units: &[i32], family: ClauseFamily) -> Result<()> {
        for &u in units {
            self.push(vec![u], family)?;
        }
        Ok(())
    }

    pub fn count_family(&self, family: ClauseFamily) -> usize {
        self.families.iter().filter(|&&f| f == family).count()
    }

    /// First and last 1-based clause position of each family present.
    pub fn family_ranges(&self) -> Vec<(ClauseFamily, usize, usize, usize)> {
        let mut out: Vec<(ClauseFamily, usize, usize, usize)> = Vec::new();
        for (pos, &fam) in self.families.iter().enumerate() {
            match out.iter_mut().find(|r| r.0 == fam) {
                Some(r) => {
                    r.2 = pos + 1;
                    r.3 += 1;
                }
                None => out.push((fam, pos + 1, pos + 1, 1)),
            }
        }
        out
    }

    pub fn to_formula(&self) -> Formula {
        Formula::new(self.num_vars, self.clauses.clone())
    }

    pub fn into_formula(self) -> Formula {
        Formula::new(self.num_vars, self.clauses)
    }

    pub fn write_dimacs<W: Write>(&self, out: W) -> io::Result<()> {
        let mut out = io::BufWriter::new(out);
        writeln!(out, "c keller {} {}", self.instance.n(), self.instance.s())?;
        for (fam, first, last, count) in self.family_ranges() {
            writeln!(out, "c family {fam} count {count} first {first} last {last}")?;
        }
        writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        crate::satkit::write_clause_lines(&mut out, &self.clauses)?;
        out.flush()
    }

    pub fn to_dimacs_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_dimacs(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("DIMACS is ASCII")
    }
}

fn binomial2(m: u64) -> u64 {
    m * m.saturating_sub(1) / 2
}

/// Build the clique-existence CNF in its fixed emission order.
pub fn encode(inst: &KellerInstance) -> Result<ClauseDb> {
    let n = inst.n();
    let s = inst.s();
    if n < 2 {
        return Err(Error::Unsupported(format!(
            "{inst}: n must be at least 2 (G_{{1,s}} has no edges)"
        )));
    }
    let vars = VarMap::new(inst);
    let blocks = inst.block_count();
    let mut db = ClauseDb::new(*inst, vars.num_vars());
    let capacity = expected_clause_counts(inst).iter().map(|c| c.1).sum::<u64>();
    db.clauses.reserve(capacity as usize);
    db.families.reserve(capacity as usize);
    let x = |i, j, k| vars.x(i, j, k) as i32;

    for i in 0..blocks {
        for j in 1..=n {
            db.push((0..s).map(|k| x(i, j, k)).collect(), ClauseFamily::OneValue)?;
            for k in 0..s {
                for k2 in k + 1..s {
                    db.push(vec![-x(i, j, k), -x(i, j, k2)], ClauseFamily::OneValue)?;
                }
            }
        }
    }

    for i in 0..blocks {
        for j in 1..=n {
            let i2 = i | 1 << (j - 1);
            if i2 == i {
                continue;
            }
            let mut some = Vec::with_capacity((n - 1) * s);
            for j2 in (1..=n).filter(|&j2| j2 != j) {
                for k in 0..s {
                    let y = vars.y(i, i2, j2, k) as i32;
                    db.push(vec![-y, x(i, j2, k), x(i2, j2, k)], ClauseFamily::DifferLink)?;
                    db.push(vec![-y, -x(i, j2, k), -x(i2, j2, k)], ClauseFamily::DifferLink)?;
                    some.push(y);
                }
            }
            db.push(some, ClauseFamily::Differ)?;
        }
    }

    for i in 0..blocks {
        for i2 in i + 1..blocks {
            for j in (1..=n).filter(|&j| (i ^ i2) >> (j - 1) & 1 == 1) {
                let z = vars.z(i, i2, j) as i32;
                for k in 0..s {
                    db.push(vec![-z, x(i, j, k), -x(i2, j, k)], ClauseFamily::OppositeLink)?;
                    db.push(vec![-z, -x(i, j, k), x(i2, j, k)], ClauseFamily::OppositeLink)?;
                }
            }
        }
    }

    for i in 0..blocks {
        for i2 in i + 1..blocks {
            let zs = (1..=n)
                .filter(|&j| (i ^ i2) >> (j - 1) & 1 == 1)
                .map(|j| vars.z(i, i2, j) as i32)
                .collect();
            db.push(zs, ClauseFamily::Opposite)?;
        }
    }

    Ok(db)
}

/// Closed-form clause count per encoding family.
pub fn expected_clause_counts(inst: &KellerInstance) -> [(ClauseFamily, u64); 5] {
    let n = inst.n() as u64;
    let s = inst.s() as u64;
    let b = 1u64 << n;
    [
        (ClauseFamily::OneValue, b * n * (1 + binomial2(s))),
        (ClauseFamily::DifferLink, b * n * s * (n - 1)),
        (ClauseFamily::Differ, b / 2 * n),
        (ClauseFamily::OppositeLink, b * b / 2 * n * s),
        (ClauseFamily::Opposite, binomial2(b)),
    ]
}

/// Closed-form `(x, y, z)` variable counts.
pub fn expected_var_counts(inst: &KellerInstance) -> (u64, u64, u64) {
    let n = inst.n() as u64;
    let s = inst.s() as u64;
    let b = 1u64 << n;
    (b * n * s, b / 2 * n * s * (n - 1), b * b / 4 * n)
}

/// Totals written as single closed forms rather than sums of rows.
pub fn expected_totals(inst: &KellerInstance) -> (u64, u64) {
    let n = inst.n() as u64;
    let s = inst.s() as u64;
    let half = 1u64 << (n - 1);
    let vars = half * n * (s * (n + 1) + half);
    // 2^n·n·(3/2 + C(s,2) + n·s − s) kept integral by pulling out 2^(n-1)
    let clauses =
        half * n * (3 + 2 * binomial2(s) + 2 * n * s - 2 * s) + half * half * 2 * n * s + binomial2(2 * half);
    (vars, clauses)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyAudit {
    pub family: ClauseFamily,
    pub expected: u64,
    pub emitted: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountAudit {
    pub n: usize,
    pub s: usize,
    pub families: Vec<FamilyAudit>,
    pub vars_expected: u64,
    pub vars_emitted: u64,
    pub clauses_expected: u64,
    pub clauses_emitted: u64,
}

impl CountAudit {
    pub fn is_consistent(&self) -> bool {
        self.vars_expected == self.vars_emitted
            && self.clauses_expected == self.clauses_emitted
            && self.families.iter().all(|f| f.expected == f.emitted)
    }
}

/// Encode and compare every family count against its closed form.
pub fn audit_counts(inst: &KellerInstance) -> Result<CountAudit> {
    let db = encode(inst)?;
    let vars = VarMap::new(inst);
    let (vx, vy, vz) = expected_var_counts(inst);
    let (vars_total, clauses_total) = expected_totals(inst);
    if vx + vy + vz != vars_total {
        return Err(Error::Internal(format!(
            "{inst}: variable rows sum to {} but total formula gives {vars_total}",
            vx + vy + vz
        )));
    }
    let families: Vec<FamilyAudit> = expected_clause_counts(inst)
        .iter()
        .map(|&(family, expected)| FamilyAudit {
            family,
            expected,
            emitted: db.count_family(family) as u64,
        })
        .collect();
    let row_sum: u64 = families.iter().map(|f| f.expected).sum();
    if row_sum != clauses_total {
        return Err(Error::Internal(format!(
            "{inst}: clause rows sum to {row_sum} but total formula gives {clauses_total}"
        )));
    }
    let audit = CountAudit {
        n: inst.n(),
        s: inst.s(),
        families,
        vars_expected: vars_total,
        vars_emitted: db.num_vars() as u64,
        clauses_expected: clauses_total,
        clauses_emitted: db.len() as u64,
    };
    let split_ok = vars.x_count() as u64 == vx && vars.y_count() as u64 == vy && vars.z_count() as u64 == vz;
    if !audit.is_consistent() || !split_ok {
        return Err(Error::Internal(format!("{inst}: count audit mismatch: {audit:?}")));
    }
    Ok(audit)
}

/// Read the clique `{c_i}` off an assignment to the `x` variables.
pub fn decode_model<V: Valuation + ?Sized>(model: &V, inst: &KellerInstance) -> Result<Vec<Vertex>> {
    let vars = VarMap::new(inst);
    let n = inst.n();
    let s = inst.s();
    (0..inst.block_count())
        .map(|i| {
            let w = BlockIndex::from_index(i, n);
            let coords = (1..=n)
                .map(|j| {
                    let mut chosen = None;
                    for k in 0..s {
                        match model.value(vars.x(i, j, k)) {
                            Some(true) if chosen.is_some() => {
                                return Err(Error::MalformedModel(format!(
                                    "block {i} coordinate {j} has several offsets set"
                                )))
                            }
                            Some(true) => chosen = Some(k),
                            Some(false) => {}
                            None => {
                                return Err(Error::MalformedModel(format!(
                                    "x[{i},{j},{k}] is unassigned"
                                )))
                            }
                        }
                    }
                    let k = chosen.ok_or_else(|| {
                        Error::MalformedModel(format!("block {i} coordinate {j} has no offset set"))
                    })?;
                    Ok((if w.w(j) { s } else { 0 } + k) as u32)
                })
                .collect::<Result<Vec<u32>>>()?;
            Ok(Vertex::new(coords))
        })
        .collect()
}

/// Positive units `x[i,j,k]` pinning every coordinate of a full clique.
pub fn clique_to_units(clique: &[Vertex], inst: &KellerInstance) -> Result<Vec<i32>> {
    let blocks = inst.block_count();
    if clique.len() != blocks {
        return Err(Error::Input(format!(
            "expected {blocks} vertices, one per block, got {}",
            clique.len()
        )));
    }
    let mut by_block: Vec<Option<&Vertex>> = vec![None; blocks];
    for v in clique {
        let b = block_of(v, inst)?;
        if let Some(prev) = by_block[b.index()] {
            return Err(Error::Input(format!(
                "{prev} and {v} both lie in block {}",
                b.index()
            )));
        }
        by_block[b.index()] = Some(v);
    }
    let vars = VarMap::new(inst);
    let s = inst.s() as u32;
    let mut units = Vec::with_capacity(blocks * inst.n());
    for (i, v) in by_block.into_iter().enumerate() {
        let v = v.expect("every block filled");
        for (j0, &c) in v.coords().iter().enumerate() {
            units.push(vars.x(i, j0 + 1, (c % s) as usize) as i32);
        }
    }
    Ok(units)
}

/// Units fixing a single vertex `v` as the clique member of its block.
pub fn vertex_units(v: &Vertex, inst: &KellerInstance) -> Result<Vec<i32>> {
    let b = block_of(v, inst)?;
    let vars = VarMap::new(inst);
    let s = inst.s() as u32;
    Ok(v
        .coords()
        .iter()
        .enumerate()
        .map(|(j0, &c)| vars.x(b.index(), j0 + 1, (c % s) as usize) as i32)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::satkit::Model;
    use std::collections::HashSet;

    fn inst(n: usize, s: usize) -> KellerInstance {
        KellerInstance::new(n, s).unwrap()
    }

    #[test]
    fn table_two_sizes() {
        for (s, vars, clauses) in [(3, 39_424, 200_320), (4, 43_008, 265_728), (6, 50_176, 399_232)] {
            let db = encode(&inst(7, s)).unwrap();
            assert_eq!(db.num_vars(), vars);
            assert_eq!(db.len(), clauses);
        }
    }

    #[test]
    fn smallest_instance_counts() {
        let db = encode(&inst(2, 2)).unwrap();
        assert_eq!((db.num_vars(), db.len()), (32, 74));
        assert!(matches!(encode(&inst(1, 3)), Err(Error::Unsupported(_))));
    }

    #[test]
    fn family_rows_for_dimension_seven() {
        let audit = audit_counts(&inst(7, 3)).unwrap();
        let get = |f| audit.families.iter().find(|a| a.family == f).unwrap().emitted;
        assert_eq!(get(ClauseFamily::Differ), 448);
        assert_eq!(get(ClauseFamily::Opposite), 8128);
    }

    /// Recount every family by looping over the combinatorial definitions
    /// directly, independent of the emission code.
    #[test]
    fn loop_recount_matches_emission() {
        for (n, s) in [(3, 2), (2, 3), (4, 2)] {
            let k = inst(n, s);
            let blocks = 1usize << n;
            let mut one_value = 0;
            let mut differ_link = 0;
            let mut differ = 0;
            let mut opposite_link = 0;
            let mut opposite = 0;
            for i in 0..blocks {
                for i2 in 0..blocks {
                    if i >= i2 {
                        continue;
                    }
                    let diff: Vec<usize> = (0..n).filter(|&j| (i ^ i2) >> j & 1 == 1).collect();
                    if diff.len() == 1 {
                        differ += 1;
                        differ_link += 2 * (n - 1) * s;
                    }
                    opposite += 1;
                    opposite_link += diff.len() * 2 * s;
                }
                one_value += n * (1 + s * (s - 1) / 2);
            }
            let db = encode(&k).unwrap();
            assert_eq!(db.count_family(ClauseFamily::OneValue), one_value);
            assert_eq!(db.count_family(ClauseFamily::DifferLink), differ_link);
            assert_eq!(db.count_family(ClauseFamily::Differ), differ);
            assert_eq!(db.count_family(ClauseFamily::OppositeLink), opposite_link);
            assert_eq!(db.count_family(ClauseFamily::Opposite), opposite);
        }
    }

    #[test]
    fn var_numbering_is_a_bijection() {
        for (n, s) in [(2, 2), (3, 3), (4, 2)] {
            let k = inst(n, s);
            let v = VarMap::new(&k);
            let blocks = 1usize << n;
            let mut seen = HashSet::new();
            for i in 0..blocks {
                for j in 1..=n {
                    for kk in 0..s {
                        let id = v.x(i, j, kk);
                        assert_eq!(v.x_coords(id), Some((i, j, kk)));
                        assert!(seen.insert(id));
                    }
                }
            }
            let mut last_y = v.x_count();
            for i in 0..blocks {
                for j in 1..=n {
                    let i2 = i | 1 << (j - 1);
                    if i2 == i {
                        continue;
                    }
                    for j2 in (1..=n).filter(|&j2| j2 != j) {
                        for kk in 0..s {
                            let id = v.y(i, i2, j2, kk);
                            // emitted in increasing id order
                            assert_eq!(id, last_y + 1);
                            last_y = id;
                            assert!(seen.insert(id));
                        }
                    }
                }
            }
            let mut last_z = v.x_count() + v.y_count();
            for i in 0..blocks {
                for i2 in i + 1..blocks {
                    for j in (1..=n).filter(|&j| (i ^ i2) >> (j - 1) & 1 == 1) {
                        let id = v.z(i, i2, j);
                        assert_eq!(id, last_z + 1);
                        last_z = id;
                        assert!(seen.insert(id));
                    }
                }
            }
            assert_eq!(seen.len() as u32, v.num_vars());
            assert_eq!(last_z, v.num_vars());
        }
    }

    #[test]
    fn x_numbering_formula() {
        let v = VarMap::new(&inst(7, 3));
        assert_eq!(v.x(0, 1, 0), 1);
        assert_eq!(v.x(19, 6, 1), 1 + (19 * 7 + 5) * 3 + 1);
    }

    #[test]
    fn clauses_are_normalized() {
        let db = encode(&inst(3, 3)).unwrap();
        for (c, _) in db.iter() {
            assert!(c.windows(2).all(|w| w[0].unsigned_abs() < w[1].unsigned_abs()));
        }
        assert_eq!(normalize_clause(vec![3, -1, 3]), Some(vec![-1, 3]));
        assert_eq!(normalize_clause(vec![2, -2]), None);
    }

    #[test]
    fn dimacs_is_deterministic() {
        let a = encode(&inst(3, 2)).unwrap().to_dimacs_string();
        let b = encode(&inst(3, 2)).unwrap().to_dimacs_string();
        assert_eq!(a, b);
        assert!(a.starts_with("c keller 3 2\n"));
        assert!(a.contains("\np cnf "));
    }

    fn model_for(vertices: &[Vertex], k: &KellerInstance) -> Model {
        let v = VarMap::new(k);
        let mut values = vec![false; v.num_vars() as usize];
        for u in clique_to_units(vertices, k).unwrap() {
            values[u as usize - 1] = true;
        }
        Model::from_values(values)
    }

    #[test]
    fn decode_all_zero_offsets() {
        let k = inst(2, 2);
        let v = VarMap::new(&k);
        let mut values = vec![false; v.num_vars() as usize];
        for i in 0..4 {
            for j in 1..=2 {
                values[v.x(i, j, 0) as usize - 1] = true;
            }
        }
        let decoded = decode_model(&Model::from_values(values.clone()), &k).unwrap();
        let expect: Vec<Vertex> = [[0, 0], [2, 0], [0, 2], [2, 2]]
            .iter()
            .map(|c| Vertex::new(c.to_vec()))
            .collect();
        assert_eq!(decoded, expect);
        assert!(!crate::kellergraph::is_clique(&decoded, &k).unwrap());

        values[v.x(0, 1, 1) as usize - 1] = true;
        assert!(matches!(
            decode_model(&Model::from_values(values), &k),
            Err(Error::MalformedModel(_))
        ));
    }

    #[test]
    fn units_round_trip_through_decode() {
        let k = inst(2, 2);
        let vs: Vec<Vertex> = [[0, 0], [2, 1], [1, 2], [3, 3]]
            .iter()
            .map(|c| Vertex::new(c.to_vec()))
            .collect();
        let units = clique_to_units(&vs, &k).unwrap();
        assert_eq!(units.len(), 8);
        assert_eq!(decode_model(&model_for(&vs, &k), &k).unwrap(), vs);
    }

    #[test]
    fn units_for_key_vertex() {
        let k = inst(7, 3);
        let v = VarMap::new(&k);
        let c1 = Vertex::new(vec![3, 1, 0, 0, 0, 0, 0]);
        let mut expect = vec![v.x(1, 1, 0) as i32, v.x(1, 2, 1) as i32];
        expect.extend((3..=7).map(|j| v.x(1, j, 0) as i32));
        assert_eq!(vertex_units(&c1, &k).unwrap(), expect);
    }

    #[test]
    fn clique_units_reject_shared_blocks() {
        let k = inst(2, 2);
        let vs: Vec<Vertex> = [[0, 0], [1, 1], [1, 2], [3, 3]]
            .iter()
            .map(|c| Vertex::new(c.to_vec()))
            .collect();
        assert!(clique_to_units(&vs, &k).is_err());
        assert!(clique_to_units(&vs[..3], &k).is_err());
    }
}
