//! Exact geometry of unit-cube tilings on the 1/s grid.
//!
//! A periodic tiling is given by 2^d corners, extended by 2Z^d. Corners are
//! stored as integer numerators over the fixed denominator s, so every
//! predicate is exact. Verification maps each cube to its s^d cubelets on
//! the torus Z_{2s}^d.

use std::fmt;

use crate::error::{Error, Result};
use crate::kellergraph::{check_clique, CliqueCheck, KellerInstance, Vertex};

/// A point of Q^d with a common positive denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corner {
    num: Vec<i64>,
    den: i64,
}

impl Corner {
    pub fn new(num: Vec<i64>, den: i64) -> Result<Self> {
        if den <= 0 {
            return Err(Error::Input(format!("denominator must be positive, got {den}")));
        }
        Ok(Corner { num, den })
    }

    pub fn integer(coords: &[i64]) -> Self {
        Corner {
            num: coords.to_vec(),
            den: 1,
        }
    }

    pub fn dim(&self) -> usize {
        self.num.len()
    }

    pub fn numerators(&self) -> &[i64] {
        &self.num
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    /// Numerators over `s`, if every coordinate lies on the 1/s grid.
    pub fn on_grid(&self, s: i64) -> Option<Vec<i64>> {
        self.num
            .iter()
            .map(|&n| {
                let scaled = n as i128 * s as i128;
                (scaled % self.den as i128 == 0).then(|| (scaled / self.den as i128) as i64)
            })
            .collect()
    }

    /// `|x_i - y_i|` compared with 1: sign of `|x_i - y_i| - 1`.
    fn gap_vs_one(&self, other: &Corner, i: usize) -> std::cmp::Ordering {
        let a = self.num[i] as i128 * other.den as i128;
        let b = other.num[i] as i128 * self.den as i128;
        (a - b).abs().cmp(&(self.den as i128 * other.den as i128))
    }

    fn same_coord(&self, other: &Corner, i: usize) -> bool {
        self.num[i] as i128 * other.den as i128 == other.num[i] as i128 * self.den as i128
    }
}

fn same_dim(x: &Corner, y: &Corner) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    Ok(())
}

/// `[0,1)^d + x` and `[0,1)^d + y` are disjoint iff some coordinate gap is
/// at least 1.
pub fn cubes_disjoint(x: &Corner, y: &Corner) -> Result<bool> {
    same_dim(x, y)?;
    Ok((0..x.dim()).any(|i| x.gap_vs_one(y, i) != std::cmp::Ordering::Less))
}

/// The corners differ by exactly one standard unit vector.
pub fn faceshare(x: &Corner, y: &Corner) -> Result<bool> {
    same_dim(x, y)?;
    let differing: Vec<usize> = (0..x.dim()).filter(|&i| !x.same_coord(y, i)).collect();
    Ok(differing.len() == 1 && x.gap_vs_one(y, differing[0]) == std::cmp::Ordering::Equal)
}

/// Reduce a numerator mod 2s to the representative in (s(x-1), s·x] for the
/// unique x ∈ {0,1} with x ∈ [t, t+1) mod 2.
fn normalize(u: i64, s: i64) -> i64 {
    let r = u.rem_euclid(2 * s);
    if r <= s {
        r
    } else {
        r - 2 * s
    }
}

/// 2^d corners on the 1/s grid, each normalized to the representative that
/// contains a point of {0,1}^d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicTiling {
    d: usize,
    s: i64,
    corners: Vec<Vec<i64>>,
}

impl PeriodicTiling {
    /// `corners` are numerators over `s`; any integer values are accepted and
    /// reduced.
    pub fn new(d: usize, s: usize, corners: Vec<Vec<i64>>) -> Result<Self> {
        if d == 0 || d > 16 {
            return Err(Error::Input(format!("dimension {d} outside 1..=16")));
        }
        if s == 0 {
            return Err(Error::Input("s must be positive".into()));
        }
        if corners.len() != 1 << d {
            return Err(Error::Input(format!(
                "a periodic tiling of dimension {d} needs {} corners, got {}",
                1usize << d,
                corners.len()
            )));
        }
        let s = s as i64;
        let mut out = Vec::with_capacity(corners.len());
        for c in corners {
            if c.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: c.len(),
                });
            }
            out.push(c.iter().map(|&u| normalize(u, s)).collect());
        }
        Ok(PeriodicTiling { d, s, corners: out })
    }

    pub fn from_corners(d: usize, s: usize, corners: &[Corner]) -> Result<Self> {
        let nums = corners
            .iter()
            .map(|c| {
                if c.dim() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: c.dim(),
                    });
                }
                c.on_grid(s as i64)
                    .ok_or_else(|| Error::Input(format!("corner {c:?} is off the 1/{s} grid")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(d, s, nums)
    }

    /// The standard lattice tiling: corners {0,1}^d.
    pub fn lattice(d: usize, s: usize) -> Self {
        let corners = (0..1usize << d)
            .map(|x| (0..d).map(|i| ((x >> i) & 1) as i64 * s as i64).collect())
            .collect();
        Self::new(d, s, corners).expect("lattice is well formed")
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn s(&self) -> usize {
        self.s as usize
    }

    pub fn corners(&self) -> &[Vec<i64>] {
        &self.corners
    }

    pub fn corner(&self, k: usize) -> Corner {
        Corner {
            num: self.corners[k].clone(),
            den: self.s,
        }
    }

    /// The point of {0,1}^d (as a bit mask) contained in cube `k`.
    fn anchor(&self, k: usize) -> usize {
        self.corners[k]
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &u)| acc | (usize::from(u > 0) << i))
    }

    pub fn verify(&self) -> Result<VerifiedTiling> {
        match verify_tiling_inner(self) {
            (TilingVerdict::Tiling, Some(owner)) => {
                let mut by_x = vec![usize::MAX; 1 << self.d];
                for k in 0..self.corners.len() {
                    by_x[self.anchor(k)] = k;
                }
                let t = by_x.iter().map(|&k| self.corners[k].clone()).collect();
                Ok(VerifiedTiling {
                    d: self.d,
                    s: self.s,
                    t,
                    owner,
                    by_x,
                })
            }
            (verdict, _) => Err(Error::Input(format!("not a tiling: {verdict}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TilingVerdict {
    Tiling,
    /// A cubelet (numerators mod 2s) covered by two cubes (corner indices).
    DoubleCovered { cubelet: Vec<i64>, cubes: (usize, usize) },
    Uncovered { cubelet: Vec<i64> },
}

impl TilingVerdict {
    pub fn is_tiling(&self) -> bool {
        matches!(self, TilingVerdict::Tiling)
    }
}

impl fmt::Display for TilingVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TilingVerdict::Tiling => f.write_str("TILING"),
            TilingVerdict::DoubleCovered { cubelet, cubes } => write!(
                f,
                "cubelet {cubelet:?} covered by cubes {} and {}",
                cubes.0, cubes.1
            ),
            TilingVerdict::Uncovered { cubelet } => write!(f, "cubelet {cubelet:?} uncovered"),
        }
    }
}

fn cubelet_coords(mut idx: usize, d: usize, m: i64) -> Vec<i64> {
    let mut out = vec![0; d];
    for c in out.iter_mut() {
        *c = (idx % m as usize) as i64;
        idx /= m as usize;
    }
    out
}

const FREE: u32 = u32::MAX;

fn verify_tiling_inner(t: &PeriodicTiling) -> (TilingVerdict, Option<Vec<u32>>) {
    let d = t.d;
    let m = 2 * t.s;
    let cells = (m as usize).pow(d as u32);
    let mut owner = vec![FREE; cells];
    let per_cube = (t.s as usize).pow(d as u32);
    let mut offset = vec![0i64; d];
    for (k, corner) in t.corners.iter().enumerate() {
        offset.iter_mut().for_each(|o| *o = 0);
        for _ in 0..per_cube {
            let mut idx = 0usize;
            for i in (0..d).rev() {
                idx = idx * m as usize + (corner[i] + offset[i]).rem_euclid(m) as usize;
            }
            if owner[idx] != FREE {
                return (
                    TilingVerdict::DoubleCovered {
                        cubelet: cubelet_coords(idx, d, m),
                        cubes: (owner[idx] as usize, k),
                    },
                    None,
                );
            }
            owner[idx] = k as u32;
            for o in offset.iter_mut() {
                *o += 1;
                if *o < t.s {
                    break;
                }
                *o = 0;
            }
        }
    }
    if let Some(idx) = owner.iter().position(|&o| o == FREE) {
        return (
            TilingVerdict::Uncovered {
                cubelet: cubelet_coords(idx, d, m),
            },
            None,
        );
    }
    (TilingVerdict::Tiling, Some(owner))
}

/// Cover the torus Z_{2s}^d with the cubelets of every cube.
pub fn verify_tiling(t: &PeriodicTiling) -> TilingVerdict {
    verify_tiling_inner(t).0
}

/// A periodic tiling that passed [`verify_tiling`]; corners are indexed by
/// the point x ∈ {0,1}^d they contain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifiedTiling {
    d: usize,
    s: i64,
    t: Vec<Vec<i64>>,
    owner: Vec<u32>,
    by_x: Vec<usize>,
}

impl VerifiedTiling {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn s(&self) -> usize {
        self.s as usize
    }

    /// Numerators of t(x), x given as a bit mask (bit i-1 is x_i).
    pub fn t(&self, x: usize) -> &[i64] {
        &self.t[x]
    }

    /// t(x + e_i) through the periodic extension: t(x') + 2·x_i·e_i with x'
    /// the representative of x + e_i.
    pub fn t_shifted(&self, x: usize, i: usize) -> Vec<i64> {
        let xp = x ^ (1 << i);
        let mut out = self.t[xp].clone();
        if x >> i & 1 == 1 {
            out[i] += 2 * self.s;
        }
        out
    }

    pub fn to_periodic(&self) -> PeriodicTiling {
        PeriodicTiling {
            d: self.d,
            s: self.s,
            corners: self.t.clone(),
        }
    }

    /// Index (into the original corner list) of the cube owning a cubelet.
    pub fn owner(&self, cubelet: &[i64]) -> usize {
        let m = 2 * self.s;
        let mut idx = 0usize;
        for i in (0..self.d).rev() {
            idx = idx * m as usize + cubelet[i].rem_euclid(m) as usize;
        }
        self.owner[idx] as usize
    }

    /// Corner (numerators) of the cube owning a cubelet.
    pub fn owner_corner(&self, cubelet: &[i64]) -> &[i64] {
        let k = self.owner(cubelet);
        let x = self.by_x.iter().position(|&c| c == k).expect("owner indexed");
        &self.t[x]
    }

    /// Check the buddy property t(x)_i + 1 = t(x+e_i)_i for all x and i.
    pub fn check_buddies(&self) -> Result<()> {
        for x in 0..1usize << self.d {
            for i in 0..self.d {
                let next = self.t_shifted(x, i);
                if self.t[x][i] + self.s != next[i] {
                    return Err(Error::Internal(format!(
                        "buddy property fails at x = {x:#b}, i = {}: {} + {} != {}",
                        i + 1,
                        self.t[x][i],
                        self.s,
                        next[i]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Walk the grid line through `cubelet` in direction `i`: the i-th
    /// corner coordinates met are constant mod 1 and consecutive cubes are
    /// exactly 1 apart.
    pub fn check_i_lattice(&self, cubelet: &[i64], i: usize) -> Result<()> {
        let m = 2 * self.s;
        let mut p = cubelet.to_vec();
        let mut starts = Vec::new();
        for step in 0..m {
            p[i] = cubelet[i] + step;
            let corner = self.owner_corner(&p);
            // the cube's i-th coordinate, unwrapped to lie at or below p_i
            let mut c = corner[i];
            while c > p[i] {
                c -= m;
            }
            while c + self.s <= p[i] {
                c += m;
            }
            if starts.last() != Some(&c) {
                starts.push(c);
            }
        }
        let residue = starts[0].rem_euclid(self.s);
        for w in starts.windows(2) {
            if w[1] - w[0] != self.s {
                return Err(Error::Internal(format!(
                    "line through {cubelet:?} in direction {}: consecutive cubes start at {} and {}",
                    i + 1,
                    w[0],
                    w[1]
                )));
            }
        }
        if starts.iter().any(|c| c.rem_euclid(self.s) != residue) {
            return Err(Error::Internal(format!(
                "line through {cubelet:?} in direction {}: residues differ",
                i + 1
            )));
        }
        Ok(())
    }

    /// Distinct values of t(x)_i mod 1, per coordinate.
    pub fn discreteness(&self) -> Vec<usize> {
        (0..self.d)
            .map(|i| {
                let mut residues: Vec<i64> = self.t.iter().map(|c| c[i].rem_euclid(self.s)).collect();
                residues.sort_unstable();
                residues.dedup();
                residues.len()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FaceshareVerdict {
    FaceshareFree,
    /// t(x) and t(x + e_i) share a face.
    Faceshare { x: usize, i: usize },
}

impl FaceshareVerdict {
    pub fn is_free(&self) -> bool {
        matches!(self, FaceshareVerdict::FaceshareFree)
    }
}

/// Scan t(x) against t(x + e_i) for every x and i, asserting the buddy
/// property along the way.
pub fn verify_faceshare_free(t: &VerifiedTiling) -> Result<FaceshareVerdict> {
    t.check_buddies()?;
    for x in 0..1usize << t.d {
        for i in 0..t.d {
            let a = Corner {
                num: t.t[x].clone(),
                den: t.s,
            };
            let b = Corner {
                num: t.t_shifted(x, i),
                den: t.s,
            };
            if faceshare(&a, &b)? {
                return Ok(FaceshareVerdict::Faceshare { x, i });
            }
        }
    }
    Ok(FaceshareVerdict::FaceshareFree)
}

/// Per-coordinate residue counts; each is asserted to be at most 2^{d-1}.
pub fn measure_discreteness(t: &VerifiedTiling) -> Result<Vec<usize>> {
    let counts = t.discreteness();
    let bound = 1usize << (t.d - 1);
    if let Some(i) = counts.iter().position(|&c| c > bound) {
        return Err(Error::Internal(format!(
            "coordinate {} takes {} values mod 1, above {bound}",
            i + 1,
            counts[i]
        )));
    }
    Ok(counts)
}

/// Shift every cube whose i-th coordinate is ≡ a (mod 1) by b·e_i. `i` is
/// 0-based; `a` and `b` are numerators over s. The result is re-verified,
/// and so is faceshare-freeness when the lemma guarantees it.
pub fn replacement(t: &VerifiedTiling, i: usize, a: i64, b: i64) -> Result<VerifiedTiling> {
    if i >= t.d {
        return Err(Error::Input(format!("coordinate {} outside 1..={}", i + 1, t.d)));
    }
    let s = t.s;
    let a = a.rem_euclid(s);
    let corners: Vec<Vec<i64>> = t
        .t
        .iter()
        .map(|c| {
            let mut c = c.clone();
            if c[i].rem_euclid(s) == a {
                c[i] += b;
            }
            c
        })
        .collect();
    let shifted = PeriodicTiling::new(t.d, s as usize, corners)?;
    let out = shifted
        .verify()
        .map_err(|e| Error::Internal(format!("replacement broke the tiling: {e}")))?;
    let target = (a + b).rem_euclid(s);
    let untouched = b.rem_euclid(s) != 0 && t.t.iter().all(|c| c[i].rem_euclid(s) != target);
    if untouched && verify_faceshare_free(t)?.is_free() && !verify_faceshare_free(&out)?.is_free() {
        return Err(Error::Internal(
            "replacement introduced a faceshare where the lemma forbids it".into(),
        ));
    }
    Ok(out)
}

/// Shift the column through x in direction i (the cubes t(x) and
/// t(x + e_i) with all their translates along e_i) by b·e_i. Only valid
/// when no cube of the column meets another line in direction i, as in a
/// lattice or after shifts in the same direction; otherwise the result is
/// rejected.
pub fn shift_column(t: &VerifiedTiling, x: usize, i: usize, b: i64) -> Result<VerifiedTiling> {
    if i >= t.d || x >> t.d != 0 {
        return Err(Error::Input(format!("column ({x:#b}, {}) outside dimension {}", i + 1, t.d)));
    }
    let mut corners = t.t.clone();
    corners[x][i] += b;
    corners[x ^ (1 << i)][i] += b;
    PeriodicTiling::new(t.d, t.s as usize, corners)?
        .verify()
        .map_err(|e| Error::Input(format!("column shift does not give a tiling: {e}")))
}

/// Corners u/s of a 2^d clique, as a verified faceshare-free tiling.
pub fn clique_to_tiling(clique: &[Vertex], inst: &KellerInstance) -> Result<VerifiedTiling> {
    let d = inst.n();
    if clique.len() != inst.block_count() {
        return Err(Error::Input(format!(
            "need {} vertices, got {}",
            inst.block_count(),
            clique.len()
        )));
    }
    if let CliqueCheck::Violation(u, v) = check_clique(clique, inst)? {
        return Err(Error::Input(format!("{u} and {v} are not adjacent")));
    }
    let corners = clique
        .iter()
        .map(|v| v.coords().iter().map(|&c| c as i64).collect())
        .collect();
    let t = PeriodicTiling::new(d, inst.s(), corners)?
        .verify()
        .map_err(|e| Error::Internal(format!("clique corners do not tile: {e}")))?;
    match verify_faceshare_free(&t)? {
        FaceshareVerdict::FaceshareFree => Ok(t),
        FaceshareVerdict::Faceshare { x, i } => Err(Error::Internal(format!(
            "clique tiling has a faceshare at x = {x:#b}, direction {}",
            i + 1
        ))),
    }
}

/// u(x) = s·t(x) mod 2s for every x ∈ {0,1}^d.
pub fn tiling_to_clique(t: &VerifiedTiling) -> Vec<Vertex> {
    let m = 2 * t.s;
    t.t
        .iter()
        .map(|c| Vertex::new(c.iter().map(|&u| u.rem_euclid(m) as u32).collect()))
        .collect()
}

/// `tiling <d> <s>` then 2^d lines of d numerators.
pub fn write_tiling_file(t: &PeriodicTiling) -> String {
    let mut out = format!("tiling {} {}\n", t.d, t.s);
    for c in &t.corners {
        let parts: Vec<String> = c.iter().map(i64::to_string).collect();
        out.push_str(&parts.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_tiling_file(text: &str) -> Result<PeriodicTiling> {
    let mut header: Option<(usize, usize)> = None;
    let mut corners = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if header.is_none() {
            match fields.as_slice() {
                ["tiling", d, s] => {
                    let d = d.parse().map_err(|_| Error::parse(idx + 1, "bad dimension"))?;
                    let s = s.parse().map_err(|_| Error::parse(idx + 1, "bad denominator"))?;
                    header = Some((d, s));
                    continue;
                }
                _ => return Err(Error::parse(idx + 1, "expected `tiling <d> <s>`")),
            }
        }
        let c = fields
            .iter()
            .map(|f| f.parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::parse(idx + 1, e.to_string()))?;
        corners.push(c);
    }
    let (d, s) = header.ok_or_else(|| Error::parse(0, "missing `tiling` header"))?;
    PeriodicTiling::new(d, s, corners)
}

/// Text picture of a 2-dimensional tiling: one character per cubelet, row
/// y = 2s-1 on top.
pub fn render_2d(t: &VerifiedTiling) -> Result<String> {
    if t.d != 2 {
        return Err(Error::Input("only 2-dimensional tilings can be drawn".into()));
    }
    let m = 2 * t.s;
    let mut out = String::new();
    for y in (0..m).rev() {
        for x in 0..m {
            let k = t.owner(&[x, y]);
            out.push((b'A' + (k % 26) as u8) as char);
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(num: &[i64], den: i64) -> Corner {
        Corner::new(num.to_vec(), den).unwrap()
    }

    #[test]
    fn disjointness_and_faceshare() {
        assert!(!cubes_disjoint(&q(&[0, 0], 1), &q(&[1, 1], 2)).unwrap());
        assert!(cubes_disjoint(&q(&[0, 0], 1), &q(&[2, 1], 2)).unwrap());
        assert!(!cubes_disjoint(&q(&[0, 0], 1), &q(&[0, 0], 1)).unwrap());
        assert!(cubes_disjoint(&q(&[0], 1), &q(&[0, 1], 1)).is_err());

        assert!(faceshare(&q(&[0, 0], 1), &q(&[1, 0], 1)).unwrap());
        assert!(!faceshare(&q(&[0, 0], 1), &q(&[1, 1], 1)).unwrap());
        assert!(!faceshare(&q(&[0, 0], 1), &q(&[2, 0], 1)).unwrap());
        assert!(faceshare(&q(&[1, 4], 3), &q(&[-2, 4], 3)).unwrap());
    }

    #[test]
    fn lattice_tiles_but_faceshares() {
        let t = PeriodicTiling::lattice(3, 2);
        assert!(verify_tiling(&t).is_tiling());
        let v = t.verify().unwrap();
        assert!(!verify_faceshare_free(&v).unwrap().is_free());
        assert_eq!(measure_discreteness(&v).unwrap(), vec![1, 1, 1]);
        let clique = tiling_to_clique(&v);
        let inst = KellerInstance::new(3, 2).unwrap();
        assert!(!crate::kellergraph::is_clique(&clique, &inst).unwrap());
        assert!(clique.iter().all(|u| u.coords().iter().all(|&c| c == 0 || c == 2)));
        assert_eq!(tiling_to_clique(&v)[0], Vertex::zero(3));
    }

    #[test]
    fn duplicated_corner_is_reported() {
        let mut corners = PeriodicTiling::lattice(2, 2).corners().to_vec();
        corners[3] = corners[0].clone();
        let t = PeriodicTiling::new(2, 2, corners).unwrap();
        assert!(matches!(verify_tiling(&t), TilingVerdict::DoubleCovered { .. }));
        assert!(t.verify().is_err());
    }

    #[test]
    fn off_grid_corner_is_rejected() {
        let corners: Vec<Corner> = (0..4).map(|_| q(&[1, 0], 3)).collect();
        assert!(PeriodicTiling::from_corners(2, 2, &corners).is_err());
    }

    #[test]
    fn replacement_shifts_a_column() {
        let v = PeriodicTiling::lattice(2, 2).verify().unwrap();
        let same = replacement(&v, 0, 0, 1).unwrap();
        assert_eq!(measure_discreteness(&same).unwrap(), vec![1, 1]);
        let r = shift_column(&v, 0, 1, 1).unwrap();
        assert_eq!(measure_discreteness(&r).unwrap(), vec![1, 2]);
        let back = replacement(&r, 1, 1, 1).unwrap();
        assert_eq!(measure_discreteness(&back).unwrap(), vec![1, 1]);
        let picture = render_2d(&r).unwrap();
        assert_eq!(picture.lines().count(), 4);
    }

    /// Pairwise disjointness over periodic translates, from the rational
    /// predicate alone.
    fn pairwise_oracle(t: &PeriodicTiling) -> bool {
        let d = t.dim();
        let s = t.s() as i64;
        let n = t.corners().len();
        for a in 0..n {
            for b in a + 1..n {
                let mut shifts = vec![vec![]];
                for _ in 0..d {
                    shifts = shifts
                        .into_iter()
                        .flat_map(|p: Vec<i64>| {
                            [-1i64, 0, 1].into_iter().map(move |k| {
                                let mut p = p.clone();
                                p.push(k);
                                p
                            })
                        })
                        .collect();
                }
                for k in shifts {
                    let y: Vec<i64> = t.corners()[b].iter().zip(&k).map(|(u, k)| u + 2 * s * k).collect();
                    if !cubes_disjoint(&t.corner(a), &Corner::new(y, s).unwrap()).unwrap() {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn torus_cover_agrees_with_pairwise_disjointness() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..300 {
            let d = rng.gen_range(1..=3);
            let s = rng.gen_range(1..=3i64);
            let corners: Vec<Vec<i64>> = if rng.gen_bool(0.5) {
                // perturb a valid tiling
                let mut v = PeriodicTiling::lattice(d, s as usize).verify().unwrap();
                let dir = rng.gen_range(0..d);
                for _ in 0..3 {
                    let x = rng.gen_range(0..1usize << d);
                    v = shift_column(&v, x, dir, rng.gen_range(0..2 * s)).unwrap();
                }
                for _ in 0..3 {
                    let i = rng.gen_range(0..d);
                    v = replacement(&v, i, rng.gen_range(0..s), rng.gen_range(0..2 * s)).unwrap();
                }
                let mut c = v.to_periodic().corners().to_vec();
                if rng.gen_bool(0.5) {
                    let k = rng.gen_range(0..c.len());
                    let i = rng.gen_range(0..d);
                    c[k][i] += rng.gen_range(1..2 * s);
                }
                c
            } else {
                (0..1 << d)
                    .map(|_| (0..d).map(|_| rng.gen_range(0..2 * s)).collect())
                    .collect()
            };
            let t = PeriodicTiling::new(d, s as usize, corners).unwrap();
            assert_eq!(verify_tiling(&t).is_tiling(), pairwise_oracle(&t), "{t:?}");
            if let Ok(v) = t.verify() {
                v.check_buddies().unwrap();
                measure_discreteness(&v).unwrap();
                for _ in 0..4 {
                    let p: Vec<i64> = (0..d).map(|_| rng.gen_range(0..2 * s)).collect();
                    v.check_i_lattice(&p, rng.gen_range(0..d)).unwrap();
                }
            }
        }
    }

    #[test]
    fn file_round_trip() {
        let v = PeriodicTiling::lattice(2, 3).verify().unwrap();
        let r = replacement(&v, 1, 0, 2).unwrap().to_periodic();
        let text = write_tiling_file(&r);
        assert!(text.starts_with("tiling 2 3\n"));
        assert_eq!(parse_tiling_file(&text).unwrap(), r);
        assert!(parse_tiling_file("0 0\n").is_err());
    }

    #[test]
    fn non_clique_is_rejected() {
        let inst = KellerInstance::new(2, 2).unwrap();
        let k = vec![
            Vertex::new(vec![0, 0]),
            Vertex::new(vec![2, 0]),
            Vertex::new(vec![0, 2]),
            Vertex::new(vec![2, 2]),
        ];
        assert!(matches!(clique_to_tiling(&k, &inst), Err(Error::Input(_))));
    }
}
