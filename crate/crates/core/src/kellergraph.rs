//! Keller graphs `G_{n,s}`.
//!
//! Vertices are the points of `{0, .., 2s-1}^n`. Two vertices are adjacent
//! when they differ by exactly `s` in some coordinate and differ in at least
//! two coordinates. The graph is never materialized unless a caller asks for
//! an explicit form, and then only below [`DEFAULT_MATERIALIZE_BOUND`].
//!
//! The sets `s·w + {0, .., s-1}^n` for `w ∈ {0,1}^n` partition the vertices
//! into `2^n` independent sets ("blocks"). Block `i` has bit vector `w(i)`
//! with `w_k` equal to bit `k-1` of `i`.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Explicit graphs are refused above this many vertices.
pub const DEFAULT_MATERIALIZE_BOUND: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KellerInstance {
    n: usize,
    s: usize,
}

impl KellerInstance {
    pub fn new(n: usize, s: usize) -> Result<Self> {
        if n == 0 || s == 0 {
            return Err(Error::InvalidInstance(format!(
                "n and s must be positive (got n={n}, s={s})"
            )));
        }
        if n > 30 {
            return Err(Error::InvalidInstance(format!("n={n} is too large")));
        }
        Ok(KellerInstance { n, s })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Number of blocks, `2^n`. Also the largest possible clique size.
    pub fn block_count(&self) -> usize {
        1 << self.n
    }

    /// Size of the vertex universe, `(2s)^n`, saturating at `u128::MAX`.
    pub fn vertex_count(&self) -> u128 {
        let side = 2 * self.s as u128;
        (0..self.n).fold(1u128, |acc, _| acc.saturating_mul(side))
    }

    pub fn check_vertex(&self, v: &Vertex) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        let side = 2 * self.s as u32;
        if let Some(c) = v.coords().iter().find(|&&c| c >= side) {
            return Err(Error::Input(format!(
                "coordinate {c} of {v} is outside 0..{side}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for KellerInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G_{{{},{}}}", self.n, self.s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex(Vec<u32>);

impl Vertex {
    pub fn new(coords: Vec<u32>) -> Self {
        Vertex(coords)
    }

    pub fn zero(n: usize) -> Self {
        Vertex(vec![0; n])
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_coords(self) -> Vec<u32> {
        self.0
    }
}

impl From<Vec<u32>> for Vertex {
    fn from(coords: Vec<u32>) -> Self {
        Vertex(coords)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (idx, c) in self.0.iter().enumerate() {
            if idx > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Index `i` of a block together with its bit vector `w(i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockIndex {
    index: usize,
    bits: Vec<bool>,
}

impl BlockIndex {
    pub fn from_index(index: usize, n: usize) -> Self {
        let bits = (0..n).map(|k| (index >> k) & 1 == 1).collect();
        BlockIndex { index, bits }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        let index = bits
            .iter()
            .enumerate()
            .map(|(k, &b)| (b as usize) << k)
            .sum();
        BlockIndex { index, bits }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// `w_j` for a 1-based coordinate `j`.
    pub fn w(&self, j: usize) -> bool {
        self.bits[j - 1]
    }
}

/// Adjacency on raw coordinate slices; callers guarantee equal lengths.
#[inline]
pub fn adjacent_coords(u: &[u32], v: &[u32], s: u32) -> bool {
    let mut differ = 0usize;
    let mut opposite = false;
    for (&a, &b) in u.iter().zip(v) {
        if a != b {
            differ += 1;
            if a.abs_diff(b) == s {
                opposite = true;
            }
        }
    }
    opposite && differ >= 2
}

pub fn adjacent(u: &Vertex, v: &Vertex, inst: &KellerInstance) -> Result<bool> {
    inst.check_vertex(u)?;
    inst.check_vertex(v)?;
    Ok(adjacent_coords(u.coords(), v.coords(), inst.s as u32))
}

pub fn block_of(v: &Vertex, inst: &KellerInstance) -> Result<BlockIndex> {
    inst.check_vertex(v)?;
    let s = inst.s as u32;
    Ok(BlockIndex::from_bits(
        v.coords().iter().map(|&c| c >= s).collect(),
    ))
}

/// A map `x ↦ (τ_1(x_{σ(1)}), .., τ_n(x_{σ(n)}))` with `σ ∈ S_n` and every
/// `τ_j ∈ H_s`. Membership in `H_s` is checked on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    sigma: Vec<usize>,
    taus: Vec<Vec<u32>>,
}

impl Automorphism {
    /// `sigma` is 0-based: output coordinate `j` reads input coordinate
    /// `sigma[j]`. `taus[j]` is a table over `0..2s`.
    pub fn new(sigma: Vec<usize>, taus: Vec<Vec<u32>>, inst: &KellerInstance) -> Result<Self> {
        let n = inst.n;
        let s = inst.s as u32;
        if sigma.len() != n || taus.len() != n {
            return Err(Error::InvalidAutomorphism(format!(
                "expected {n} coordinates, got sigma of length {} and {} taus",
                sigma.len(),
                taus.len()
            )));
        }
        if !is_permutation(&sigma, n) {
            return Err(Error::InvalidAutomorphism(format!(
                "sigma {sigma:?} is not a permutation of 0..{n}"
            )));
        }
        for (j, tau) in taus.iter().enumerate() {
            let as_usize: Vec<usize> = tau.iter().map(|&t| t as usize).collect();
            if tau.len() != 2 * s as usize || !is_permutation(&as_usize, 2 * s as usize) {
                return Err(Error::InvalidAutomorphism(format!(
                    "tau {j} is not a permutation of 0..{}",
                    2 * s
                )));
            }
            for v in 0..s {
                if tau[(v + s) as usize] != (tau[v as usize] + s) % (2 * s) {
                    return Err(Error::InvalidAutomorphism(format!(
                        "tau {j} is not in H_s: tau({}) = {} but tau({v}) = {}",
                        v + s,
                        tau[(v + s) as usize],
                        tau[v as usize]
                    )));
                }
            }
        }
        Ok(Automorphism { sigma, taus })
    }

    pub fn identity(inst: &KellerInstance) -> Self {
        let side = 2 * inst.s as u32;
        Automorphism {
            sigma: (0..inst.n).collect(),
            taus: vec![(0..side).collect(); inst.n],
        }
    }

    /// Swap two 0-based coordinates, leaving values alone.
    pub fn coordinate_swap(a: usize, b: usize, inst: &KellerInstance) -> Result<Self> {
        let mut sigma: Vec<usize> = (0..inst.n).collect();
        if a >= inst.n || b >= inst.n {
            return Err(Error::InvalidAutomorphism(format!(
                "coordinates {a},{b} out of range for n={}",
                inst.n
            )));
        }
        sigma.swap(a, b);
        let side = 2 * inst.s as u32;
        Ok(Automorphism {
            sigma,
            taus: vec![(0..side).collect(); inst.n],
        })
    }

    /// Uniformly random `σ`, with each `τ_j` a random permutation of
    /// `{0..s}` and an independent random half swap for every value.
    pub fn random<R: Rng + ?Sized>(inst: &KellerInstance, rng: &mut R) -> Self {
        let n = inst.n;
        let s = inst.s as u32;
        let mut sigma: Vec<usize> = (0..n).collect();
        sigma.shuffle(rng);
        let taus = (0..n)
            .map(|_| {
                let mut pi: Vec<u32> = (0..s).collect();
                pi.shuffle(rng);
                let mut tau = vec![0u32; 2 * s as usize];
                for v in 0..s {
                    let flip = rng.gen_bool(0.5);
                    let base = pi[v as usize];
                    tau[v as usize] = if flip { base + s } else { base };
                    tau[(v + s) as usize] = if flip { base } else { base + s };
                }
                tau
            })
            .collect();
        Automorphism { sigma, taus }
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn taus(&self) -> &[Vec<u32>] {
        &self.taus
    }

    pub fn apply(&self, v: &Vertex) -> Result<Vertex> {
        if v.len() != self.sigma.len() {
            return Err(Error::DimensionMismatch {
                expected: self.sigma.len(),
                got: v.len(),
            });
        }
        let side = self.taus[0].len() as u32;
        if let Some(c) = v.coords().iter().find(|&&c| c >= side) {
            return Err(Error::Input(format!("coordinate {c} outside 0..{side}")));
        }
        Ok(Vertex(
            self.sigma
                .iter()
                .zip(&self.taus)
                .map(|(&src, tau)| tau[v.coords()[src] as usize])
                .collect(),
        ))
    }
}

pub fn apply_automorphism(a: &Automorphism, v: &Vertex) -> Result<Vertex> {
    a.apply(v)
}

fn is_permutation(p: &[usize], n: usize) -> bool {
    if p.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &x in p {
        if x >= n || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// First pair of positions in `vs` that are not adjacent, if any.
pub fn find_non_adjacent_pair(vs: &[Vertex], inst: &KellerInstance) -> Result<Option<(usize, usize)>> {
    for v in vs {
        inst.check_vertex(v)?;
    }
    let s = inst.s as u32;
    for a in 0..vs.len() {
        for b in a + 1..vs.len() {
            if !adjacent_coords(vs[a].coords(), vs[b].coords(), s) {
                return Ok(Some((a, b)));
            }
        }
    }
    Ok(None)
}

/// Result of a clique test: either every pair is adjacent or the first
/// violating pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliqueCheck {
    Clique,
    Violation(Vertex, Vertex),
}

impl CliqueCheck {
    pub fn is_clique(&self) -> bool {
        matches!(self, CliqueCheck::Clique)
    }
}

pub fn check_clique(vs: &[Vertex], inst: &KellerInstance) -> Result<CliqueCheck> {
    Ok(match find_non_adjacent_pair(vs, inst)? {
        None => CliqueCheck::Clique,
        Some((a, b)) => CliqueCheck::Violation(vs[a].clone(), vs[b].clone()),
    })
}

pub fn is_clique(vs: &[Vertex], inst: &KellerInstance) -> Result<bool> {
    Ok(check_clique(vs, inst)?.is_clique())
}

/// Fixed-width bit set used by the explicit graph.
#[derive(Debug, Clone, PartialEq, Eq)]
struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn new(len: usize) -> Self {
        BitSet {
            words: vec![0; len.div_ceil(64)],
        }
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(idx, &w)| idx * 64 + w.trailing_zeros() as usize)
    }

    fn intersect(&self, other: &BitSet) -> BitSet {
        BitSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    fn subtract_assign(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }
}

/// Explicit adjacency representation for small instances.
pub struct ExplicitGraph {
    inst: KellerInstance,
    vertices: Vec<Vertex>,
    adjacency: Vec<BitSet>,
}

impl ExplicitGraph {
    pub fn build(inst: &KellerInstance) -> Result<Self> {
        Self::build_with_bound(inst, DEFAULT_MATERIALIZE_BOUND)
    }

    pub fn build_with_bound(inst: &KellerInstance, bound: u64) -> Result<Self> {
        let count = inst.vertex_count();
        if count > bound as u128 {
            return Err(Error::TooLarge {
                vertices: count,
                bound,
            });
        }
        let count = count as usize;
        let side = 2 * inst.s as u32;
        let vertices: Vec<Vertex> = (0..count)
            .map(|mut idx| {
                let mut coords = vec![0u32; inst.n];
                for c in coords.iter_mut() {
                    *c = (idx % side as usize) as u32;
                    idx /= side as usize;
                }
                Vertex(coords)
            })
            .collect();
        let s = inst.s as u32;
        let mut adjacency = vec![BitSet::new(count); count];
        for a in 0..count {
            for b in a + 1..count {
                if adjacent_coords(vertices[a].coords(), vertices[b].coords(), s) {
                    adjacency[a].insert(b);
                    adjacency[b].insert(a);
                }
            }
        }
        Ok(ExplicitGraph {
            inst: *inst,
            vertices,
            adjacency,
        })
    }

    pub fn instance(&self) -> &KellerInstance {
        &self.inst
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].words[b / 64] >> (b % 64) & 1 == 1
    }

    /// A maximum clique found by branch and bound, stopping early once one
    /// of size `cap` is found.
    pub fn max_clique(&self, cap: usize) -> Vec<Vertex> {
        let mut all = BitSet::new(self.vertices.len());
        for v in 0..self.vertices.len() {
            all.insert(v);
        }
        let mut search = CliqueSearch {
            graph: self,
            best: Vec::new(),
            cap,
        };
        let mut current = Vec::new();
        search.expand(&mut current, all);
        search
            .best
            .iter()
            .map(|&v| self.vertices[v].clone())
            .collect()
    }
}

struct CliqueSearch<'a> {
    graph: &'a ExplicitGraph,
    best: Vec<usize>,
    cap: usize,
}

impl CliqueSearch<'_> {
    fn expand(&mut self, current: &mut Vec<usize>, mut candidates: BitSet) {
        let colored = self.greedy_coloring(&candidates);
        for &(v, color) in colored.iter().rev() {
            if self.best.len() >= self.cap || current.len() + color <= self.best.len() {
                return;
            }
            current.push(v);
            let next = candidates.intersect(&self.graph.adjacency[v]);
            if next.is_empty() {
                if current.len() > self.best.len() {
                    self.best = current.clone();
                }
            } else {
                self.expand(current, next);
            }
            current.pop();
            candidates.remove(v);
        }
    }

    /// Vertices with color classes in nondecreasing order; the color of a
    /// vertex bounds the clique size reachable through it.
    fn greedy_coloring(&self, candidates: &BitSet) -> Vec<(usize, usize)> {
        let mut uncolored = candidates.clone();
        let mut out = Vec::new();
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut pool = uncolored.clone();
            while let Some(v) = pool.first() {
                pool.remove(v);
                pool.subtract_assign(&self.graph.adjacency[v]);
                uncolored.remove(v);
                out.push((v, color));
            }
        }
        out
    }
}

/// Exact maximum clique size (capped at `cap`) for instances with at most
/// [`DEFAULT_MATERIALIZE_BOUND`] vertices.
pub fn max_clique_bruteforce(inst: &KellerInstance, cap: usize) -> Result<usize> {
    Ok(ExplicitGraph::build(inst)?.max_clique(cap).len())
}

/// Parse the clique file format: a `keller <n> <s>` header followed by one
/// vertex per line. Lines starting with `#` are comments.
pub fn parse_clique_file(text: &str) -> Result<(KellerInstance, Vec<Vertex>)> {
    let mut inst = None;
    let mut vertices = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match inst {
            None => {
                let fields: Vec<&str> = line.split_whitespace().collect();
                if fields.len() != 3 || fields[0] != "keller" {
                    return Err(Error::parse(lineno, "expected header `keller <n> <s>`"));
                }
                let n = fields[1]
                    .parse()
                    .map_err(|_| Error::parse(lineno, "bad n in header"))?;
                let s = fields[2]
                    .parse()
                    .map_err(|_| Error::parse(lineno, "bad s in header"))?;
                inst = Some(KellerInstance::new(n, s)?);
            }
            Some(ref k) => {
                let coords = line
                    .split_whitespace()
                    .map(|f| f.parse::<u32>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::parse(lineno, format!("bad coordinate: {e}")))?;
                let v = Vertex(coords);
                k.check_vertex(&v)
                    .map_err(|e| Error::parse(lineno, e.to_string()))?;
                vertices.push(v);
            }
        }
    }
    let inst = inst.ok_or_else(|| Error::parse(0, "missing `keller <n> <s>` header"))?;
    Ok((inst, vertices))
}

pub fn write_clique_file(inst: &KellerInstance, vertices: &[Vertex]) -> String {
    let mut out = format!("keller {} {}\n", inst.n, inst.s);
    for v in vertices {
        let line: Vec<String> = v.coords().iter().map(|c| c.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn inst(n: usize, s: usize) -> KellerInstance {
        KellerInstance::new(n, s).unwrap()
    }

    fn all_vertices(k: &KellerInstance) -> Vec<Vertex> {
        ExplicitGraph::build(k).unwrap().vertices().to_vec()
    }

    #[test]
    fn sample_edges_of_g22() {
        let k = inst(2, 2);
        let v = |a, b| Vertex::new(vec![a, b]);
        assert!(adjacent(&v(0, 0), &v(2, 3), &k).unwrap());
        assert!(!adjacent(&v(0, 0), &v(0, 2), &k).unwrap());
        assert!(!adjacent(&v(1, 3), &v(1, 3), &k).unwrap());
    }

    #[test]
    fn adjacency_rejects_dimension_mismatch() {
        let k = inst(2, 2);
        let err = adjacent(&Vertex::new(vec![0, 0]), &Vertex::new(vec![0, 0, 0]), &k);
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
        assert!(adjacent(&Vertex::new(vec![0, 4]), &Vertex::new(vec![0, 0]), &k).is_err());
    }

    #[test]
    fn block_indices() {
        let k = inst(7, 3);
        assert_eq!(block_of(&Vertex::zero(7), &k).unwrap().index(), 0);
        let b3 = BlockIndex::from_index(3, 7);
        assert_eq!(b3.bits(), &[true, true, false, false, false, false, false]);
        let b67 = BlockIndex::from_index(67, 7);
        assert_eq!(b67.bits(), &[true, true, false, false, false, false, true]);
        // c_67 carries s+1 in coordinates 1, 2 and 7
        let c67 = Vertex::new(vec![3, 4, 0, 0, 0, 1, 4]);
        assert_eq!(block_of(&c67, &k).unwrap().index(), 67);
        assert!(b67.w(7) && !b67.w(6));
    }

    #[test]
    fn partition_and_symmetry_exhaustive() {
        for n in 1..=3 {
            for s in 1..=3 {
                let k = inst(n, s);
                let vs = all_vertices(&k);
                for u in &vs {
                    let bu = block_of(u, &k).unwrap();
                    for (j, &c) in u.coords().iter().enumerate() {
                        let base = if bu.bits()[j] { s as u32 } else { 0 };
                        assert!(c >= base && c < base + s as u32);
                    }
                    assert!(!adjacent(u, u, &k).unwrap());
                    for v in &vs {
                        let uv = adjacent(u, v, &k).unwrap();
                        assert_eq!(uv, adjacent(v, u, &k).unwrap());
                        if bu == block_of(v, &k).unwrap() {
                            assert!(!uv, "{u} and {v} share a block");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn swap_first_two_coordinates() {
        let k = inst(7, 3);
        let a = Automorphism::coordinate_swap(0, 1, &k).unwrap();
        let v = Vertex::new(vec![3, 1, 0, 0, 0, 0, 0]);
        assert_eq!(a.apply(&v).unwrap().coords(), &[1, 3, 0, 0, 0, 0, 0]);
        assert_eq!(Automorphism::identity(&k).apply(&v).unwrap(), v);
    }

    #[test]
    fn rejects_tau_outside_hs() {
        let k = inst(2, 2);
        // 0->1 but 2->2 breaks tau(v+s) = tau(v)+s
        let bad = vec![vec![1, 0, 2, 3], vec![0, 1, 2, 3]];
        assert!(matches!(
            Automorphism::new(vec![0, 1], bad, &k),
            Err(Error::InvalidAutomorphism(_))
        ));
        let not_perm = vec![vec![0, 0, 2, 2], vec![0, 1, 2, 3]];
        assert!(Automorphism::new(vec![0, 1], not_perm, &k).is_err());
        assert!(Automorphism::new(vec![0, 0], vec![vec![0, 1, 2, 3]; 2], &k).is_err());
        // half swap composed with a value permutation
        let good = vec![vec![3, 0, 1, 2], vec![0, 1, 2, 3]];
        assert!(Automorphism::new(vec![1, 0], good, &k).is_ok());
    }

    #[test]
    fn automorphisms_preserve_adjacency() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut trials = 0;
        for n in 2..=4 {
            for s in 1..=3 {
                let k = inst(n, s);
                let side = 2 * s as u32;
                for _ in 0..1000 {
                    let a = Automorphism::random(&k, &mut rng);
                    Automorphism::new(a.sigma().to_vec(), a.taus().to_vec(), &k).unwrap();
                    let u = Vertex::new((0..n).map(|_| rng.gen_range(0..side)).collect());
                    let v = Vertex::new((0..n).map(|_| rng.gen_range(0..side)).collect());
                    assert_eq!(
                        adjacent(&u, &v, &k).unwrap(),
                        adjacent(&a.apply(&u).unwrap(), &a.apply(&v).unwrap(), &k).unwrap()
                    );
                    trials += 1;
                }
            }
        }
        assert!(trials >= 9_000);
    }

    #[test]
    fn clique_checks() {
        let k = inst(2, 2);
        assert!(is_clique(&[], &k).unwrap());
        let pair = [Vertex::new(vec![0, 0]), Vertex::new(vec![2, 3])];
        assert!(is_clique(&pair, &k).unwrap());
        let same_block = [Vertex::new(vec![0, 0]), Vertex::new(vec![1, 1])];
        assert_eq!(
            check_clique(&same_block, &k).unwrap(),
            CliqueCheck::Violation(same_block[0].clone(), same_block[1].clone())
        );
    }

    #[test]
    fn automorphic_images_of_cliques_are_cliques() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let k = inst(3, 2);
        let g = ExplicitGraph::build(&k).unwrap();
        let clique = g.max_clique(usize::MAX);
        assert!(is_clique(&clique, &k).unwrap());
        for _ in 0..200 {
            let a = Automorphism::random(&k, &mut rng);
            let image: Vec<Vertex> = clique.iter().map(|v| a.apply(v).unwrap()).collect();
            assert!(is_clique(&image, &k).unwrap());
            let mut dedup = image.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), clique.len());
        }
    }

    #[test]
    fn small_max_cliques_stay_below_two_to_the_n() {
        assert_eq!(max_clique_bruteforce(&inst(1, 3), usize::MAX).unwrap(), 1);
        assert!(max_clique_bruteforce(&inst(2, 2), usize::MAX).unwrap() < 4);
        for n in 1..=3 {
            for s in 1..=3 {
                let size = max_clique_bruteforce(&inst(n, s), usize::MAX).unwrap();
                assert!(size < 1 << n, "G_{n},{s} has clique of size {size}");
            }
        }
    }

    #[test]
    fn branch_and_bound_matches_exhaustive_search() {
        // exhaustive subset enumeration on G_{2,2} (16 vertices)
        let k = inst(2, 2);
        let g = ExplicitGraph::build(&k).unwrap();
        let count = g.vertices().len();
        let mut best = 0;
        for mask in 0u32..(1 << count) {
            let members: Vec<usize> = (0..count).filter(|&v| mask >> v & 1 == 1).collect();
            let ok = members
                .iter()
                .enumerate()
                .all(|(p, &a)| members[p + 1..].iter().all(|&b| g.is_edge(a, b)));
            if ok {
                best = best.max(members.len());
            }
        }
        assert_eq!(g.max_clique(usize::MAX).len(), best);
    }

    #[test]
    fn refuses_large_instances() {
        assert!(matches!(
            max_clique_bruteforce(&inst(7, 3), 128),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn clique_file_round_trip() {
        let k = inst(2, 2);
        let vs = vec![Vertex::new(vec![0, 0]), Vertex::new(vec![2, 3])];
        let text = format!("# comment\n{}", write_clique_file(&k, &vs));
        let (k2, vs2) = parse_clique_file(&text).unwrap();
        assert_eq!(k2, k);
        assert_eq!(vs2, vs);
        assert!(parse_clique_file("keller 2 2\n0 4\n").is_err());
        assert!(parse_clique_file("0 0\n").is_err());
    }
}
