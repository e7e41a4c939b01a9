//! Vietoris–Rips persistence in dimensions 0 and 1 over Z/2.
//!
//! H0 comes from a union–find pass over the edges in filtration order. H1 is
//! computed by reducing the coboundary matrix of the edges (persistent
//! cohomology), with two standard accelerations:
//!
//! * clearing: edges that kill an H0 class have zero columns and are skipped;
//! * emergent pairs: a fresh coboundary whose lowest triangle is not yet a
//!   pivot is already reduced, so no heap is built for it.
//!
//! Simplices are totally ordered by filtration value, then dimension, then
//! lexicographic vertex tuple. Pairs with zero persistence are not reported.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphdist::DistanceMatrix;

pub const DEFAULT_MAX_VERTICES: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistencePair {
    pub dimension: usize,
    pub birth: f64,
    /// `f64::INFINITY` for essential classes.
    pub death: f64,
}

impl PersistencePair {
    pub fn new(dimension: usize, birth: f64, death: f64) -> Self {
        PersistencePair { dimension, birth, death }
    }

    pub fn lifetime(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_finite(&self) -> bool {
        self.death.is_finite()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub pairs: Vec<PersistencePair>,
}

impl PersistenceDiagram {
    pub fn new(mut pairs: Vec<PersistencePair>) -> Self {
        sort_pairs(&mut pairs);
        PersistenceDiagram { pairs }
    }

    /// Diagram restricted to one homology dimension.
    pub fn dimension(&self, dim: usize) -> PersistenceDiagram {
        PersistenceDiagram {
            pairs: self.pairs.iter().filter(|p| p.dimension == dim).copied().collect(),
        }
    }

    /// Diagram without essential classes.
    pub fn finite(&self) -> PersistenceDiagram {
        PersistenceDiagram {
            pairs: self.pairs.iter().filter(|p| p.is_finite()).copied().collect(),
        }
    }

    /// Finite pairs of `dim`, the form compared by the bottleneck distance.
    pub fn finite_in(&self, dim: usize) -> PersistenceDiagram {
        PersistenceDiagram {
            pairs: self
                .pairs
                .iter()
                .filter(|p| p.dimension == dim && p.is_finite())
                .copied()
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn total_persistence(&self) -> f64 {
        self.pairs.iter().filter(|p| p.is_finite()).map(PersistencePair::lifetime).sum()
    }

    /// Finite pairs of `dim` whose lifetime exceeds `fraction` of the largest
    /// finite lifetime in that dimension.
    pub fn significant_count(&self, dim: usize, fraction: f64) -> usize {
        let max = max_lifetime(self, dim);
        if max <= 0.0 {
            return 0;
        }
        self.pairs
            .iter()
            .filter(|p| p.dimension == dim && p.is_finite() && p.lifetime() > fraction * max)
            .count()
    }

    /// Multiset of `(birth, death)` for `dim`, sorted.
    pub fn points(&self, dim: usize) -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> = self
            .pairs
            .iter()
            .filter(|p| p.dimension == dim)
            .map(|p| (p.birth, p.death))
            .collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        v
    }
}

fn sort_pairs(pairs: &mut [PersistencePair]) {
    pairs.sort_by(|a, b| {
        a.dimension
            .cmp(&b.dimension)
            .then(a.birth.total_cmp(&b.birth))
            .then(a.death.total_cmp(&b.death))
    });
}

/// Largest finite lifetime in `dim`, 0 when there is none.
pub fn max_lifetime(diag: &PersistenceDiagram, dim: usize) -> f64 {
    diag.pairs
        .iter()
        .filter(|p| p.dimension == dim && p.is_finite())
        .map(PersistencePair::lifetime)
        .fold(0.0, f64::max)
}

/// Number of finite pairs in `dim`.
pub fn count_pairs(diag: &PersistenceDiagram, dim: usize) -> usize {
    diag.pairs.iter().filter(|p| p.dimension == dim && p.is_finite()).count()
}

pub fn rips_persistence(d: &DistanceMatrix, max_dim: usize) -> Result<PersistenceDiagram> {
    rips_persistence_capped(d, max_dim, DEFAULT_MAX_VERTICES)
}

pub fn rips_persistence_capped(d: &DistanceMatrix, max_dim: usize, max_vertices: usize) -> Result<PersistenceDiagram> {
    if max_dim > 1 {
        return Err(Error::Parameter(format!(
            "homology above dimension 1 is not supported (asked for {max_dim})"
        )));
    }
    d.validate()?;
    let n = d.size();
    // Vertex indices are packed into VBITS-bit fields of the simplex keys.
    let cap = max_vertices.min(1 << VBITS);
    if n > cap {
        return Err(Error::Size { n, cap });
    }
    if n == 0 {
        return Ok(PersistenceDiagram::default());
    }
    let filt = Filtration::new(d);
    let (mut pairs, cleared) = filt.zero_dimensional();
    if max_dim >= 1 {
        pairs.extend(filt.one_dimensional(&cleared));
    }
    Ok(PersistenceDiagram::new(pairs))
}

const VBITS: u32 = 11;
const VMASK: u64 = (1 << VBITS) - 1;

/// Edge and triangle keys pack `(value rank, vertices...)` so that integer
/// order is filtration order.
struct Filtration {
    n: usize,
    /// Distinct filtration values, ascending.
    values: Vec<f64>,
    /// Value rank of every vertex pair, row-major.
    rank: Vec<u32>,
}

impl Filtration {
    fn new(d: &DistanceMatrix) -> Self {
        let n = d.size();
        let mut values: Vec<f64> = d.values.iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        let mut rank = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                let v = d.get(i, j);
                rank[i * n + j] = values.binary_search_by(|x| x.total_cmp(&v)).expect("value present") as u32;
            }
        }
        Filtration { n, values, rank }
    }

    fn r(&self, i: usize, j: usize) -> u64 {
        self.rank[i * self.n + j] as u64
    }

    fn edge_key(&self, i: usize, j: usize) -> u64 {
        (self.r(i, j) << (2 * VBITS)) | ((i as u64) << VBITS) | j as u64
    }

    fn edge_of(key: u64) -> (usize, usize) {
        (((key >> VBITS) & VMASK) as usize, (key & VMASK) as usize)
    }

    fn value_of_edge(&self, key: u64) -> f64 {
        self.values[(key >> (2 * VBITS)) as usize]
    }

    fn value_of_triangle(&self, key: u64) -> f64 {
        self.values[(key >> (3 * VBITS)) as usize]
    }

    /// Key of triangle `{i, j, k}` for distinct vertices in any order.
    fn triangle_key(&self, i: usize, j: usize, k: usize) -> u64 {
        let r = self.r(i, j).max(self.r(i, k)).max(self.r(j, k));
        let mut v = [i, j, k];
        v.sort_unstable();
        (r << (3 * VBITS)) | ((v[0] as u64) << (2 * VBITS)) | ((v[1] as u64) << VBITS) | v[2] as u64
    }

    fn sorted_edges(&self) -> Vec<u64> {
        let mut edges = Vec::with_capacity(self.n * (self.n - 1) / 2);
        for i in 0..self.n {
            for j in i + 1..self.n {
                edges.push(self.edge_key(i, j));
            }
        }
        edges.sort_unstable();
        edges
    }

    /// H0 pairs and the edges that merge components.
    fn zero_dimensional(&self) -> (Vec<PersistencePair>, HashSet<u64>) {
        let mut uf = UnionFind::new(self.n);
        let mut pairs = Vec::new();
        let mut cleared = HashSet::new();
        for key in self.sorted_edges() {
            let (i, j) = Self::edge_of(key);
            if uf.union(i, j) {
                cleared.insert(key);
                let death = self.value_of_edge(key);
                if death > 0.0 {
                    pairs.push(PersistencePair::new(0, 0.0, death));
                }
            }
        }
        for _ in 0..uf.components {
            pairs.push(PersistencePair::new(0, 0.0, f64::INFINITY));
        }
        (pairs, cleared)
    }

    fn coboundary(&self, edge: u64, out: &mut Vec<u64>) {
        let (i, j) = Self::edge_of(edge);
        out.extend((0..self.n).filter(|&k| k != i && k != j).map(|k| self.triangle_key(i, j, k)));
    }

    fn lowest_coface(&self, edge: u64) -> Option<u64> {
        let (i, j) = Self::edge_of(edge);
        (0..self.n)
            .filter(|&k| k != i && k != j)
            .map(|k| self.triangle_key(i, j, k))
            .min()
    }

    fn one_dimensional(&self, cleared: &HashSet<u64>) -> Vec<PersistencePair> {
        let mut pairs = Vec::new();
        let mut edges = self.sorted_edges();
        edges.reverse();
        // pivot triangle -> reduction column (as a list of edges)
        let mut pivots: HashMap<u64, usize> = HashMap::new();
        let mut columns: Vec<Vec<u64>> = Vec::new();
        let mut scratch = Vec::new();

        for &edge in &edges {
            if cleared.contains(&edge) {
                continue;
            }
            let pivot = match self.lowest_coface(edge) {
                None => None,
                Some(low) if !pivots.contains_key(&low) => {
                    pivots.insert(low, columns.len());
                    columns.push(vec![edge]);
                    Some(low)
                }
                Some(_) => self.reduce(edge, &mut pivots, &mut columns, &mut scratch),
            };
            let birth = self.value_of_edge(edge);
            match pivot {
                Some(tri) => {
                    let death = self.value_of_triangle(tri);
                    if death > birth {
                        pairs.push(PersistencePair::new(1, birth, death));
                    }
                }
                None => pairs.push(PersistencePair::new(1, birth, f64::INFINITY)),
            }
        }
        pairs
    }

    /// Full column reduction of `edge`'s coboundary against earlier columns.
    fn reduce(
        &self,
        edge: u64,
        pivots: &mut HashMap<u64, usize>,
        columns: &mut Vec<Vec<u64>>,
        scratch: &mut Vec<u64>,
    ) -> Option<u64> {
        let mut heap: BinaryHeap<Reverse<u64>> = BinaryHeap::new();
        let mut combo = vec![edge];
        scratch.clear();
        self.coboundary(edge, scratch);
        heap.extend(scratch.iter().map(|&k| Reverse(k)));
        loop {
            let pivot = pop_pivot(&mut heap)?;
            match pivots.get(&pivot) {
                Some(&col) => {
                    for &f in &columns[col] {
                        scratch.clear();
                        self.coboundary(f, scratch);
                        heap.extend(scratch.iter().map(|&k| Reverse(k)));
                    }
                    combo.extend_from_slice(&columns[col]);
                    // The pivot itself was popped; the added column carries
                    // one more copy which cancels it.
                    heap.push(Reverse(pivot));
                }
                None => {
                    pivots.insert(pivot, columns.len());
                    columns.push(cancel_pairs(combo));
                    return Some(pivot);
                }
            }
        }
    }
}

/// Smallest key with odd multiplicity, removed from the heap along with
/// every cancelled copy below it.
fn pop_pivot(heap: &mut BinaryHeap<Reverse<u64>>) -> Option<u64> {
    while let Some(Reverse(top)) = heap.pop() {
        let mut count = 1;
        while heap.peek() == Some(&Reverse(top)) {
            heap.pop();
            count += 1;
        }
        if count % 2 == 1 {
            return Some(top);
        }
    }
    None
}

fn cancel_pairs(mut v: Vec<u64>) -> Vec<u64> {
    v.sort_unstable();
    let mut out = Vec::with_capacity(v.len());
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(v[i]);
        }
        i = j;
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
    components: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            components: n,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merge the elder-rule way: the smaller root survives.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[drop] = keep;
        self.components -= 1;
        true
    }
}
