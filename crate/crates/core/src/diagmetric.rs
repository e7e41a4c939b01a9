//! Bottleneck distance between persistence diagrams.
//!
//! The exact distance is found by binary search over the finite set of
//! candidate costs (pairwise L∞ distances and half-lifetimes). For each
//! candidate, feasibility is a perfect matching test on the usual bipartite
//! graph where every point may also be matched to its own diagonal
//! projection, and diagonal copies match each other freely.

use rayon::prelude::*;
use serde::Serialize;

use crate::dynsys::DynamicState;
use crate::error::{Error, Result};
use crate::persistence::PersistenceDiagram;

fn finite_points(d: &PersistenceDiagram) -> Result<Vec<(f64, f64)>> {
    d.pairs
        .iter()
        .map(|p| {
            if p.death.is_finite() && p.birth.is_finite() {
                Ok((p.birth, p.death))
            } else {
                Err(Error::InvalidInput(
                    "bottleneck needs finite pairs; restrict the diagram with finite_in()".into(),
                ))
            }
        })
        .collect()
}

fn linf(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

fn half_life(a: (f64, f64)) -> f64 {
    (a.1 - a.0) / 2.0
}

/// Exact bottleneck distance between two diagrams of finite pairs.
pub fn bottleneck(d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> Result<f64> {
    let a = finite_points(d1)?;
    let b = finite_points(d2)?;
    Ok(bottleneck_points(&a, &b))
}

pub fn bottleneck_points(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let (m, k) = (a.len(), b.len());
    if m == 0 && k == 0 {
        return 0.0;
    }
    let mut candidates: Vec<f64> = Vec::with_capacity(m * k + m + k + 1);
    candidates.push(0.0);
    for &p in a {
        candidates.push(half_life(p));
        for &q in b {
            candidates.push(linf(p, q));
        }
    }
    candidates.extend(b.iter().map(|&q| half_life(q)));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // The largest candidate is always feasible: every point can go to the diagonal.
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching_exists(a, b, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Left side: `a` points then diagonal copies of `b`. Right side: `b` points
/// then diagonal copies of `a`.
fn perfect_matching_exists(a: &[(f64, f64)], b: &[(f64, f64)], eps: f64) -> bool {
    let (m, k) = (a.len(), b.len());
    let size = m + k;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); size];
    for (i, &p) in a.iter().enumerate() {
        for (j, &q) in b.iter().enumerate() {
            if linf(p, q) <= eps {
                adj[i].push(j);
            }
        }
        if half_life(p) <= eps {
            adj[i].push(k + i);
        }
    }
    for (j, &q) in b.iter().enumerate() {
        let left = m + j;
        if half_life(q) <= eps {
            adj[left].push(j);
        }
        adj[left].extend(k..k + m);
    }
    hopcroft_karp(&adj, size) == size
}

/// Size of a maximum matching; `adj[u]` lists right vertices of left `u`.
fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> usize {
    const NIL: usize = usize::MAX;
    let n_left = adj.len();
    let mut match_l = vec![NIL; n_left];
    let mut match_r = vec![NIL; n_right];
    let mut dist = vec![0usize; n_left];
    let mut matched = 0;

    loop {
        // BFS layering from free left vertices.
        let mut queue = std::collections::VecDeque::new();
        for u in 0..n_left {
            if match_l[u] == NIL {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == NIL {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut it = vec![0usize; n_left];
        for u in 0..n_left {
            if match_l[u] == NIL && augment(u, adj, &mut match_l, &mut match_r, &mut dist, &mut it) {
                matched += 1;
            }
        }
    }
    matched
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [usize],
    it: &mut [usize],
) -> bool {
    // Iterative DFS along the BFS layers.
    let mut stack = vec![u];
    let mut parents: Vec<(usize, usize)> = Vec::new();
    while let Some(&x) = stack.last() {
        if it[x] >= adj[x].len() {
            dist[x] = usize::MAX;
            stack.pop();
            parents.pop();
            continue;
        }
        let v = adj[x][it[x]];
        it[x] += 1;
        let w = match_r[v];
        if w == usize::MAX {
            parents.push((x, v));
            for &(l, r) in &parents {
                match_l[l] = r;
                match_r[r] = l;
            }
            return true;
        }
        if dist[w] == dist[x].wrapping_add(1) {
            parents.push((x, v));
            stack.push(w);
        }
    }
    false
}

/// Bottleneck distance divided by half the total persistence of `reference`.
pub fn normalized_bottleneck(reference: &PersistenceDiagram, other: &PersistenceDiagram) -> Result<f64> {
    let points = finite_points(reference)?;
    let half_total: f64 = points.iter().map(|&p| half_life(p)).sum();
    if !(half_total > 0.0) {
        return Err(Error::Degenerate("reference diagram has zero total persistence".into()));
    }
    Ok(bottleneck(reference, other)? / half_total)
}

/// Pairwise bottleneck distances with a dynamic-state label per row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagramDistanceMatrix {
    pub values: Vec<Vec<f64>>,
    pub labels: Vec<DynamicState>,
}

impl DiagramDistanceMatrix {
    pub fn new(values: Vec<Vec<f64>>, labels: Vec<DynamicState>) -> Result<Self> {
        let n = values.len();
        if labels.len() != n {
            return Err(Error::InvalidInput(format!("{n} rows but {} labels", labels.len())));
        }
        for (i, row) in values.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix("diagram distance matrix is not square".into()));
            }
            if row[i] != 0.0 {
                return Err(Error::InvalidMatrix(format!("diagonal entry {i} is nonzero")));
            }
            for (j, &v) in row.iter().enumerate() {
                if !(v >= 0.0 && v.is_finite()) || v != values[j][i] {
                    return Err(Error::InvalidMatrix(format!("entry ({i}, {j}) is invalid or asymmetric")));
                }
            }
        }
        Ok(DiagramDistanceMatrix { values, labels })
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }
}

/// Symmetric matrix of bottleneck distances over the finite D1 pairs.
pub fn pairwise_bottleneck(diagrams: &[PersistenceDiagram], labels: &[DynamicState]) -> Result<DiagramDistanceMatrix> {
    let n = diagrams.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 diagrams, got {n}")));
    }
    if labels.len() != n {
        return Err(Error::InvalidInput(format!("{n} diagrams but {} labels", labels.len())));
    }
    let d1: Vec<PersistenceDiagram> = diagrams.iter().map(|d| d.finite_in(1)).collect();
    let jobs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let dists: Vec<((usize, usize), f64)> = jobs
        .into_par_iter()
        .map(|(i, j)| {
            bottleneck(&d1[i], &d1[j])
                .map(|v| ((i, j), v))
                .map_err(|e| Error::Pair { i, j, source: Box::new(e) })
        })
        .collect::<Result<_>>()?;
    let mut values = vec![vec![0.0; n]; n];
    for ((i, j), v) in dists {
        values[i][j] = v;
        values[j][i] = v;
    }
    DiagramDistanceMatrix::new(values, labels.to_vec())
}
