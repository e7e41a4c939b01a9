//! Vertex distance matrices of a weighted graph.
//!
//! Four constructions are available:
//!
//! * **SUPD**, shortest unweighted path: hop count of the shortest path.
//! * **SWPD**, shortest weighted path: hop count of the path that minimizes
//!   the summed *inverse* weights, so heavily travelled edges are preferred.
//! * **WSPD**, weighted shortest path: summed weights along that same path.
//! * **DD**, lazy diffusion distance after `t` random-walk steps.
//!
//! Every method requires a connected graph. Inverse-weight path ties are
//! broken by the lexicographically smallest vertex sequence, and each pair
//! is resolved from its lower-indexed endpoint so the matrices are exactly
//! symmetric.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DistanceMethod {
    #[serde(rename = "SUPD")]
    Supd,
    #[serde(rename = "SWPD")]
    Swpd,
    #[serde(rename = "WSPD")]
    Wspd,
    #[serde(rename = "DD")]
    Dd,
}

impl DistanceMethod {
    pub const ALL: [DistanceMethod; 4] = [
        DistanceMethod::Supd,
        DistanceMethod::Swpd,
        DistanceMethod::Wspd,
        DistanceMethod::Dd,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DistanceMethod::Supd => "SUPD",
            DistanceMethod::Swpd => "SWPD",
            DistanceMethod::Wspd => "WSPD",
            DistanceMethod::Dd => "DD",
        }
    }

    /// Compute this method's matrix. `t` is only used by DD and defaults to
    /// [`default_t`].
    pub fn compute(self, graph: &WeightedGraph, t: Option<usize>) -> Result<DistanceMatrix> {
        match self {
            DistanceMethod::Supd => shortest_unweighted_path(graph),
            DistanceMethod::Swpd => shortest_weighted_path(graph),
            DistanceMethod::Wspd => weighted_shortest_path(graph),
            DistanceMethod::Dd => {
                let t = match t {
                    Some(t) => t,
                    None => default_t(graph)?,
                };
                diffusion_distance(graph, t)
            }
        }
    }
}

impl fmt::Display for DistanceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DistanceMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "SUPD" => Ok(DistanceMethod::Supd),
            "SWPD" => Ok(DistanceMethod::Swpd),
            "WSPD" => Ok(DistanceMethod::Wspd),
            "DD" => Ok(DistanceMethod::Dd),
            _ => Err(Error::Parse(format!("unknown distance method `{s}`"))),
        }
    }
}

/// Symmetric, zero-diagonal matrix of vertex distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub values: Array2<f64>,
    pub method: Option<DistanceMethod>,
    /// Random-walk steps, DD only.
    pub t_steps: Option<usize>,
    pub normalized: bool,
}

impl DistanceMatrix {
    /// Wrap a raw square matrix, checking shape, symmetry, finiteness and a
    /// zero diagonal.
    pub fn from_array(values: Array2<f64>) -> Result<Self> {
        let d = DistanceMatrix {
            values,
            method: None,
            t_steps: None,
            normalized: false,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMatrix("matrix is not square".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let values = Array2::from_shape_vec((n, n), flat).expect("square shape");
        DistanceMatrix::from_array(values)
    }

    pub fn size(&self) -> usize {
        self.values.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        let (r, c) = self.values.dim();
        if r != c {
            return Err(Error::InvalidMatrix(format!("matrix is {r}x{c}, not square")));
        }
        for i in 0..r {
            if self.values[[i, i]] != 0.0 {
                return Err(Error::InvalidMatrix(format!("diagonal entry {i} is {}", self.values[[i, i]])));
            }
            for j in 0..r {
                let v = self.values[[i, j]];
                if !v.is_finite() {
                    return Err(Error::InvalidMatrix(format!("entry ({i}, {j}) is not finite")));
                }
                if v < 0.0 {
                    return Err(Error::InvalidMatrix(format!("entry ({i}, {j}) is negative")));
                }
                if v != self.values[[j, i]] {
                    return Err(Error::InvalidMatrix(format!("entries ({i}, {j}) and ({j}, {i}) differ")));
                }
            }
        }
        Ok(())
    }
}

fn matrix_from_upper(n: usize, rows: Vec<Vec<f64>>) -> Array2<f64> {
    let mut m = Array2::zeros((n, n));
    for (a, row) in rows.into_iter().enumerate() {
        for (b, v) in row.into_iter().enumerate() {
            if b > a {
                m[[a, b]] = v;
                m[[b, a]] = v;
            }
        }
    }
    m
}

pub fn shortest_unweighted_path(graph: &WeightedGraph) -> Result<DistanceMatrix> {
    graph.require_connected()?;
    let n = graph.vertex_count();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| graph.bfs(s).into_iter().map(|d| d as f64).collect())
        .collect();
    Ok(DistanceMatrix {
        values: matrix_from_upper(n, rows),
        method: Some(DistanceMethod::Supd),
        t_steps: None,
        normalized: false,
    })
}

#[derive(Clone, Copy, PartialEq)]
struct Cost(f64);

impl Eq for Cost {}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Inverse-weight Dijkstra from `source`; for every vertex returns the hop
/// count and summed weight of the lexicographically smallest minimum-cost
/// path.
fn inverse_weight_paths(graph: &WeightedGraph, source: usize) -> Vec<(usize, u64)> {
    let n = graph.vertex_count();
    let mut cost = vec![f64::INFINITY; n];
    let mut path: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut sum = vec![0u64; n];
    let mut done = vec![false; n];
    cost[source] = 0.0;
    path[source] = vec![source as u32];
    let mut heap = BinaryHeap::from([Reverse((Cost(0.0), source))]);
    while let Some(Reverse((Cost(c), u))) = heap.pop() {
        if done[u] || c > cost[u] {
            continue;
        }
        done[u] = true;
        for &(v, w) in graph.neighbors(u) {
            if done[v] {
                continue;
            }
            let candidate = c + 1.0 / w as f64;
            let better = match candidate.total_cmp(&cost[v]) {
                Ordering::Less => true,
                Ordering::Equal => path[u].iter().chain([&(v as u32)]).lt(path[v].iter()),
                Ordering::Greater => false,
            };
            if better {
                cost[v] = candidate;
                let mut p = Vec::with_capacity(path[u].len() + 1);
                p.extend_from_slice(&path[u]);
                p.push(v as u32);
                path[v] = p;
                sum[v] = sum[u] + w;
                heap.push(Reverse((Cost(candidate), v)));
            }
        }
    }
    path.iter().zip(sum).map(|(p, s)| (p.len().saturating_sub(1), s)).collect()
}

fn inverse_weight_matrix(graph: &WeightedGraph, method: DistanceMethod) -> Result<DistanceMatrix> {
    graph.require_connected()?;
    let n = graph.vertex_count();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| {
            inverse_weight_paths(graph, s)
                .into_iter()
                .map(|(hops, sum)| match method {
                    DistanceMethod::Swpd => hops as f64,
                    _ => sum as f64,
                })
                .collect()
        })
        .collect();
    Ok(DistanceMatrix {
        values: matrix_from_upper(n, rows),
        method: Some(method),
        t_steps: None,
        normalized: false,
    })
}

/// Hop count along the path minimizing summed inverse weights.
pub fn shortest_weighted_path(graph: &WeightedGraph) -> Result<DistanceMatrix> {
    inverse_weight_matrix(graph, DistanceMethod::Swpd)
}

/// Summed weights along the path minimizing summed inverse weights.
pub fn weighted_shortest_path(graph: &WeightedGraph) -> Result<DistanceMatrix> {
    inverse_weight_matrix(graph, DistanceMethod::Wspd)
}

/// Row-stochastic random-walk matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    pub values: Array2<f64>,
    pub lazy: bool,
}

/// `P(i, j) = A(i, j) / sum_k A(i, k)`, or `(I + P) / 2` when `lazy`.
pub fn transition_matrix(graph: &WeightedGraph, lazy: bool) -> Result<TransitionMatrix> {
    let n = graph.vertex_count();
    let mut p = Array2::zeros((n, n));
    for i in 0..n {
        let total = graph.weighted_degree(i);
        if total == 0 {
            return Err(Error::ZeroRow(i));
        }
        for &(j, w) in graph.neighbors(i) {
            p[[i, j]] = w as f64 / total as f64;
        }
    }
    if lazy {
        p.mapv_inplace(|x| 0.5 * x);
        for i in 0..n {
            p[[i, i]] += 0.5;
        }
    }
    Ok(TransitionMatrix { values: p, lazy })
}

/// `m^t` by repeated squaring.
pub fn matrix_power(m: &Array2<f64>, t: usize) -> Array2<f64> {
    let n = m.nrows();
    let mut result: Option<Array2<f64>> = None;
    let mut base = m.clone();
    let mut e = t;
    while e > 0 {
        if e & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => r.dot(&base),
            });
        }
        e >>= 1;
        if e > 0 {
            base = base.dot(&base);
        }
    }
    result.unwrap_or_else(|| Array2::eye(n))
}

/// Lazy diffusion distance after `t` steps:
/// `d_t(a, b) = sqrt(sum_c (P~^t(a, c) - P~^t(b, c))^2 / deg(c))`
/// with `deg` the unweighted vertex degree.
pub fn diffusion_distance(graph: &WeightedGraph, t: usize) -> Result<DistanceMatrix> {
    if t < 1 {
        return Err(Error::Parameter("diffusion needs at least one step".into()));
    }
    graph.require_connected()?;
    let n = graph.vertex_count();
    if n == 1 {
        return Err(Error::InvalidInput("diffusion distance needs at least one edge".into()));
    }
    let lazy = transition_matrix(graph, true)?;
    let pt = matrix_power(&lazy.values, t);
    let inv_deg: Vec<f64> = (0..n).map(|c| 1.0 / graph.degree(c) as f64).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let ra = pt.row(a);
            (0..n)
                .map(|b| {
                    if b <= a {
                        return 0.0;
                    }
                    let rb = pt.row(b);
                    let s: f64 = ra
                        .iter()
                        .zip(rb.iter())
                        .zip(&inv_deg)
                        .map(|((x, y), k)| (x - y) * (x - y) * k)
                        .sum();
                    s.sqrt()
                })
                .collect()
        })
        .collect();
    Ok(DistanceMatrix {
        values: matrix_from_upper(n, rows),
        method: Some(DistanceMethod::Dd),
        t_steps: Some(t),
        normalized: false,
    })
}

/// Random-walk steps used by default: twice the unweighted diameter.
pub fn default_t(graph: &WeightedGraph) -> Result<usize> {
    Ok(2 * graph.diameter()?)
}

/// Divide every entry by the largest one.
pub fn normalize(d: &DistanceMatrix) -> Result<DistanceMatrix> {
    let max = d.max();
    if !(max > 0.0) {
        return Err(Error::Degenerate("cannot normalize an all-zero distance matrix".into()));
    }
    let mut out = d.clone();
    out.values.mapv_inplace(|x| if x == max { 1.0 } else { x / max });
    out.normalized = true;
    Ok(out)
}
