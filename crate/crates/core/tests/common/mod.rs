//! Independent reference implementations used by the integration tests.
//!
//! Everything here is deliberately naive: explicit simplex enumeration and a
//! dense boundary matrix for persistence, full enumeration of partial
//! matchings for the bottleneck distance, Floyd–Warshall and path
//! enumeration for graph distances.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wopn::graph::WeightedGraph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// (dimension, birth, death) with zero-length pairs removed, sorted.
pub type Pairs = Vec<(usize, f64, f64)>;

pub fn sorted(mut v: Pairs) -> Pairs {
    v.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
    v
}

/// Rips persistence in dimensions 0 and 1 by the textbook algorithm: list
/// every simplex up to dimension 2, sort by (value, dimension, vertices),
/// and reduce the full Z/2 boundary matrix column by column.
pub fn naive_persistence(d: &[Vec<f64>]) -> Pairs {
    let n = d.len();
    let mut simplices: Vec<(f64, Vec<usize>)> = Vec::new();
    for i in 0..n {
        simplices.push((0.0, vec![i]));
    }
    for i in 0..n {
        for j in i + 1..n {
            simplices.push((d[i][j], vec![i, j]));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let v = d[i][j].max(d[i][k]).max(d[j][k]);
                simplices.push((v, vec![i, j, k]));
            }
        }
    }
    simplices.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.len().cmp(&b.1.len())).then(a.1.cmp(&b.1)));
    let index: std::collections::HashMap<Vec<usize>, usize> =
        simplices.iter().enumerate().map(|(i, s)| (s.1.clone(), i)).collect();

    let m = simplices.len();
    let mut columns: Vec<Vec<bool>> = simplices
        .iter()
        .map(|(_, s)| {
            let mut col = vec![false; m];
            if s.len() > 1 {
                for skip in 0..s.len() {
                    let face: Vec<usize> = s.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect();
                    col[index[&face]] = true;
                }
            }
            col
        })
        .collect();

    let low = |col: &Vec<bool>| col.iter().rposition(|&b| b);
    let mut owner: Vec<Option<usize>> = vec![None; m];
    let mut paired = vec![false; m];
    let mut pairs = Vec::new();
    for j in 0..m {
        while let Some(l) = low(&columns[j]) {
            match owner[l] {
                Some(k) => {
                    let other = columns[k].clone();
                    for (a, b) in columns[j].iter_mut().zip(other) {
                        *a ^= b;
                    }
                }
                None => break,
            }
        }
        if let Some(l) = low(&columns[j]) {
            owner[l] = Some(j);
            paired[l] = true;
            paired[j] = true;
            let (birth, death) = (simplices[l].0, simplices[j].0);
            if death > birth {
                pairs.push((simplices[l].1.len() - 1, birth, death));
            }
        }
    }
    for j in 0..m {
        let dim = simplices[j].1.len() - 1;
        if !paired[j] && dim < 2 {
            pairs.push((dim, simplices[j].0, f64::INFINITY));
        }
    }
    sorted(pairs)
}

fn linf(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

fn half(a: (f64, f64)) -> f64 {
    (a.1 - a.0) / 2.0
}

/// Minimum over every partial matching of the largest matched L∞ cost or
/// unmatched half-lifetime.
pub fn brute_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    fn go(i: usize, a: &[(f64, f64)], b: &[(f64, f64)], used: &mut Vec<bool>, cost: f64, best: &mut f64) {
        if i == a.len() {
            let rest = b
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(&p, _)| half(p))
                .fold(0.0, f64::max);
            *best = best.min(cost.max(rest));
            return;
        }
        go(i + 1, a, b, used, cost.max(half(a[i])), best);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                go(i + 1, a, b, used, cost.max(linf(a[i], b[j])), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(0, a, b, &mut vec![false; b.len()], 0.0, &mut best);
    best
}

/// Random diagram of at most `max_points` points on a coarse grid, so ties
/// and equal costs are common.
pub fn random_diagram(rng: &mut ChaCha8Rng, max_points: usize) -> Vec<(f64, f64)> {
    let k = rng.random_range(0..=max_points);
    (0..k)
        .map(|_| {
            let b = rng.random_range(0..8) as f64 * 0.5;
            let l = rng.random_range(1..8) as f64 * 0.5;
            (b, b + l)
        })
        .collect()
}

/// Random symmetric zero-diagonal matrix. With `grid` the entries are small
/// integers (many ties), otherwise uniform reals.
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, grid: bool) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = if grid {
                rng.random_range(1..=4) as f64
            } else {
                rng.random_range(0.01..10.0)
            };
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// Random connected graph: a random spanning tree plus extra edges, weights
/// drawn from `weights`.
pub fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize, extra: usize, weights: &[u64]) -> WeightedGraph {
    let mut g = WeightedGraph::new(n);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    for k in 1..n {
        let u = order[k];
        let v = order[rng.random_range(0..k)];
        g.add_weight(u, v, weights[rng.random_range(0..weights.len())]).unwrap();
    }
    for _ in 0..extra {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v && g.weight(u, v) == 0 {
            g.add_weight(u, v, weights[rng.random_range(0..weights.len())]).unwrap();
        }
    }
    g
}

/// All-pairs hop counts by Floyd–Warshall.
pub fn floyd_hops(g: &WeightedGraph) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for (u, v, _) in g.edges() {
        d[u][v] = 1.0;
        d[v][u] = 1.0;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// For every pair `a < b`, enumerate all simple paths from `a` and keep the
/// one with the smallest summed inverse weight, ties to the lexicographically
/// smallest vertex sequence. Returns (hops, summed weight) matrices.
/// Exact only when inverse-weight sums are exact in binary floating point,
/// e.g. power-of-two weights.
pub fn enumerate_inverse_weight_paths(g: &WeightedGraph) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = g.vertex_count();
    let mut hops = vec![vec![0.0; n]; n];
    let mut sums = vec![vec![0.0; n]; n];
    for a in 0..n {
        // best[b] = (cost, path)
        let mut best: Vec<Option<(f64, Vec<usize>)>> = vec![None; n];
        let mut path = vec![a];
        let mut on = vec![false; n];
        on[a] = true;
        fn dfs(
            g: &WeightedGraph,
            cost: f64,
            path: &mut Vec<usize>,
            on: &mut Vec<bool>,
            best: &mut Vec<Option<(f64, Vec<usize>)>>,
        ) {
            let u = *path.last().unwrap();
            let better = match &best[u] {
                None => true,
                Some((c, p)) => cost < *c || (cost == *c && path.as_slice() < p.as_slice()),
            };
            if better {
                best[u] = Some((cost, path.clone()));
            }
            for &(v, w) in g.neighbors(u) {
                if !on[v] {
                    on[v] = true;
                    path.push(v);
                    dfs(g, cost + 1.0 / w as f64, path, on, best);
                    path.pop();
                    on[v] = false;
                }
            }
        }
        dfs(g, 0.0, &mut path, &mut on, &mut best);
        for b in a + 1..n {
            let (_, p) = best[b].as_ref().expect("connected");
            let h = (p.len() - 1) as f64;
            let s: u64 = p.windows(2).map(|e| g.weight(e[0], e[1])).sum();
            hops[a][b] = h;
            hops[b][a] = h;
            sums[a][b] = s as f64;
            sums[b][a] = s as f64;
        }
    }
    (hops, sums)
}

/// Diffusion distance straight from the definition with a dense loop for
/// the matrix power (t multiplications).
pub fn naive_diffusion(g: &WeightedGraph, t: usize) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    let a = g.dense_adjacency();
    let mut p = vec![vec![0.0; n]; n];
    for i in 0..n {
        let row: u64 = a[i].iter().sum();
        for j in 0..n {
            p[i][j] = 0.5 * a[i][j] as f64 / row as f64;
        }
        p[i][i] += 0.5;
    }
    let mut pt = vec![vec![0.0; n]; n];
    for (i, row) in pt.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..t {
        let mut next = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    next[i][j] += pt[i][k] * p[k][j];
                }
            }
        }
        pt = next;
    }
    let deg: Vec<f64> = (0..n).map(|c| a[c].iter().filter(|&&w| w > 0).count() as f64).collect();
    let mut d = vec![vec![0.0; n]; n];
    for x in 0..n {
        for y in 0..n {
            d[x][y] = (0..n).map(|c| (pt[x][c] - pt[y][c]).powi(2) / deg[c]).sum::<f64>().sqrt();
        }
    }
    d
}
