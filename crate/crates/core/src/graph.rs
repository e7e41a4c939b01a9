//! Simple undirected graphs with positive integer edge weights.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};

/// Undirected simple graph; `weight(u, v) == weight(v, u)`, no self loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    n: usize,
    /// Sorted neighbor lists with weights.
    adj: Vec<Vec<(usize, u64)>>,
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        WeightedGraph {
            n,
            adj: vec![Vec::new(); n],
        }
    }

    /// Build from an edge list, summing weights of repeated edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize, u64)]) -> Result<Self> {
        let mut g = WeightedGraph::new(n);
        for &(u, v, w) in edges {
            g.add_weight(u, v, w)?;
        }
        Ok(g)
    }

    /// Uniform-weight cycle `0 - 1 - ... - (n-1) - 0`.
    pub fn cycle(n: usize, weight: u64) -> Self {
        let mut g = WeightedGraph::new(n);
        for i in 0..n {
            let j = (i + 1) % n;
            if i != j && g.weight(i, j) == 0 {
                g.add_weight(i, j, weight).expect("valid cycle edge");
            }
        }
        g
    }

    /// Path `0 - 1 - ... - (n-1)` with the given edge weights.
    pub fn path(weights: &[u64]) -> Result<Self> {
        let edges: Vec<_> = weights.iter().enumerate().map(|(i, &w)| (i, i + 1, w)).collect();
        WeightedGraph::from_edges(weights.len() + 1, &edges)
    }

    pub fn add_weight(&mut self, u: usize, v: usize, w: u64) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::InvalidInput(format!(
                "edge ({u}, {v}) out of range for {} vertices",
                self.n
            )));
        }
        if u == v {
            return Err(Error::InvalidInput(format!("self loop on vertex {u}")));
        }
        if w == 0 {
            return Err(Error::InvalidWeight { u, v, weight: 0.0 });
        }
        for (a, b) in [(u, v), (v, u)] {
            let list = &mut self.adj[a];
            match list.binary_search_by_key(&b, |e| e.0) {
                Ok(i) => list[i].1 += w,
                Err(i) => list.insert(i, (b, w)),
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, u64)] {
        &self.adj[u]
    }

    pub fn weight(&self, u: usize, v: usize) -> u64 {
        self.adj[u]
            .binary_search_by_key(&v, |e| e.0)
            .map(|i| self.adj[u][i].1)
            .unwrap_or(0)
    }

    /// Number of incident edges, ignoring weights.
    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn weighted_degree(&self, u: usize) -> u64 {
        self.adj[u].iter().map(|e| e.1).sum()
    }

    pub fn total_weight(&self) -> u64 {
        (0..self.n).map(|u| self.weighted_degree(u)).sum::<u64>() / 2
    }

    /// Edges as `(u, v, w)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize, u64)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for &(v, w) in &self.adj[u] {
                if u < v {
                    out.push((u, v, w));
                }
            }
        }
        out
    }

    pub fn dense_adjacency(&self) -> Vec<Vec<u64>> {
        let mut a = vec![vec![0; self.n]; self.n];
        for (u, v, w) in self.edges() {
            a[u][v] = w;
            a[v][u] = w;
        }
        a
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &(v, _) in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.components().len() == 1
    }

    pub(crate) fn require_connected(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("graph has no vertices".into()));
        }
        let comps = self.components();
        if comps.len() > 1 {
            return Err(Error::Disconnected { components: comps });
        }
        Ok(())
    }

    /// Hop distances from `source`; `usize::MAX` marks unreachable vertices.
    pub fn bfs(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Maximum hop distance between any two vertices.
    pub fn diameter(&self) -> Result<usize> {
        self.require_connected()?;
        Ok((0..self.n).map(|s| self.bfs(s).into_iter().max().unwrap_or(0)).max().unwrap_or(0))
    }

    /// Degree histogram, mostly useful for reports.
    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for u in 0..self.n {
            *h.entry(self.degree(u)).or_insert(0) += 1;
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repeated_edges_accumulate() {
        let g = WeightedGraph::from_edges(3, &[(0, 1, 2), (1, 0, 3), (1, 2, 1)]).unwrap();
        assert_eq!(g.weight(0, 1), 5);
        assert_eq!(g.weight(1, 0), 5);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.total_weight(), 6);
        assert_eq!(g.degree(1), 2);
        assert_eq!(g.weighted_degree(1), 6);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(WeightedGraph::from_edges(2, &[(0, 0, 1)]).is_err());
        assert!(WeightedGraph::from_edges(2, &[(0, 2, 1)]).is_err());
        assert!(matches!(
            WeightedGraph::from_edges(2, &[(0, 1, 0)]),
            Err(Error::InvalidWeight { .. })
        ));
    }

    #[test]
    fn components_and_diameter() {
        let g = WeightedGraph::from_edges(5, &[(0, 1, 1), (3, 4, 1)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1], vec![2], vec![3, 4]]);
        assert!(matches!(g.diameter(), Err(Error::Disconnected { .. })));
        assert_eq!(WeightedGraph::cycle(6, 1).diameter().unwrap(), 3);
        assert_eq!(WeightedGraph::path(&[1, 1, 1]).unwrap().diameter().unwrap(), 3);
        assert_eq!(WeightedGraph::path(&[4]).unwrap().diameter().unwrap(), 1);
    }
}
