//! Ordinal partition sequences and networks.

use std::collections::HashMap;
use std::fmt;

use crate::dynsys::Signal;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Ordinal pattern of a delay vector: `order[k]` is the index of the k-th
/// smallest coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    order: Vec<u8>,
}

impl Permutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        if n > u8::MAX as usize {
            return Err(Error::InvalidInput(format!("permutation of length {n} is too long")));
        }
        let mut seen = vec![false; n];
        for &i in &order {
            if i >= n || seen[i] {
                return Err(Error::InvalidInput(format!("{order:?} is not a permutation of 0..{n}")));
            }
            seen[i] = true;
        }
        Ok(Permutation {
            order: order.into_iter().map(|i| i as u8).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> impl Iterator<Item = usize> + '_ {
        self.order.iter().map(|&i| i as usize)
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            order: (0..n as u8).collect(),
        }
    }
}

impl fmt::Display for Permutation {
    /// Dash-joined form, e.g. `0-2-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, i) in self.order.iter().enumerate() {
            if k > 0 {
                f.write_str("-")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let order = s
            .split('-')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("bad permutation `{s}`: {e}")))?;
        Permutation::new(order)
    }
}

/// Stable argsort of `window`; equal values keep their index order.
pub fn permutation_of(window: &[f64]) -> Result<Permutation> {
    if window.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "window needs at least 2 values, got {}",
            window.len()
        )));
    }
    if let Some(i) = window.iter().position(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("window entry {i} is not finite")));
    }
    let mut idx: Vec<usize> = (0..window.len()).collect();
    idx.sort_by(|&a, &b| window[a].partial_cmp(&window[b]).expect("finite"));
    Permutation::new(idx)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationSequence {
    pub symbols: Vec<Permutation>,
    pub n: usize,
    pub tau: usize,
}

impl PermutationSequence {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Ordinal pattern of every delay vector `[x_i, x_{i+tau}, ..., x_{i+(n-1)tau}]`.
pub fn embed(signal: &Signal, n: usize, tau: usize) -> Result<PermutationSequence> {
    embed_samples(&signal.samples, n, tau)
}

pub fn embed_samples(samples: &[f64], n: usize, tau: usize) -> Result<PermutationSequence> {
    if n < 2 {
        return Err(Error::Parameter(format!("embedding dimension must be at least 2, got {n}")));
    }
    if tau < 1 {
        return Err(Error::Parameter("delay must be at least 1".into()));
    }
    let span = tau * (n - 1);
    if samples.len() <= span {
        return Err(Error::Length(format!(
            "{} samples is too short for n = {n}, tau = {tau} (need more than {span})",
            samples.len()
        )));
    }
    let count = samples.len() - span;
    let mut window = vec![0.0; n];
    let mut symbols = Vec::with_capacity(count);
    for i in 0..count {
        for (k, w) in window.iter_mut().enumerate() {
            *w = samples[i + k * tau];
        }
        symbols.push(permutation_of(&window)?);
    }
    Ok(PermutationSequence { symbols, n, tau })
}

/// Ordinal partition network: distinct permutations as vertices (in order of
/// first appearance) and transition counts as undirected edge weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedNetwork {
    pub vertices: Vec<Permutation>,
    pub graph: WeightedGraph,
}

impl WeightedNetwork {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.vertices.iter().position(|v| v == p)
    }

    pub fn labels(&self) -> Vec<String> {
        self.vertices.iter().map(ToString::to_string).collect()
    }
}

pub fn build_network(seq: &PermutationSequence) -> Result<WeightedNetwork> {
    if seq.symbols.len() < 2 {
        return Err(Error::Length(format!(
            "a network needs at least 2 symbols, got {}",
            seq.symbols.len()
        )));
    }
    let mut index: HashMap<&Permutation, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let ids: Vec<usize> = seq
        .symbols
        .iter()
        .map(|p| {
            *index.entry(p).or_insert_with(|| {
                vertices.push(p.clone());
                vertices.len() - 1
            })
        })
        .collect();
    if vertices.len() == 1 {
        return Err(Error::DegenerateNetwork {
            symbols: seq.symbols.len(),
        });
    }
    let mut graph = WeightedGraph::new(vertices.len());
    for pair in ids.windows(2) {
        if pair[0] != pair[1] {
            graph.add_weight(pair[0], pair[1], 1)?;
        }
    }
    Ok(WeightedNetwork { vertices, graph })
}
