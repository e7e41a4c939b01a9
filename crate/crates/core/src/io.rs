//! CSV and JSON import/export for every pipeline stage.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a file
//! read back reproduces the in-memory values exactly. Writes go through a
//! temporary sibling file and a rename.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::Array2;

use crate::analysis::Embedding;
use crate::diagmetric::DiagramDistanceMatrix;
use crate::dynsys::{DynamicState, Signal};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::graphdist::DistanceMatrix;
use crate::opn::{Permutation, PermutationSequence, WeightedNetwork};
use crate::persistence::{PersistenceDiagram, PersistencePair};

pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn fmt_f64(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{x}")
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    match s.trim() {
        "inf" | "Infinity" => Ok(f64::INFINITY),
        t => t.parse().map_err(|_| Error::Parse(format!("not a number: `{t}`"))),
    }
}

fn body_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().skip(1).filter(|(_, l)| !l.trim().is_empty())
}

fn fields(line: &str, expected: usize, lineno: usize) -> Result<Vec<&str>> {
    let f: Vec<&str> = line.split(',').map(str::trim).collect();
    if f.len() != expected {
        return Err(Error::Parse(format!(
            "line {}: expected {expected} fields, found {}",
            lineno + 1,
            f.len()
        )));
    }
    Ok(f)
}

/// Two-column `time,value` CSV.
pub fn signal_csv(signal: &Signal) -> String {
    let mut out = String::from("time,value\n");
    for (t, x) in signal.times().zip(&signal.samples) {
        let _ = writeln!(out, "{},{}", fmt_f64(t), fmt_f64(*x));
    }
    out
}

/// Parse a `time,value` CSV; the sample rate comes from the first time step.
pub fn parse_signal_csv(text: &str, label: Option<DynamicState>) -> Result<Signal> {
    let mut times = Vec::new();
    let mut samples = Vec::new();
    for (i, line) in body_lines(text) {
        let f = fields(line, 2, i)?;
        times.push(parse_f64(f[0])?);
        samples.push(parse_f64(f[1])?);
    }
    if times.len() < 2 {
        return Err(Error::Length("signal CSV needs at least two rows".into()));
    }
    let dt = times[1] - times[0];
    if !(dt > 0.0) {
        return Err(Error::Parse("time column must be increasing".into()));
    }
    Signal::new(samples, 1.0 / dt, label)
}

pub fn sequence_csv(seq: &PermutationSequence) -> String {
    let mut out = String::from("index,permutation\n");
    for (i, p) in seq.symbols.iter().enumerate() {
        let _ = writeln!(out, "{i},{p}");
    }
    out
}

pub fn parse_sequence_csv(text: &str, tau: usize) -> Result<PermutationSequence> {
    let symbols = body_lines(text)
        .map(|(i, line)| fields(line, 2, i)?[1].parse::<Permutation>())
        .collect::<Result<Vec<_>>>()?;
    let n = symbols.first().map_or(0, Permutation::len);
    Ok(PermutationSequence { symbols, n, tau })
}

/// Edge list `u,v,weight` with `u < v`.
pub fn edges_csv(graph: &WeightedGraph) -> String {
    let mut out = String::from("u,v,weight\n");
    for (u, v, w) in graph.edges() {
        let _ = writeln!(out, "{u},{v},{w}");
    }
    out
}

/// Vertex table `index,permutation`.
pub fn vertices_csv(net: &WeightedNetwork) -> String {
    let mut out = String::from("index,permutation\n");
    for (i, p) in net.vertices.iter().enumerate() {
        let _ = writeln!(out, "{i},{p}");
    }
    out
}

pub fn parse_network_csv(edges: &str, vertices: &str) -> Result<WeightedNetwork> {
    let mut verts = Vec::new();
    for (i, line) in body_lines(vertices) {
        let f = fields(line, 2, i)?;
        let idx: usize = f[0].parse().map_err(|_| Error::Parse(format!("bad vertex index `{}`", f[0])))?;
        if idx != verts.len() {
            return Err(Error::Parse(format!("vertex indices must be 0..n in order, found {idx}")));
        }
        verts.push(f[1].parse::<Permutation>()?);
    }
    let mut list = Vec::new();
    for (i, line) in body_lines(edges) {
        let f = fields(line, 3, i)?;
        let p = |s: &str| s.parse::<u64>().map_err(|_| Error::Parse(format!("bad integer `{s}`")));
        list.push((p(f[0])? as usize, p(f[1])? as usize, p(f[2])?));
    }
    let graph = WeightedGraph::from_edges(verts.len(), &list)?;
    Ok(WeightedNetwork { vertices: verts, graph })
}

/// Square CSV whose header row holds the vertex labels.
pub fn distance_csv(d: &DistanceMatrix, labels: &[String]) -> String {
    let mut out = labels.join(",");
    out.push('\n');
    for row in d.values.rows() {
        let line: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_distance_csv(text: &str) -> Result<(DistanceMatrix, Vec<String>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty distance CSV".into()))?;
    let labels: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let n = labels.len();
    let mut flat = Vec::with_capacity(n * n);
    for (i, line) in lines.enumerate() {
        let f = fields(line, n, i + 1)?;
        for v in f {
            flat.push(parse_f64(v)?);
        }
    }
    if flat.len() != n * n {
        return Err(Error::Parse(format!("expected {n} rows of distances")));
    }
    let values = Array2::from_shape_vec((n, n), flat).expect("checked size");
    Ok((DistanceMatrix::from_array(values)?, labels))
}

/// Rows `dimension,birth,death`; essential classes have death `inf`.
pub fn diagram_csv(diag: &PersistenceDiagram) -> String {
    let mut out = String::from("dimension,birth,death\n");
    for p in &diag.pairs {
        let _ = writeln!(out, "{},{},{}", p.dimension, fmt_f64(p.birth), fmt_f64(p.death));
    }
    out
}

pub fn parse_diagram_csv(text: &str) -> Result<PersistenceDiagram> {
    let pairs = body_lines(text)
        .map(|(i, line)| {
            let f = fields(line, 3, i)?;
            let dim = f[0]
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad dimension `{}`", f[0])))?;
            Ok(PersistencePair::new(dim, parse_f64(f[1])?, parse_f64(f[2])?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PersistenceDiagram::new(pairs))
}

/// Square CSV with a header of per-row labels (`name:state` or bare state).
pub fn diagram_matrix_csv(m: &DiagramDistanceMatrix, names: &[String]) -> String {
    let header: Vec<String> = names.to_vec();
    let mut out = header.join(",");
    out.push('\n');
    for row in &m.values {
        let line: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Rows `label,x,y` (further coordinates appended when present).
pub fn embedding_csv(e: &Embedding, labels: &[String]) -> String {
    let dims = e.points.first().map_or(2, Vec::len);
    let mut out = String::from("label,x,y");
    for k in 2..dims {
        let _ = write!(out, ",x{k}");
    }
    out.push('\n');
    for (p, l) in e.points.iter().zip(labels) {
        let coords: Vec<String> = p.iter().map(|&x| fmt_f64(x)).collect();
        let _ = writeln!(out, "{l},{}", coords.join(","));
    }
    out
}

pub fn write_signal(path: &Path, signal: &Signal) -> Result<()> {
    write_atomic(path, &signal_csv(signal))
}

pub fn read_signal(path: &Path, label: Option<DynamicState>) -> Result<Signal> {
    parse_signal_csv(&read(path)?, label)
}

pub fn read_distance(path: &Path) -> Result<(DistanceMatrix, Vec<String>)> {
    parse_distance_csv(&read(path)?)
}

pub fn read_diagram(path: &Path) -> Result<PersistenceDiagram> {
    parse_diagram_csv(&read(path)?)
}

pub fn read_network(edges: &Path, vertices: &Path) -> Result<WeightedNetwork> {
    parse_network_csv(&read(edges)?, &read(vertices)?)
}
