//! Batch experiments: the full pipeline, state detection, noise stability,
//! cycle-graph curves and the random-walk step sweep.
//!
//! Every experiment is driven by an [`ExperimentConfig`], writes its results
//! under the configured output directory and is deterministic: rows are
//! sorted by (system, state, method, parameter) regardless of scheduling.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::analysis::{mds_embed, separation_accuracy};
use crate::diagmetric::{normalized_bottleneck, pairwise_bottleneck, DiagramDistanceMatrix};
use crate::dynsys::{self, add_noise, integrate, trim, DynamicState, NoiseSpec, Signal, SystemSpec};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::graphdist::{diffusion_distance, normalize, shortest_unweighted_path, DistanceMatrix, DistanceMethod};
use crate::io;
use crate::opn::{build_network, embed, PermutationSequence, WeightedNetwork};
use crate::persistence::{count_pairs, max_lifetime, rips_persistence, PersistenceDiagram};

/// Which distance matrices enter the persistence step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Standard,
    Normalized,
    Both,
}

impl Normalization {
    pub fn variants(self) -> &'static [bool] {
        match self {
            Normalization::Standard => &[false],
            Normalization::Normalized => &[true],
            Normalization::Both => &[false, true],
        }
    }
}

impl std::str::FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Normalization::Standard),
            "normalized" => Ok(Normalization::Normalized),
            "both" => Ok(Normalization::Both),
            _ => Err(Error::Parse(format!("normalization must be standard, normalized or both, got `{s}`"))),
        }
    }
}

/// SNR grid entries are numbers, or the string `"inf"` for the clean signal.
fn ser_snr<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        if x.is_infinite() {
            seq.serialize_element("inf")?;
        } else {
            seq.serialize_element(x)?;
        }
    }
    seq.end()
}

fn de_snr<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Num(f64),
        Text(String),
    }
    Vec::<Entry>::deserialize(d)?
        .into_iter()
        .map(|e| match e {
            Entry::Num(x) => Ok(x),
            Entry::Text(t) => parse_snr(&t).map_err(serde::de::Error::custom),
        })
        .collect()
}

pub fn parse_snr(s: &str) -> Result<f64> {
    match s.trim() {
        "inf" | "Inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        t => t.parse().map_err(|_| Error::Parse(format!("bad SNR `{t}`"))),
    }
}

fn default_systems() -> Vec<String> {
    dynsys::registry().into_iter().map(|s| s.name).collect()
}

fn default_snr() -> Vec<f64> {
    vec![f64::INFINITY, 40.0, 35.0, 30.0, 25.0, 20.0, 15.0]
}

/// JSON experiment configuration; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub systems: Vec<String>,
    /// States simulated by `pipeline`, `detect` and `tsweep`.
    pub states: Vec<DynamicState>,
    /// Embedding dimension.
    pub n: usize,
    /// Delay applied to every system; falls back to each system's default.
    pub tau: Option<usize>,
    /// Per-system delay, taking precedence over `tau`.
    pub tau_by_system: BTreeMap<String, usize>,
    pub fs: Option<f64>,
    /// Simulated seconds; defaults to `750 * tau / fs`.
    pub duration_s: Option<f64>,
    pub keep_fraction: f64,
    /// Seed perturbing the initial condition, 0 for the registry default.
    pub initial_seed: u64,
    pub methods: Vec<DistanceMethod>,
    pub normalization: Normalization,
    /// DD uses `t = ceil(t_multiplier * diameter)`.
    pub t_multiplier: f64,
    #[serde(serialize_with = "ser_snr", deserialize_with = "de_snr")]
    pub snr_db: Vec<f64>,
    pub noise_seed: u64,
    /// States whose signals are perturbed in `stability`.
    pub stability_states: Vec<DynamicState>,
    /// Seeds for the repeated MDS + SVM separation.
    pub seeds: Vec<u64>,
    pub t_ratios: Vec<f64>,
    pub cycle_n_min: usize,
    pub cycle_n_max: usize,
    /// Significant D1 points have lifetime above this fraction of the max.
    pub significance: f64,
    /// Write every intermediate stage of `pipeline` to disk.
    pub write_intermediates: bool,
    pub threads: Option<usize>,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            systems: default_systems(),
            states: DynamicState::ALL.to_vec(),
            n: 6,
            tau: None,
            tau_by_system: BTreeMap::new(),
            fs: None,
            duration_s: None,
            keep_fraction: 0.2,
            initial_seed: 0,
            methods: DistanceMethod::ALL.to_vec(),
            normalization: Normalization::Both,
            t_multiplier: 2.0,
            snr_db: default_snr(),
            noise_seed: 1,
            stability_states: vec![DynamicState::Periodic],
            seeds: (0..100).collect(),
            t_ratios: vec![1.0, 2.0, 3.0, 4.0, 5.0],
            cycle_n_min: 3,
            cycle_n_max: 100,
            significance: 0.1,
            write_intermediates: true,
            threads: None,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ExperimentConfig::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(serde_json::to_vec(self).expect("config serializes"));
        digest.iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.n < 2 {
            return fail(format!("embedding dimension must be at least 2, got {}", self.n));
        }
        if self.methods.is_empty() {
            return fail("method list is empty".into());
        }
        if !(self.t_multiplier > 0.0 && self.t_multiplier.is_finite()) {
            return fail(format!("t multiplier must be positive, got {}", self.t_multiplier));
        }
        if !(self.keep_fraction > 0.0 && self.keep_fraction <= 1.0) {
            return fail(format!("keep fraction must lie in (0, 1], got {}", self.keep_fraction));
        }
        if self.tau == Some(0) || self.tau_by_system.values().any(|&t| t == 0) {
            return fail("tau must be at least 1".into());
        }
        if self.fs.is_some_and(|f| !(f > 0.0 && f.is_finite())) {
            return fail("fs must be positive".into());
        }
        if self.duration_s.is_some_and(|d| !(d > 0.0 && d.is_finite())) {
            return fail("duration must be positive".into());
        }
        if self.systems.is_empty() {
            return fail("system list is empty".into());
        }
        if self.states.is_empty() {
            return fail("state list is empty".into());
        }
        if self.snr_db.iter().any(|s| s.is_nan()) {
            return fail("SNR grid contains NaN".into());
        }
        if let Some(r) = self.t_ratios.iter().find(|&&r| !(r >= 1.0 && r.is_finite())) {
            return fail(format!("t ratios must be at least 1, got {r}"));
        }
        if !(0.0..1.0).contains(&self.significance) {
            return fail(format!("significance fraction must lie in [0, 1), got {}", self.significance));
        }
        if self.threads == Some(0) {
            return fail("threads must be at least 1".into());
        }
        for name in &self.systems {
            dynsys::lookup(name)?;
        }
        Ok(())
    }

    fn norms(&self) -> &'static [bool] {
        self.normalization.variants()
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = self.threads {
            b = b.num_threads(t);
        }
        b.build().map_err(|e| Error::Config(format!("thread pool: {e}")))
    }

    fn tau_for(&self, spec: &SystemSpec) -> usize {
        self.tau_by_system
            .get(&spec.name)
            .copied()
            .or(self.tau)
            .unwrap_or(spec.default_tau)
    }

    /// Simulate and trim one registry system in one state.
    pub fn simulate(&self, name: &str, state: DynamicState) -> Result<Signal> {
        let base = dynsys::lookup(name)?;
        let spec = base.with_state(state)?;
        let tau = self.tau_for(&spec);
        let fs = self.fs.unwrap_or(spec.default_fs);
        let duration = self.duration_s.unwrap_or(750.0 * tau as f64 / fs);
        let signal = integrate(&spec, duration, fs, &spec.initial_state, self.initial_seed)?;
        trim(&signal, self.keep_fraction)
    }
}

/// One distance matrix and its diagram.
#[derive(Debug, Clone)]
pub struct MethodResult {
    pub method: DistanceMethod,
    pub normalized: bool,
    pub distance: DistanceMatrix,
    pub diagram: PersistenceDiagram,
}

impl MethodResult {
    pub fn tag(&self) -> String {
        method_tag(self.method, self.normalized)
    }
}

fn method_tag(method: DistanceMethod, normalized: bool) -> String {
    if normalized {
        format!("{method}_normalized")
    } else {
        method.to_string()
    }
}

/// Every stage for one signal.
#[derive(Debug, Clone)]
pub struct SignalAnalysis {
    pub sequence: PermutationSequence,
    pub network: WeightedNetwork,
    pub diameter: usize,
    /// DD step count used, if DD was requested.
    pub t_steps: usize,
    pub results: Vec<MethodResult>,
}

impl SignalAnalysis {
    pub fn get(&self, method: DistanceMethod, normalized: bool) -> Option<&MethodResult> {
        self.results.iter().find(|r| r.method == method && r.normalized == normalized)
    }
}

/// `ceil(multiplier * diameter)`, at least 1.
pub fn t_for(diameter: usize, multiplier: f64) -> usize {
    ((multiplier * diameter as f64 - 1e-9).ceil() as usize).max(1)
}

/// Signal → permutations → network → distances → diagrams.
pub fn analyze_signal(
    signal: &Signal,
    n: usize,
    tau: usize,
    methods: &[DistanceMethod],
    norms: &[bool],
    t_multiplier: f64,
) -> Result<SignalAnalysis> {
    let sequence = embed(signal, n, tau)?;
    let network = build_network(&sequence)?;
    let graph = &network.graph;
    let diameter = graph.diameter()?;
    let t_steps = t_for(diameter, t_multiplier);
    let mut results = Vec::new();
    for &method in methods {
        let raw = method.compute(graph, Some(t_steps))?;
        for &normalized in norms {
            let distance = if normalized { normalize(&raw)? } else { raw.clone() };
            let diagram = rips_persistence(&distance, 1)?;
            results.push(MethodResult {
                method,
                normalized,
                distance,
                diagram,
            });
        }
    }
    Ok(SignalAnalysis {
        sequence,
        network,
        diameter,
        t_steps,
        results,
    })
}

/// A failed work item in a batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub item: String,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct SystemRun {
    pub system: String,
    pub state: DynamicState,
    pub signal: Signal,
    pub analysis: SignalAnalysis,
}

impl SystemRun {
    pub fn item(&self) -> String {
        format!("{}:{}", self.system, self.state)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub system: String,
    pub state: DynamicState,
    pub method: DistanceMethod,
    pub normalized: bool,
    pub vertices: usize,
    pub edges: usize,
    pub diameter: usize,
    pub t_steps: Option<usize>,
    pub max_lifetime: f64,
    pub pairs: usize,
    pub significant: usize,
}

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub runs: Vec<SystemRun>,
    pub failures: Vec<Failure>,
    pub summary: Vec<SummaryRow>,
}

fn work_items(cfg: &ExperimentConfig, states: &[DynamicState]) -> Vec<(String, DynamicState)> {
    let mut items: Vec<(String, DynamicState)> = cfg
        .systems
        .iter()
        .flat_map(|s| states.iter().map(move |&st| (s.clone(), st)))
        .collect();
    items.sort();
    items.dedup();
    items
}

fn run_item(cfg: &ExperimentConfig, system: &str, state: DynamicState) -> Result<SystemRun> {
    let signal = cfg.simulate(system, state)?;
    let tau = cfg.tau_for(&dynsys::lookup(system)?);
    let analysis = analyze_signal(&signal, cfg.n, tau, &cfg.methods, cfg.norms(), cfg.t_multiplier)?;
    Ok(SystemRun {
        system: system.to_string(),
        state,
        signal,
        analysis,
    })
}

/// Simulate and analyze every configured system and state. Per-item
/// failures are collected rather than aborting the batch.
pub fn run_pipeline_in_memory(cfg: &ExperimentConfig) -> Result<PipelineReport> {
    cfg.validate()?;
    let items = work_items(cfg, &cfg.states);
    let outcomes: Vec<(String, Result<SystemRun>)> = cfg.pool()?.install(|| {
        items
            .par_iter()
            .map(|(sys, st)| (format!("{sys}:{st}"), run_item(cfg, sys, *st)))
            .collect()
    });
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for (item, outcome) in outcomes {
        match outcome {
            Ok(r) => runs.push(r),
            Err(e) => failures.push(Failure {
                item,
                error: e.to_string(),
            }),
        }
    }
    let summary = runs
        .iter()
        .flat_map(|r| {
            r.analysis.results.iter().map(move |m| SummaryRow {
                system: r.system.clone(),
                state: r.state,
                method: m.method,
                normalized: m.normalized,
                vertices: r.analysis.network.vertex_count(),
                edges: r.analysis.network.graph.edge_count(),
                diameter: r.analysis.diameter,
                t_steps: (m.method == DistanceMethod::Dd).then_some(r.analysis.t_steps),
                max_lifetime: max_lifetime(&m.diagram, 1),
                pairs: count_pairs(&m.diagram, 1),
                significant: m.diagram.significant_count(1, cfg.significance),
            })
        })
        .collect();
    Ok(PipelineReport {
        runs,
        failures,
        summary,
    })
}

/// Output files written by an experiment, relative to the output directory.
#[derive(Debug, Default)]
struct Outputs {
    root: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    fn new(root: &Path) -> Self {
        Outputs {
            root: root.to_path_buf(),
            files: Vec::new(),
        }
    }

    fn write(&mut self, rel: impl AsRef<Path>, contents: &str) -> Result<()> {
        let rel = rel.as_ref();
        io::write_atomic(&self.root.join(rel), contents)?;
        self.files.push(rel.to_string_lossy().replace('\\', "/"));
        Ok(())
    }

    fn finish(mut self, command: &str, cfg: &ExperimentConfig, failures: &[Failure]) -> Result<Vec<String>> {
        self.files.sort();
        let manifest = serde_json::json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "config_sha256": cfg.hash(),
            "config": cfg,
            "outputs": self.files,
            "failures": failures,
        });
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        io::write_atomic(&self.root.join("manifest.json"), &text)?;
        Ok(self.files)
    }
}

fn fmt_opt(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("system,state,method,normalized,vertices,edges,diameter,t_steps,max_lifetime,pairs,significant\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.system,
            r.state,
            r.method,
            r.normalized,
            r.vertices,
            r.edges,
            r.diameter,
            fmt_opt(r.t_steps),
            r.max_lifetime,
            r.pairs,
            r.significant
        );
    }
    out
}

fn write_run(out: &mut Outputs, run: &SystemRun) -> Result<()> {
    let dir = PathBuf::from(&run.system).join(run.state.as_str());
    let a = &run.analysis;
    out.write(dir.join("signal.csv"), &io::signal_csv(&run.signal))?;
    out.write(dir.join("sequence.csv"), &io::sequence_csv(&a.sequence))?;
    out.write(dir.join("edges.csv"), &io::edges_csv(&a.network.graph))?;
    out.write(dir.join("vertices.csv"), &io::vertices_csv(&a.network))?;
    let labels = a.network.labels();
    for m in &a.results {
        out.write(dir.join(format!("distance_{}.csv", m.tag())), &io::distance_csv(&m.distance, &labels))?;
        out.write(dir.join(format!("diagram_{}.csv", m.tag())), &io::diagram_csv(&m.diagram))?;
    }
    Ok(())
}

/// Result of a batch subcommand: its rows are on disk, failures listed.
#[derive(Debug)]
pub struct RunOutcome<T> {
    pub value: T,
    pub failures: Vec<Failure>,
    pub files: Vec<String>,
}

/// Full pipeline with every intermediate written under `out_dir`.
pub fn run_pipeline(cfg: &ExperimentConfig) -> Result<RunOutcome<PipelineReport>> {
    let report = run_pipeline_in_memory(cfg)?;
    let mut out = Outputs::new(&cfg.out_dir);
    if cfg.write_intermediates {
        for run in &report.runs {
            write_run(&mut out, run)?;
        }
    }
    out.write("summary.csv", &summary_csv(&report.summary))?;
    let files = out.finish("pipeline", cfg, &report.failures)?;
    Ok(RunOutcome {
        failures: report.failures.clone(),
        value: report,
        files,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyRow {
    pub method: DistanceMethod,
    pub normalized: bool,
    pub mean: f64,
    pub std: f64,
    pub seeds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionTable {
    pub rows: Vec<AccuracyRow>,
    /// Training accuracy of always predicting the larger class.
    pub majority_baseline: f64,
    pub diagrams: usize,
}

impl DetectionTable {
    pub fn get(&self, method: DistanceMethod, normalized: bool) -> Option<&AccuracyRow> {
        self.rows.iter().find(|r| r.method == method && r.normalized == normalized)
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("method,normalized,mean,std,seeds\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{},{}", r.method, r.normalized, r.mean, r.std, r.seeds);
        }
        out
    }
}

/// Bottleneck matrices over all runs for each (method, normalization).
pub fn diagram_matrices(
    runs: &[SystemRun],
    methods: &[DistanceMethod],
    norms: &[bool],
) -> Result<Vec<(DistanceMethod, bool, DiagramDistanceMatrix)>> {
    let labels: Vec<DynamicState> = runs.iter().map(|r| r.state).collect();
    let mut out = Vec::new();
    for &method in methods {
        for &normalized in norms {
            let diagrams = runs
                .iter()
                .map(|r| {
                    r.analysis
                        .get(method, normalized)
                        .map(|m| m.diagram.clone())
                        .ok_or_else(|| Error::InvalidInput(format!("{} has no {method} diagram", r.item())))
                })
                .collect::<Result<Vec<_>>>()?;
            out.push((method, normalized, pairwise_bottleneck(&diagrams, &labels)?));
        }
    }
    Ok(out)
}

/// Periodic/chaotic separation accuracy for every method and normalization.
pub fn run_state_detection(cfg: &ExperimentConfig) -> Result<RunOutcome<DetectionTable>> {
    if cfg.seeds.is_empty() {
        return Err(Error::Config("detection needs at least one seed".into()));
    }
    let report = run_pipeline_in_memory(cfg)?;
    if let Some(f) = report.failures.first() {
        return Err(Error::InvalidInput(format!("{} failed: {}", f.item, f.error)));
    }
    let runs = &report.runs;
    let names: Vec<String> = runs.iter().map(SystemRun::item).collect();
    let matrices = cfg.pool()?.install(|| diagram_matrices(runs, &cfg.methods, cfg.norms()))?;

    let mut out = Outputs::new(&cfg.out_dir);
    let mut rows = Vec::new();
    for (method, normalized, m) in &matrices {
        let (mean, std) = separation_accuracy(m, &cfg.seeds)?;
        rows.push(AccuracyRow {
            method: *method,
            normalized: *normalized,
            mean,
            std,
            seeds: cfg.seeds.len(),
        });
        let tag = method_tag(*method, *normalized);
        out.write(format!("bottleneck_{tag}.csv"), &io::diagram_matrix_csv(m, &names))?;
        let emb = mds_embed(m, 2, cfg.seeds[0])?;
        out.write(format!("embedding_{tag}.csv"), &io::embedding_csv(&emb, &names))?;
    }
    let periodic = runs.iter().filter(|r| r.state == DynamicState::Periodic).count();
    let majority = periodic.max(runs.len() - periodic) as f64 / runs.len() as f64;
    let table = DetectionTable {
        rows,
        majority_baseline: majority,
        diagrams: runs.len(),
    };
    out.write("summary.csv", &summary_csv(&report.summary))?;
    out.write("detection.csv", &table.csv())?;
    out.write("detection.json", &(serde_json::to_string_pretty(&table)? + "\n"))?;
    let files = out.finish("detect", cfg, &[])?;
    Ok(RunOutcome {
        value: table,
        failures: Vec::new(),
        files,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityRow {
    pub system: String,
    pub method: DistanceMethod,
    pub snr_db: f64,
    pub d_star_b: f64,
}

fn fmt_snr(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        x.to_string()
    }
}

pub fn stability_csv(rows: &[StabilityRow]) -> String {
    let mut out = String::from("system,method,snr_db,d_star_b\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.system, r.method, fmt_snr(r.snr_db), r.d_star_b);
    }
    out
}

/// Normalized bottleneck distance between the clean and noisy D1 of one
/// system, for every method and SNR in the grid. Distances are not
/// max-normalized here; the normalization of d*_B already removes scale.
pub fn stability_curve(cfg: &ExperimentConfig, system: &str, state: DynamicState) -> Result<Vec<StabilityRow>> {
    let signal = cfg.simulate(system, state)?;
    let tau = cfg.tau_for(&dynsys::lookup(system)?);
    let analyze = |s: &Signal| analyze_signal(s, cfg.n, tau, &cfg.methods, &[false], cfg.t_multiplier);
    let clean = analyze(&add_noise(&signal, &NoiseSpec::new(f64::INFINITY, cfg.noise_seed))?)?;
    let noisy = cfg
        .snr_db
        .par_iter()
        .map(|&snr| Ok((snr, analyze(&add_noise(&signal, &NoiseSpec::new(snr, cfg.noise_seed))?)?)))
        .collect::<Result<Vec<_>>>()?;
    let label = if cfg.stability_states.len() > 1 {
        format!("{system}:{state}")
    } else {
        system.to_string()
    };
    let mut rows = Vec::new();
    for &method in &cfg.methods {
        let reference = clean.get(method, false).expect("method computed").diagram.finite_in(1);
        for (snr, a) in &noisy {
            let other = a.get(method, false).expect("method computed").diagram.finite_in(1);
            rows.push(StabilityRow {
                system: label.clone(),
                method,
                snr_db: *snr,
                d_star_b: normalized_bottleneck(&reference, &other)?,
            });
        }
    }
    Ok(rows)
}

pub fn run_stability(cfg: &ExperimentConfig) -> Result<RunOutcome<Vec<StabilityRow>>> {
    cfg.validate()?;
    if cfg.snr_db.is_empty() {
        return Err(Error::Config("SNR grid is empty".into()));
    }
    let items = work_items(cfg, &cfg.stability_states);
    let outcomes: Vec<(String, Result<Vec<StabilityRow>>)> = cfg.pool()?.install(|| {
        items
            .par_iter()
            .map(|(sys, st)| (format!("{sys}:{st}"), stability_curve(cfg, sys, *st)))
            .collect()
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (item, o) in outcomes {
        match o {
            Ok(r) => rows.extend(r),
            Err(e) => failures.push(Failure {
                item,
                error: e.to_string(),
            }),
        }
    }
    let mut out = Outputs::new(&cfg.out_dir);
    out.write("stability.csv", &stability_csv(&rows))?;
    let files = out.finish("stability", cfg, &failures)?;
    Ok(RunOutcome {
        value: rows,
        failures,
        files,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleRow {
    pub n: usize,
    pub dd_max_l1: f64,
    pub supd_max_l1: f64,
}

/// Max D1 lifetime of the uniform cycle graph C_n under DD (t = 2d) and SUPD.
pub fn cycle_row(n: usize, t_multiplier: f64) -> Result<CycleRow> {
    let g = WeightedGraph::cycle(n, 1);
    let t = t_for(g.diameter()?, t_multiplier);
    let dd = rips_persistence(&diffusion_distance(&g, t)?, 1)?;
    let supd = rips_persistence(&shortest_unweighted_path(&g)?, 1)?;
    Ok(CycleRow {
        n,
        dd_max_l1: max_lifetime(&dd, 1),
        supd_max_l1: max_lifetime(&supd, 1),
    })
}

pub fn cycle_curve(n_min: usize, n_max: usize, t_multiplier: f64) -> Result<Vec<CycleRow>> {
    if n_min < 3 || n_min > n_max {
        return Err(Error::Config(format!("cycle range needs 3 <= n_min <= n_max, got {n_min}..{n_max}")));
    }
    (n_min..=n_max).into_par_iter().map(|n| cycle_row(n, t_multiplier)).collect()
}

pub fn cycle_csv(rows: &[CycleRow]) -> String {
    let mut out = String::from("n,dd_maxL1,supd_maxL1\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.n, r.dd_max_l1, r.supd_max_l1);
    }
    out
}

pub fn run_cycle_analysis(cfg: &ExperimentConfig) -> Result<RunOutcome<Vec<CycleRow>>> {
    let rows = cfg
        .pool()?
        .install(|| cycle_curve(cfg.cycle_n_min, cfg.cycle_n_max, cfg.t_multiplier))?;
    let mut out = Outputs::new(&cfg.out_dir);
    out.write("cycle.csv", &cycle_csv(&rows))?;
    let files = out.finish("cycle", cfg, &[])?;
    Ok(RunOutcome {
        value: rows,
        failures: Vec::new(),
        files,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    /// `name:state`, or `mean` for the cross-system average.
    pub system: String,
    pub ratio: f64,
    /// Step count; empty for the mean rows.
    pub t_steps: Option<usize>,
    pub max_l1: f64,
    pub pairs: f64,
}

fn sweep_item(cfg: &ExperimentConfig, system: &str, state: DynamicState) -> Result<Vec<SweepRow>> {
    let signal = cfg.simulate(system, state)?;
    let tau = cfg.tau_for(&dynsys::lookup(system)?);
    let net = build_network(&embed(&signal, cfg.n, tau)?)?;
    let d = net.graph.diameter()?;
    cfg.t_ratios
        .iter()
        .map(|&ratio| {
            let t = t_for(d, ratio);
            let diag = rips_persistence(&diffusion_distance(&net.graph, t)?, 1)?;
            Ok(SweepRow {
                system: format!("{system}:{state}"),
                ratio,
                t_steps: Some(t),
                max_l1: max_lifetime(&diag, 1),
                pairs: count_pairs(&diag, 1) as f64,
            })
        })
        .collect()
}

/// DD diagrams at `t = ceil(ratio * d)` for every ratio, plus the mean over
/// systems per ratio.
pub fn run_t_sweep(cfg: &ExperimentConfig) -> Result<RunOutcome<Vec<SweepRow>>> {
    cfg.validate()?;
    if cfg.t_ratios.is_empty() {
        return Err(Error::Config("t ratio list is empty".into()));
    }
    let items = work_items(cfg, &cfg.states);
    let outcomes: Vec<(String, Result<Vec<SweepRow>>)> = cfg.pool()?.install(|| {
        items
            .par_iter()
            .map(|(sys, st)| (format!("{sys}:{st}"), sweep_item(cfg, sys, *st)))
            .collect()
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (item, o) in outcomes {
        match o {
            Ok(r) => rows.extend(r),
            Err(e) => failures.push(Failure {
                item,
                error: e.to_string(),
            }),
        }
    }
    let mut means = Vec::new();
    for &ratio in &cfg.t_ratios {
        let sel: Vec<&SweepRow> = rows.iter().filter(|r| r.ratio == ratio).collect();
        if sel.is_empty() {
            continue;
        }
        let k = sel.len() as f64;
        means.push(SweepRow {
            system: "mean".into(),
            ratio,
            t_steps: None,
            max_l1: sel.iter().map(|r| r.max_l1).sum::<f64>() / k,
            pairs: sel.iter().map(|r| r.pairs).sum::<f64>() / k,
        });
    }
    rows.extend(means);
    let mut csv = String::from("system,ratio,t_steps,max_L1,pairs\n");
    for r in &rows {
        let _ = writeln!(csv, "{},{},{},{},{}", r.system, r.ratio, fmt_opt(r.t_steps), r.max_l1, r.pairs);
    }
    let mut out = Outputs::new(&cfg.out_dir);
    out.write("tsweep.csv", &csv)?;
    let files = out.finish("tsweep", cfg, &failures)?;
    Ok(RunOutcome {
        value: rows,
        failures,
        files,
    })
}
