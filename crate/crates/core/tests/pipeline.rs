use std::fs;
use std::path::Path;
use std::process::Command;

use wopn::dynsys::DynamicState;
use wopn::experiment::{self, ExperimentConfig, Normalization};
use wopn::graphdist::{normalize, DistanceMethod};
use wopn::io;
use wopn::persistence::rips_persistence;

fn small_config(out: &Path) -> ExperimentConfig {
    ExperimentConfig {
        systems: vec!["rossler".into(), "lorenz".into()],
        states: vec![DynamicState::Periodic],
        n: 4,
        methods: vec![DistanceMethod::Supd, DistanceMethod::Dd],
        normalization: Normalization::Both,
        out_dir: out.to_path_buf(),
        ..ExperimentConfig::default()
    }
}

fn read_tree(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = experiment::run_pipeline(&small_config(a.path())).unwrap();
    experiment::run_pipeline(&ExperimentConfig { threads: Some(1), ..small_config(b.path()) }).unwrap();
    assert!(ra.failures.is_empty());
    let ta = read_tree(a.path());
    let tb = read_tree(b.path());
    assert_eq!(ta.iter().map(|f| &f.0).collect::<Vec<_>>(), tb.iter().map(|f| &f.0).collect::<Vec<_>>());
    for ((name, x), (_, y)) in ta.iter().zip(&tb) {
        if name != "manifest.json" {
            assert_eq!(x, y, "{name} differs");
        }
    }
}

#[test]
fn stages_can_resume_from_written_intermediates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let report = experiment::run_pipeline(&cfg).unwrap().value;
    let run = &report.runs[0];
    let base = dir.path().join(&run.system).join("periodic");

    let signal = io::read_signal(&base.join("signal.csv"), None).unwrap();
    assert_eq!(signal.samples, run.signal.samples);

    let net = io::read_network(&base.join("edges.csv"), &base.join("vertices.csv")).unwrap();
    assert_eq!(net.graph.edges(), run.analysis.network.graph.edges());

    for m in &run.analysis.results {
        let (d, labels) = io::read_distance(&base.join(format!("distance_{}.csv", m.tag()))).unwrap();
        assert_eq!(labels, run.analysis.network.labels());
        assert_eq!(d.values, m.distance.values);
        let diag = io::read_diagram(&base.join(format!("diagram_{}.csv", m.tag()))).unwrap();
        assert_eq!(diag, rips_persistence(&d, 1).unwrap());
        if !m.normalized {
            let raw = m.method.compute(&net.graph, Some(run.analysis.t_steps)).unwrap();
            assert_eq!(raw.values, d.values);
            let norm = run.analysis.get(m.method, true).unwrap();
            assert_eq!(normalize(&raw).unwrap().values, norm.distance.values);
        }
    }
}

#[test]
fn failures_are_collected_per_item() {
    let dir = tempfile::tempdir().unwrap();
    // n = 9 with tau = 50 needs more samples than the short run provides.
    let cfg = ExperimentConfig {
        systems: vec!["rossler".into()],
        duration_s: Some(20.0),
        ..small_config(dir.path())
    };
    let out = experiment::run_pipeline(&cfg).unwrap();
    assert_eq!(out.failures.len(), 1);
    assert_eq!(out.failures[0].item, "rossler:periodic");
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["failures"].as_array().unwrap().len(), 1);
}

fn wopn() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wopn"))
}

#[test]
fn cli_cycle_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let status = wopn()
        .args(["cycle", "--n-min", "3", "--n-max", "12", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(dir.path().join("cycle.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,dd_maxL1,supd_maxL1"));
    assert_eq!(lines.count(), 10);
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "cycle");
    assert_eq!(manifest["config"]["cycle_n_max"], 12);
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn cli_reports_errors_with_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = wopn().args(["pipeline", "--systems", "nope", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("nope"));

    let out = wopn().args(["pipeline", "--methods", "XYZ"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"n": 6, "bogus": 1}"#).unwrap();
    let out = wopn().args(["cycle", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cli_simulate_matches_library() {
    let out = wopn().args(["simulate", "--system", "rossler", "--state", "chaotic"]).output().unwrap();
    assert!(out.status.success());
    let cli = io::parse_signal_csv(std::str::from_utf8(&out.stdout).unwrap(), None).unwrap();
    let lib = ExperimentConfig::default().simulate("rossler", DynamicState::Chaotic).unwrap();
    assert_eq!(cli.samples, lib.samples);

    let out = wopn().args(["simulate", "--registry"]).output().unwrap();
    let reg: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(reg["systems"].as_array().map(Vec::len), Some(6));
}

#[test]
fn cli_pipeline_accepts_external_signal() {
    let dir = tempfile::tempdir().unwrap();
    let sig = ExperimentConfig::default().simulate("rossler", DynamicState::Periodic).unwrap();
    let path = dir.path().join("in.csv");
    io::write_signal(&path, &sig).unwrap();
    let out_dir = dir.path().join("out");
    let status = wopn()
        .args(["pipeline", "--n", "4", "--methods", "SUPD", "--normalization", "standard", "--signal"])
        .arg(&path)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out_dir.join("diagram_SUPD.csv").exists());
    assert!(!out_dir.join("diagram_SUPD_normalized.csv").exists());
}
