//! Command-line front end for the batch experiments.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wopn::dynsys::{self, add_noise, integrate, trim, DynamicState, NoiseSpec};
use wopn::experiment::{self, parse_snr, ExperimentConfig, Failure, Normalization};
use wopn::graphdist::DistanceMethod;
use wopn::{io, Error, Result};

#[derive(Parser)]
#[command(name = "wopn", version, about = "Weighted ordinal partition network persistence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one registry system, or export the registry as JSON.
    Simulate(SimulateArgs),
    /// Signal → network → distances → diagrams, writing every stage.
    Pipeline(RunArgs),
    /// Periodic/chaotic separation accuracy table.
    Detect(RunArgs),
    /// Normalized bottleneck distance under additive noise.
    Stability(RunArgs),
    /// Max D1 lifetime of cycle graphs under DD and SUPD.
    Cycle(RunArgs),
    /// DD diagrams over t = ratio × diameter.
    Tsweep(RunArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Print the registry as JSON and exit.
    #[arg(long)]
    registry: bool,
    #[arg(long, required_unless_present = "registry")]
    system: Option<String>,
    #[arg(long, default_value = "periodic")]
    state: DynamicState,
    #[arg(long)]
    fs: Option<f64>,
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long, default_value_t = 0.2)]
    keep: f64,
    /// Add bounded Gaussian noise at this SNR in dB (`inf` for none).
    #[arg(long, value_parser = parse_snr_arg)]
    snr: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    systems: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    states: Option<Vec<DynamicState>>,
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<DistanceMethod>>,
    #[arg(long)]
    normalization: Option<Normalization>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    tau: Option<usize>,
    #[arg(long)]
    fs: Option<f64>,
    #[arg(long)]
    t_multiplier: Option<f64>,
    /// Comma-separated SNR grid in dB; `inf` is the clean signal.
    #[arg(long, value_delimiter = ',', value_parser = parse_snr_arg)]
    snr: Option<Vec<f64>>,
    /// Use seeds 0..count.
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    ratios: Option<Vec<f64>>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    /// Skip the per-stage files of `pipeline`.
    #[arg(long)]
    no_intermediates: bool,
    /// Analyze this `time,value` CSV instead of simulating (pipeline only).
    #[arg(long)]
    signal: Option<PathBuf>,
}

fn parse_snr_arg(s: &str) -> std::result::Result<f64, String> {
    parse_snr(s).map_err(|e| e.to_string())
}

impl RunArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($field:ident, $cfg_field:ident) => {
                if let Some(v) = &self.$field {
                    cfg.$cfg_field = v.clone();
                }
            };
        }
        set!(out, out_dir);
        set!(systems, systems);
        set!(states, states);
        set!(methods, methods);
        set!(normalization, normalization);
        set!(n, n);
        set!(t_multiplier, t_multiplier);
        set!(snr, snr_db);
        set!(ratios, t_ratios);
        set!(n_min, cycle_n_min);
        set!(n_max, cycle_n_max);
        if self.tau.is_some() {
            cfg.tau = self.tau;
        }
        if self.fs.is_some() {
            cfg.fs = self.fs;
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        if let Some(k) = self.seeds {
            cfg.seeds = (0..k).collect();
        }
        if self.no_intermediates {
            cfg.write_intermediates = false;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    if args.registry {
        let text = serde_json::to_string_pretty(&dynsys::registry_json())? + "\n";
        return emit(args.out.as_deref(), &text);
    }
    let name = args.system.as_deref().expect("clap enforces --system");
    let spec = dynsys::lookup(name)?.with_state(args.state)?;
    let fs = args.fs.unwrap_or(spec.default_fs);
    let duration = args.duration.unwrap_or(750.0 * spec.default_tau as f64 / fs);
    let mut signal = trim(&integrate(&spec, duration, fs, &spec.initial_state, args.seed)?, args.keep)?;
    if let Some(snr) = args.snr {
        signal = add_noise(&signal, &NoiseSpec::new(snr, args.seed))?;
    }
    emit(args.out.as_deref(), &io::signal_csv(&signal))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => io::write_atomic(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Analyze one external signal with the configured pipeline settings.
fn pipeline_from_signal(cfg: &ExperimentConfig, path: &Path) -> Result<Vec<Failure>> {
    let signal = io::read_signal(path, None)?;
    let tau = cfg.tau.unwrap_or(50);
    let norms = cfg.normalization.variants();
    let a = experiment::analyze_signal(&signal, cfg.n, tau, &cfg.methods, norms, cfg.t_multiplier)?;
    let dir = &cfg.out_dir;
    io::write_atomic(&dir.join("sequence.csv"), &io::sequence_csv(&a.sequence))?;
    io::write_atomic(&dir.join("edges.csv"), &io::edges_csv(&a.network.graph))?;
    io::write_atomic(&dir.join("vertices.csv"), &io::vertices_csv(&a.network))?;
    let labels = a.network.labels();
    for m in &a.results {
        io::write_atomic(&dir.join(format!("distance_{}.csv", m.tag())), &io::distance_csv(&m.distance, &labels))?;
        io::write_atomic(&dir.join(format!("diagram_{}.csv", m.tag())), &io::diagram_csv(&m.diagram))?;
    }
    Ok(Vec::new())
}

fn run(cli: Cli) -> Result<Vec<Failure>> {
    match cli.command {
        Command::Simulate(a) => simulate(&a).map(|_| Vec::new()),
        Command::Pipeline(a) => {
            let cfg = a.config()?;
            match &a.signal {
                Some(p) => pipeline_from_signal(&cfg, p),
                None => Ok(experiment::run_pipeline(&cfg)?.failures),
            }
        }
        Command::Detect(a) => {
            let out = experiment::run_state_detection(&a.config()?)?;
            print!("{}", out.value.csv());
            Ok(out.failures)
        }
        Command::Stability(a) => Ok(experiment::run_stability(&a.config()?)?.failures),
        Command::Cycle(a) => Ok(experiment::run_cycle_analysis(&a.config()?)?.failures),
        Command::Tsweep(a) => Ok(experiment::run_t_sweep(&a.config()?)?.failures),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (error, failures) = match run(cli) {
        Ok(f) if f.is_empty() => return ExitCode::SUCCESS,
        Ok(f) => (None, f),
        Err(e) => (Some(e), Vec::new()),
    };
    let summary = serde_json::json!({
        "error": error.as_ref().map(Error::to_string),
        "failures": failures,
    });
    eprintln!("{summary}");
    ExitCode::FAILURE
}
