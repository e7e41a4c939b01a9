//! Continuous dynamical systems, fixed-step RK4 simulation and bounded noise.
//!
//! # Registry
//!
//! Every entry carries one periodic and one chaotic parameterization. The
//! equations of motion are the published ones; the regime parameters were
//! picked from their bifurcation structure and verified as described below.
//! All systems are sampled so that a delay of 50 samples is appropriate,
//! and are simulated for `750 * tau / fs` seconds.
//!
//! | name | equations | periodic | chaotic | fs (Hz) | source |
//! |------|-----------|----------|---------|---------|--------|
//! | `lorenz` | x' = σ(y − x), y' = x(ρ − z) − y, z' = xy − βz; σ = 10, β = 8/3 | ρ = 100 | ρ = 105 | 190 | Lorenz, J. Atmos. Sci. 20 (1963); ρ = 100 is the period-2 window, Sparrow, *The Lorenz Equations* (1982) |
//! | `rossler` | x' = −y − z, y' = x + ay, z' = b + z(x − c); b = 0.2, c = 14 | a = 0.10 | a = 0.15 | 32 | Rössler, Phys. Lett. A 57 (1976) |
//! | `chens_system` | x' = a(y − x), y' = (c − a)x − xz + cy, z' = xy − bz; a = 35, b = 3 | c = 30 | c = 28 | 360 | Chen & Ueta, Int. J. Bifurc. Chaos 9 (1999) |
//! | `rucklidge_attractor` | x' = −kx + λy − yz, y' = x, z' = −z + y²; k = 2 | λ = 3.5 | λ = 6.7 | 25 | Rucklidge, J. Fluid Mech. 237 (1992) |
//! | `driven_van_der_pol_oscillator` | x' = y, y' = −x + b(1 − x²)y + A sin(ωt); b = 3, A = 5 | ω = 1.5 | ω = 1.788 | 46 | Parlitz & Lauterborn, Phys. Rev. A 36 (1987) |
//! | `forced_brusselator` | x' = a + x²y − (b + 1)x + A cos(ωt), y' = bx − x²y; a = 0.4, b = 1.2, A = 0.05 | ω = 1.1 | ω = 0.8 | 14 | Tomita & Kai, J. Stat. Phys. 21 (1979) |
//!
//! Each regime label was checked numerically: periodic entries have a
//! repeating sequence of maxima and a non-positive largest Lyapunov
//! exponent, chaotic ones a positive exponent (the Brusselator's is small,
//! about 0.014, between its period-8 and period-24 windows). Sample rates put
//! 50 samples near a quarter of the mean oscillation period.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Right-hand side `f(params, t, state) -> dstate`, written into `out`.
///
/// `params` holds the parameter values in the order of
/// [`SystemSpec::param_order`].
pub type VectorField = fn(params: &[f64], t: f64, state: &[f64], out: &mut [f64]);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DynamicState {
    Periodic,
    Chaotic,
}

impl DynamicState {
    pub const ALL: [DynamicState; 2] = [DynamicState::Periodic, DynamicState::Chaotic];

    pub fn as_str(self) -> &'static str {
        match self {
            DynamicState::Periodic => "periodic",
            DynamicState::Chaotic => "chaotic",
        }
    }
}

impl std::fmt::Display for DynamicState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DynamicState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(DynamicState::Periodic),
            "chaotic" => Ok(DynamicState::Chaotic),
            other => Err(Error::Parse(format!("unknown dynamic state `{other}`"))),
        }
    }
}

/// Parameter overrides that put a system into a given dynamic state.
#[derive(Debug, Clone, Serialize)]
pub struct Regime {
    pub label: DynamicState,
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SystemSpec {
    pub name: String,
    pub dimension: usize,
    pub params: BTreeMap<String, f64>,
    #[serde(skip)]
    pub param_order: &'static [&'static str],
    pub regimes: Vec<Regime>,
    pub initial_state: Vec<f64>,
    /// Index of the state component returned as the observation.
    pub observed: usize,
    pub drive: Option<String>,
    pub default_tau: usize,
    pub default_fs: f64,
    pub source: String,
    /// Set once a regime has been applied with [`SystemSpec::with_state`].
    pub label: Option<DynamicState>,
    #[serde(skip)]
    pub rhs: VectorField,
}

impl SystemSpec {
    /// Copy of this spec with the parameters of `state` applied.
    pub fn with_state(&self, state: DynamicState) -> Result<SystemSpec> {
        let regime = self
            .regimes
            .iter()
            .find(|r| r.label == state)
            .ok_or_else(|| Error::InvalidInput(format!("{} has no {state} regime", self.name)))?;
        let mut spec = self.clone();
        for (k, v) in &regime.params {
            spec.params.insert(k.clone(), *v);
        }
        spec.label = Some(state);
        Ok(spec)
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    /// Simulation length used for registry runs: `750 * tau / fs` seconds.
    pub fn default_duration(&self) -> f64 {
        750.0 * self.default_tau as f64 / self.default_fs
    }

    fn param_values(&self) -> Result<Vec<f64>> {
        self.param_order
            .iter()
            .map(|k| {
                self.params
                    .get(*k)
                    .copied()
                    .ok_or_else(|| Error::InvalidInput(format!("{} is missing parameter {k}", self.name)))
            })
            .collect()
    }

    /// Evaluate the vector field once, checking the output dimension.
    pub fn eval(&self, t: f64, state: &[f64]) -> Result<Vec<f64>> {
        if state.len() != self.dimension {
            return Err(Error::InvalidInput(format!(
                "state has dimension {}, {} expects {}",
                state.len(),
                self.name,
                self.dimension
            )));
        }
        let p = self.param_values()?;
        let mut out = vec![0.0; self.dimension];
        (self.rhs)(&p, t, state, &mut out);
        Ok(out)
    }
}

/// A uniformly sampled scalar time series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    pub samples: Vec<f64>,
    pub fs: f64,
    pub label: Option<DynamicState>,
}

impl Signal {
    pub fn new(samples: Vec<f64>, fs: f64, label: Option<DynamicState>) -> Result<Signal> {
        if samples.len() < 2 {
            return Err(Error::Length(format!(
                "a signal needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if !(fs > 0.0 && fs.is_finite()) {
            return Err(Error::Parameter(format!("sample rate must be positive, got {fs}")));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("sample {i} is not finite")));
        }
        Ok(Signal { samples, fs, label })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples.len()).map(move |i| i as f64 / self.fs)
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Population standard deviation.
    pub fn std(&self) -> f64 {
        let m = self.mean();
        let var = self.samples.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / self.samples.len() as f64;
        var.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Signal-to-noise ratio in dB; `f64::INFINITY` means no noise.
    pub snr_db: f64,
    /// Draws beyond `truncation * sigma` are rejected and redrawn.
    pub truncation: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(snr_db: f64, seed: u64) -> NoiseSpec {
        NoiseSpec {
            snr_db,
            truncation: 3.0,
            seed,
        }
    }

    /// Noise standard deviation relative to a unit-variance signal.
    pub fn sigma(&self) -> f64 {
        if self.snr_db == f64::INFINITY {
            0.0
        } else {
            10f64.powf(-self.snr_db / 20.0)
        }
    }

    /// Peak-to-peak noise bound, `2 * truncation * sigma`.
    pub fn amplitude_bound(&self) -> f64 {
        2.0 * self.truncation * self.sigma()
    }
}

fn rk4_step(rhs: VectorField, p: &[f64], t: f64, h: f64, x: &mut [f64], k: &mut [Vec<f64>; 4], tmp: &mut [f64]) {
    let n = x.len();
    rhs(p, t, x, &mut k[0]);
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * h * k[0][i];
    }
    rhs(p, t + 0.5 * h, tmp, &mut k[1]);
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * h * k[1][i];
    }
    rhs(p, t + 0.5 * h, tmp, &mut k[2]);
    for i in 0..n {
        tmp[i] = x[i] + h * k[2][i];
    }
    rhs(p, t + h, tmp, &mut k[3]);
    for i in 0..n {
        x[i] += h / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
    }
}

/// Full state trajectory from fixed-step RK4 at step `1 / fs`.
///
/// Returns `round(duration_s * fs)` states, the first being the initial
/// condition. A nonzero `seed` perturbs the initial condition by at most
/// 1e-6 per component.
pub fn integrate_states(
    spec: &SystemSpec,
    duration_s: f64,
    fs: f64,
    initial_state: &[f64],
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if !(duration_s > 0.0 && duration_s.is_finite()) {
        return Err(Error::Parameter(format!("duration must be positive, got {duration_s}")));
    }
    if !(fs > 0.0 && fs.is_finite()) {
        return Err(Error::Parameter(format!("sample rate must be positive, got {fs}")));
    }
    if initial_state.len() != spec.dimension {
        return Err(Error::InvalidInput(format!(
            "initial state has dimension {}, {} expects {}",
            initial_state.len(),
            spec.name,
            spec.dimension
        )));
    }
    let p = spec.param_values()?;
    let n_samples = (duration_s * fs).round() as usize;
    let h = 1.0 / fs;

    let mut x = initial_state.to_vec();
    if seed != 0 {
        let mut rng = SplitMix64::new(seed);
        for xi in x.iter_mut() {
            *xi += 1e-6 * (2.0 * rng.next_f64() - 1.0);
        }
    }
    let dim = spec.dimension;
    let mut k = [vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]];
    let mut tmp = vec![0.0; dim];
    let mut out = Vec::with_capacity(n_samples);
    for step in 0..n_samples {
        if step > 0 {
            let t = (step - 1) as f64 * h;
            rk4_step(spec.rhs, &p, t, h, &mut x, &mut k, &mut tmp);
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::Divergence { time: step as f64 * h });
            }
        }
        out.push(x.clone());
    }
    Ok(out)
}

/// Simulate `spec` and return its observation coordinate as a [`Signal`].
pub fn integrate(spec: &SystemSpec, duration_s: f64, fs: f64, initial_state: &[f64], seed: u64) -> Result<Signal> {
    let states = integrate_states(spec, duration_s, fs, initial_state, seed)?;
    let samples = states.iter().map(|s| s[spec.observed]).collect();
    Signal::new(samples, fs, spec.label)
}

/// Keep the trailing `ceil(keep_fraction * N)` samples.
pub fn trim(signal: &Signal, keep_fraction: f64) -> Result<Signal> {
    if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
        return Err(Error::Parameter(format!("keep fraction must lie in (0, 1], got {keep_fraction}")));
    }
    let n = signal.samples.len();
    // Guard against products like 0.2 * 10000 landing a hair above an integer.
    let keep = ((keep_fraction * n as f64) - 1e-9).ceil().max(0.0) as usize;
    let keep = keep.min(n);
    if keep < 2 {
        return Err(Error::Length(format!("trim leaves {keep} samples, a signal needs at least 2")));
    }
    Ok(Signal {
        samples: signal.samples[n - keep..].to_vec(),
        fs: signal.fs,
        label: signal.label,
    })
}

/// Standardize `signal` to zero mean and unit standard deviation, then add
/// truncated zero-mean Gaussian noise at the requested SNR.
pub fn add_noise(signal: &Signal, noise: &NoiseSpec) -> Result<Signal> {
    if !(noise.truncation > 0.0) {
        return Err(Error::Parameter(format!("truncation must be positive, got {}", noise.truncation)));
    }
    if noise.snr_db.is_nan() || noise.snr_db == f64::NEG_INFINITY {
        return Err(Error::Parameter(format!("invalid SNR {}", noise.snr_db)));
    }
    let mean = signal.mean();
    let std = signal.std();
    if !(std > 0.0) {
        return Err(Error::DegenerateSignal("constant signal cannot be standardized".into()));
    }
    let mut samples: Vec<f64> = signal.samples.iter().map(|x| (x - mean) / std).collect();

    let sigma = noise.sigma();
    if sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
        for x in samples.iter_mut() {
            *x += sigma * truncated_normal(&mut rng, noise.truncation);
        }
    }
    Ok(Signal {
        samples,
        fs: signal.fs,
        label: signal.label,
    })
}

fn truncated_normal(rng: &mut ChaCha8Rng, bound: f64) -> f64 {
    loop {
        let z: f64 = StandardNormal.sample(rng);
        if z.abs() <= bound {
            return z;
        }
    }
}

/// Draw `count` standard-normal values truncated at `bound` standard
/// deviations, using the same stream as [`add_noise`].
pub fn truncated_normal_draws(count: usize, bound: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| truncated_normal(&mut rng, bound)).collect()
}

fn lorenz(p: &[f64], _t: f64, x: &[f64], dx: &mut [f64]) {
    let (sigma, beta, rho) = (p[0], p[1], p[2]);
    dx[0] = sigma * (x[1] - x[0]);
    dx[1] = x[0] * (rho - x[2]) - x[1];
    dx[2] = x[0] * x[1] - beta * x[2];
}

fn rossler(p: &[f64], _t: f64, x: &[f64], dx: &mut [f64]) {
    let (a, b, c) = (p[0], p[1], p[2]);
    dx[0] = -x[1] - x[2];
    dx[1] = x[0] + a * x[1];
    dx[2] = b + x[2] * (x[0] - c);
}

fn chen(p: &[f64], _t: f64, x: &[f64], dx: &mut [f64]) {
    let (a, b, c) = (p[0], p[1], p[2]);
    dx[0] = a * (x[1] - x[0]);
    dx[1] = (c - a) * x[0] - x[0] * x[2] + c * x[1];
    dx[2] = x[0] * x[1] - b * x[2];
}

fn rucklidge(p: &[f64], _t: f64, x: &[f64], dx: &mut [f64]) {
    let (k, lambda) = (p[0], p[1]);
    dx[0] = -k * x[0] + lambda * x[1] - x[1] * x[2];
    dx[1] = x[0];
    dx[2] = -x[2] + x[1] * x[1];
}

fn driven_van_der_pol(p: &[f64], t: f64, x: &[f64], dx: &mut [f64]) {
    let (b, amp, omega) = (p[0], p[1], p[2]);
    dx[0] = x[1];
    dx[1] = -x[0] + b * (1.0 - x[0] * x[0]) * x[1] + amp * (omega * t).sin();
}

fn forced_brusselator(p: &[f64], t: f64, x: &[f64], dx: &mut [f64]) {
    let (a, b, amp, omega) = (p[0], p[1], p[2], p[3]);
    let x2y = x[0] * x[0] * x[1];
    dx[0] = a + x2y - (b + 1.0) * x[0] + amp * (omega * t).cos();
    dx[1] = b * x[0] - x2y;
}

struct Entry {
    name: &'static str,
    dimension: usize,
    order: &'static [&'static str],
    base: &'static [f64],
    regime_param: &'static str,
    periodic: f64,
    chaotic: f64,
    initial_state: &'static [f64],
    drive: Option<&'static str>,
    fs: f64,
    source: &'static str,
    rhs: VectorField,
}

const ENTRIES: &[Entry] = &[
    Entry {
        name: "lorenz",
        dimension: 3,
        order: &["sigma", "beta", "rho"],
        base: &[10.0, 8.0 / 3.0, 100.0],
        regime_param: "rho",
        periodic: 100.0,
        chaotic: 105.0,
        initial_state: &[1e-10, 0.0, 1.0],
        drive: None,
        fs: 190.0,
        source: "Lorenz (1963); rho = 100 lies in the period-2 window, Sparrow (1982)",
        rhs: lorenz,
    },
    Entry {
        name: "rossler",
        dimension: 3,
        order: &["a", "b", "c"],
        base: &[0.10, 0.20, 14.0],
        regime_param: "a",
        periodic: 0.10,
        chaotic: 0.15,
        initial_state: &[-0.4, 0.6, 1.0],
        drive: None,
        fs: 32.0,
        source: "Rossler (1976)",
        rhs: rossler,
    },
    Entry {
        name: "chens_system",
        dimension: 3,
        order: &["a", "b", "c"],
        base: &[35.0, 3.0, 30.0],
        regime_param: "c",
        periodic: 30.0,
        chaotic: 28.0,
        initial_state: &[-10.0, 0.0, 37.0],
        drive: None,
        fs: 360.0,
        source: "Chen and Ueta (1999)",
        rhs: chen,
    },
    Entry {
        name: "rucklidge_attractor",
        dimension: 3,
        order: &["k", "lambda"],
        base: &[2.0, 3.5],
        regime_param: "lambda",
        periodic: 3.5,
        chaotic: 6.7,
        initial_state: &[1.0, 0.0, 4.5],
        drive: None,
        fs: 25.0,
        source: "Rucklidge (1992)",
        rhs: rucklidge,
    },
    Entry {
        name: "driven_van_der_pol_oscillator",
        dimension: 2,
        order: &["b", "A", "omega"],
        base: &[3.0, 5.0, 1.5],
        regime_param: "omega",
        periodic: 1.5,
        chaotic: 1.788,
        initial_state: &[-1.9, 0.0],
        drive: Some("A sin(omega t) added to y'"),
        fs: 46.0,
        source: "Parlitz and Lauterborn (1987)",
        rhs: driven_van_der_pol,
    },
    Entry {
        name: "forced_brusselator",
        dimension: 2,
        order: &["a", "b", "A", "omega"],
        base: &[0.4, 1.2, 0.05, 1.1],
        regime_param: "omega",
        periodic: 1.1,
        chaotic: 0.8,
        initial_state: &[0.3, 2.0],
        drive: Some("A cos(omega t) added to x'"),
        fs: 14.0,
        source: "Tomita and Kai (1979)",
        rhs: forced_brusselator,
    },
];

/// All systems known to the crate, each with periodic and chaotic regimes.
pub fn registry() -> Vec<SystemSpec> {
    ENTRIES
        .iter()
        .map(|e| {
            let params: BTreeMap<String, f64> =
                e.order.iter().zip(e.base).map(|(k, v)| (k.to_string(), *v)).collect();
            let regimes = [(DynamicState::Periodic, e.periodic), (DynamicState::Chaotic, e.chaotic)]
                .into_iter()
                .map(|(label, v)| Regime {
                    label,
                    params: BTreeMap::from([(e.regime_param.to_string(), v)]),
                })
                .collect();
            SystemSpec {
                name: e.name.to_string(),
                dimension: e.dimension,
                params,
                param_order: e.order,
                regimes,
                initial_state: e.initial_state.to_vec(),
                observed: 0,
                drive: e.drive.map(str::to_string),
                default_tau: 50,
                default_fs: e.fs,
                source: e.source.to_string(),
                label: None,
                rhs: e.rhs,
            }
        })
        .collect()
}

pub fn lookup(name: &str) -> Result<SystemSpec> {
    let all = registry();
    let available = all.iter().map(|s| s.name.clone()).collect();
    all.into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::NotFound {
            name: name.to_string(),
            available,
        })
}

/// Registry serialized for the `simulate --registry` export.
pub fn registry_json() -> serde_json::Value {
    let systems: Vec<serde_json::Value> = registry()
        .iter()
        .map(|s| {
            serde_json::json!({
                "name": s.name,
                "dimension": s.dimension,
                "params": s.params,
                "regimes": s.regimes,
                "labels": s.regimes.iter().map(|r| r.label).collect::<Vec<_>>(),
                "initial_state": s.initial_state,
                "observed": s.observed,
                "drive": s.drive,
                "tau": s.default_tau,
                "fs": s.default_fs,
                "source": s.source,
            })
        })
        .collect();
    serde_json::json!({ "systems": systems })
}

/// Simulate a registry system in the given state with the default protocol:
/// `750 * tau / fs` seconds at the default sample rate, last fifth kept.
pub fn simulate_default(spec: &SystemSpec, state: DynamicState) -> Result<Signal> {
    let spec = spec.with_state(state)?;
    let signal = integrate(&spec, spec.default_duration(), spec.default_fs, &spec.initial_state, 0)?;
    trim(&signal, 0.2)
}
