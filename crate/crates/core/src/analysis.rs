//! SMACOF embedding of diagram distances and RBF support vector separation.

use serde::{Deserialize, Serialize};

use crate::diagmetric::DiagramDistanceMatrix;
use crate::dynsys::DynamicState;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

pub const SMACOF_RESTARTS: usize = 4;
pub const SMACOF_MAX_ITER: usize = 300;
pub const SMACOF_EPS: f64 = 1e-3;
pub const SVM_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Embedding {
    pub points: Vec<Vec<f64>>,
    /// Raw stress `sum_{i<j} (d_ij - |x_i - x_j|)^2`.
    pub stress: f64,
    pub seed: u64,
}

/// One SMACOF descent from a fixed start.
#[derive(Debug, Clone)]
pub struct SmacofRun {
    pub points: Vec<Vec<f64>>,
    /// Stress of the start followed by the stress after every iteration.
    pub stress_history: Vec<f64>,
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn stress(d: &[Vec<f64>], x: &[Vec<f64>]) -> f64 {
    let n = d.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let r = d[i][j] - euclid(&x[i], &x[j]);
            s += r * r;
        }
    }
    s
}

/// Guttman-transform iterations from `init` until the relative stress
/// decrease drops below `eps` or `max_iter` is reached.
pub fn smacof_run(d: &[Vec<f64>], init: Vec<Vec<f64>>, max_iter: usize, eps: f64) -> SmacofRun {
    let n = d.len();
    let dims = init.first().map_or(0, Vec::len);
    let scale: f64 = d.iter().flatten().map(|v| v * v).sum::<f64>() / 2.0;
    let mut x = init;
    let mut history = vec![stress(d, &x)];
    for _ in 0..max_iter {
        let mut next = vec![vec![0.0; dims]; n];
        for i in 0..n {
            let mut diag = 0.0;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let dist = euclid(&x[i], &x[j]);
                let b = if dist > 0.0 { -d[i][j] / dist } else { 0.0 };
                diag -= b;
                for k in 0..dims {
                    next[i][k] += b * x[j][k];
                }
            }
            for k in 0..dims {
                next[i][k] = (next[i][k] + diag * x[i][k]) / n as f64;
            }
        }
        x = next;
        let old = *history.last().expect("nonempty");
        let new = stress(d, &x);
        history.push(new);
        if new <= f64::EPSILON * scale || old - new < eps * old {
            break;
        }
    }
    SmacofRun {
        points: x,
        stress_history: history,
    }
}

/// Metric MDS by SMACOF: four uniform random starts derived from `seed`,
/// best stress wins (ties go to the earliest restart).
pub fn mds_embed(d: &DiagramDistanceMatrix, dims: usize, seed: u64) -> Result<Embedding> {
    mds_embed_values(&d.values, dims, seed)
}

pub fn mds_embed_values(d: &[Vec<f64>], dims: usize, seed: u64) -> Result<Embedding> {
    if dims < 1 {
        return Err(Error::Parameter("embedding dimension must be at least 1".into()));
    }
    let n = d.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty distance matrix".into()));
    }
    if d.iter().flatten().all(|&v| v == 0.0) {
        // Every configuration with coincident points is optimal.
        return Ok(Embedding {
            points: vec![vec![0.0; dims]; n],
            stress: 0.0,
            seed,
        });
    }
    let mut master = SplitMix64::new(seed);
    let mut best: Option<(Vec<Vec<f64>>, f64)> = None;
    for _ in 0..SMACOF_RESTARTS {
        let mut rng = SplitMix64::new(master.next_u64());
        let init: Vec<Vec<f64>> = (0..n).map(|_| (0..dims).map(|_| rng.next_f64()).collect()).collect();
        let run = smacof_run(d, init, SMACOF_MAX_ITER, SMACOF_EPS);
        let s = *run.stress_history.last().expect("nonempty");
        if best.as_ref().is_none_or(|(_, b)| s < *b) {
            best = Some((run.points, s));
        }
    }
    let (points, stress) = best.expect("at least one restart");
    Ok(Embedding { points, stress, seed })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gamma {
    /// `1 / (n_features * var(X))`, or 1 when the variance vanishes.
    Auto,
    Value(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SvmModel {
    pub support_vectors: Vec<Vec<f64>>,
    /// `y_i * alpha_i` for each support vector.
    pub dual_coef: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub c: f64,
    /// Final maximal KKT violation.
    pub kkt_gap: f64,
    pub iterations: usize,
}

fn sign(label: DynamicState) -> f64 {
    match label {
        DynamicState::Periodic => 1.0,
        DynamicState::Chaotic => -1.0,
    }
}

fn rbf(gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

impl SvmModel {
    pub fn decision_function(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.dual_coef)
            .map(|(sv, c)| c * rbf(self.gamma, sv, x))
            .sum::<f64>()
            + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> DynamicState {
        if self.decision_function(x) > 0.0 {
            DynamicState::Periodic
        } else {
            DynamicState::Chaotic
        }
    }

    pub fn accuracy(&self, points: &[Vec<f64>], labels: &[DynamicState]) -> f64 {
        let hits = points.iter().zip(labels).filter(|(p, l)| self.predict(p) == **l).count();
        hits as f64 / points.len() as f64
    }
}

pub fn auto_gamma(points: &[Vec<f64>]) -> f64 {
    let dims = points.first().map_or(1, Vec::len).max(1);
    let all: Vec<f64> = points.iter().flatten().copied().collect();
    let mean = all.iter().sum::<f64>() / all.len() as f64;
    let var = all.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / all.len() as f64;
    if var > 0.0 {
        1.0 / (dims as f64 * var)
    } else {
        1.0
    }
}

/// Soft-margin C-SVM with an RBF kernel, solved by SMO with second-order
/// working set selection.
pub fn svm_train(points: &[Vec<f64>], labels: &[DynamicState], c: f64, gamma: Gamma) -> Result<SvmModel> {
    let n = points.len();
    if labels.len() != n {
        return Err(Error::InvalidInput(format!("{n} points but {} labels", labels.len())));
    }
    if !(c > 0.0) {
        return Err(Error::Parameter(format!("C must be positive, got {c}")));
    }
    let has = |s| labels.contains(&s);
    if !has(DynamicState::Periodic) || !has(DynamicState::Chaotic) {
        return Err(Error::Label("training data must contain both classes".into()));
    }
    let gamma = match gamma {
        Gamma::Auto => auto_gamma(points),
        Gamma::Value(g) if g > 0.0 => g,
        Gamma::Value(g) => return Err(Error::Parameter(format!("gamma must be positive, got {g}"))),
    };

    let y: Vec<f64> = labels.iter().map(|&l| sign(l)).collect();
    let k: Vec<Vec<f64>> = points
        .iter()
        .map(|a| points.iter().map(|b| rbf(gamma, a, b)).collect())
        .collect();
    let q = |i: usize, j: usize| y[i] * y[j] * k[i][j];

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let max_iter = 10_000_000usize.max(100 * n * n);
    let tau = 1e-12;
    let mut iterations = 0;
    let mut gap;

    let in_up = |a: f64, yi: f64| (yi > 0.0 && a < c) || (yi < 0.0 && a > 0.0);
    let in_low = |a: f64, yi: f64| (yi > 0.0 && a > 0.0) || (yi < 0.0 && a < c);

    loop {
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            if in_up(alpha[t], y[t]) && -y[t] * grad[t] > gmax {
                gmax = -y[t] * grad[t];
                i_sel = Some(t);
            }
        }
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = None;
        let mut obj_min = f64::INFINITY;
        if let Some(i) = i_sel {
            for t in 0..n {
                if !in_low(alpha[t], y[t]) {
                    continue;
                }
                gmax2 = gmax2.max(y[t] * grad[t]);
                let b = gmax + y[t] * grad[t];
                if b > 0.0 {
                    let mut a = k[i][i] + k[t][t] - 2.0 * k[i][t];
                    if a <= 0.0 {
                        a = tau;
                    }
                    if -(b * b) / a < obj_min {
                        obj_min = -(b * b) / a;
                        j_sel = Some(t);
                    }
                }
            }
        }
        gap = gmax + gmax2;
        let (Some(i), Some(j)) = (i_sel, j_sel) else { break };
        if gap < SVM_TOLERANCE || iterations >= max_iter {
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let mut quad = k[i][i] + k[j][j] - 2.0 * k[i][j];
            if quad <= 0.0 {
                quad = tau;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = k[i][i] + k[j][j] - 2.0 * k[i][j];
            if quad <= 0.0 {
                quad = tau;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += q(t, i) * di + q(t, j) * dj;
        }
    }

    // rho from free vectors, else the midpoint of the feasible interval.
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free_sum, mut free_n) = (0.0, 0usize);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free_sum += yg;
            free_n += 1;
        }
    }
    let rho = if free_n > 0 { free_sum / free_n as f64 } else { (ub + lb) / 2.0 };

    let mut support_vectors = Vec::new();
    let mut dual_coef = Vec::new();
    for t in 0..n {
        if alpha[t] > 0.0 {
            support_vectors.push(points[t].clone());
            dual_coef.push(y[t] * alpha[t]);
        }
    }
    Ok(SvmModel {
        support_vectors,
        dual_coef,
        bias: -rho,
        gamma,
        c,
        kkt_gap: gap,
        iterations,
    })
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Training-set accuracy of an RBF SVM (C = 1, automatic gamma) on the 2-D
/// SMACOF embedding, repeated per seed. Returns mean and population
/// standard deviation across seeds.
pub fn separation_accuracy(d: &DiagramDistanceMatrix, seeds: &[u64]) -> Result<(f64, f64)> {
    if seeds.is_empty() {
        return Err(Error::Parameter("at least one seed is required".into()));
    }
    for state in DynamicState::ALL {
        let count = d.labels.iter().filter(|&&l| l == state).count();
        if count < 2 {
            return Err(Error::Label(format!("need at least 2 {state} diagrams, got {count}")));
        }
    }
    let accs = seeds
        .iter()
        .map(|&seed| {
            let emb = mds_embed(d, 2, seed)?;
            let model = svm_train(&emb.points, &d.labels, 1.0, Gamma::Auto)?;
            Ok(model.accuracy(&emb.points, &d.labels))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(mean_std(&accs))
}
