//! Exact (quadratic-time) t-SNE projection to 2-d.
//!
//! Per-point bandwidths come from a binary search matching the target
//! perplexity; optimisation is gradient descent on the KL divergence
//! with early exaggeration, momentum switching and per-coordinate gains.

use rand::Rng;

use crate::{seeds, Error, Result};

#[derive(Debug, Clone)]
pub struct TsneConfig {
    pub perplexity: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub early_exaggeration: f64,
    pub exaggeration_iters: usize,
    pub initial_momentum: f64,
    pub final_momentum: f64,
    pub momentum_switch_iter: usize,
    pub seed: u64,
}

impl Default for TsneConfig {
    fn default() -> Self {
        TsneConfig {
            perplexity: 30.0,
            iterations: 1000,
            learning_rate: 200.0,
            early_exaggeration: 12.0,
            exaggeration_iters: 250,
            initial_momentum: 0.5,
            final_momentum: 0.8,
            momentum_switch_iter: 250,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TsneResult {
    /// One (x, y) pair per input row.
    pub points: Vec<[f64; 2]>,
    /// KL divergence of the un-exaggerated objective per iteration.
    pub kl_history: Vec<f64>,
}

/// Project `n` rows of dimension `dim` (row-major `data`) into 2-d.
pub fn tsne_project(data: &[f64], n: usize, dim: usize, config: &TsneConfig) -> Result<TsneResult> {
    if data.len() != n * dim {
        return Err(Error::shape(format!("{} values", n * dim), format!("{}", data.len())));
    }
    if n as f64 <= 3.0 * config.perplexity {
        return Err(Error::InvalidInput(format!(
            "need more than {} points for perplexity {}, got {n}",
            3.0 * config.perplexity,
            config.perplexity
        )));
    }
    if config.iterations == 0 {
        return Err(Error::InvalidInput("need at least one iteration".into()));
    }

    // Pairwise squared distances in the input space.
    let mut d2 = vec![0.0f64; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let mut acc = 0.0;
            for k in 0..dim {
                let diff = data[i * dim + k] - data[j * dim + k];
                acc += diff * diff;
            }
            d2[i * n + j] = acc;
            d2[j * n + i] = acc;
        }
    }

    // Conditional distributions with per-point precision found by binary
    // search on the Shannon entropy (target log2 perplexity bits).
    let target_entropy_bits = config.perplexity.log2();
    let mut p = vec![0.0f64; n * n];
    for i in 0..n {
        let row = &d2[i * n..(i + 1) * n];
        let mut beta = 1.0f64;
        let mut beta_min = f64::NEG_INFINITY;
        let mut beta_max = f64::INFINITY;
        let mut probs = vec![0.0f64; n];
        for _ in 0..64 {
            let mut sum = 0.0;
            for j in 0..n {
                probs[j] = if j == i { 0.0 } else { (-beta * row[j]).exp() };
                sum += probs[j];
            }
            let entropy_bits = if sum > 0.0 {
                let mut h_nats = 0.0;
                for j in 0..n {
                    if probs[j] > 0.0 {
                        let q = probs[j] / sum;
                        h_nats -= q * q.ln();
                    }
                }
                h_nats / std::f64::consts::LN_2
            } else {
                0.0
            };
            let diff = entropy_bits - target_entropy_bits;
            if diff.abs() < 1e-5 {
                break;
            }
            if diff > 0.0 {
                beta_min = beta;
                beta = if beta_max.is_finite() { (beta + beta_max) / 2.0 } else { beta * 2.0 };
            } else {
                beta_max = beta;
                beta = if beta_min.is_finite() { (beta + beta_min) / 2.0 } else { beta / 2.0 };
            }
        }
        let sum: f64 = probs.iter().sum();
        if sum > 0.0 {
            for j in 0..n {
                p[i * n + j] = probs[j] / sum;
            }
        }
    }

    // Symmetrise and floor.
    let mut p_sym = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            p_sym[i * n + j] = ((p[i * n + j] + p[j * n + i]) / (2.0 * n as f64)).max(1e-12);
        }
    }
    for i in 0..n {
        p_sym[i * n + i] = 1e-12;
    }

    // Small Gaussian initialisation.
    let mut rng = seeds::rng(config.seed, "tsne-init", &[]);
    let mut y: Vec<f64> =
        (0..2 * n).map(|_| 1e-4 * rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
    let mut update = vec![0.0f64; 2 * n];
    let mut gains = vec![1.0f64; 2 * n];
    let mut q_num = vec![0.0f64; n * n];
    let mut kl_history = Vec::with_capacity(config.iterations);

    for iter in 1..=config.iterations {
        // Student-t numerators and their sum.
        let mut z = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = y[2 * i] - y[2 * j];
                let dy = y[2 * i + 1] - y[2 * j + 1];
                let num = 1.0 / (1.0 + dx * dx + dy * dy);
                q_num[i * n + j] = num;
                q_num[j * n + i] = num;
                z += 2.0 * num;
            }
        }
        let z = z.max(1e-12);

        let exaggeration =
            if iter <= config.exaggeration_iters { config.early_exaggeration } else { 1.0 };
        let momentum = if iter <= config.momentum_switch_iter {
            config.initial_momentum
        } else {
            config.final_momentum
        };

        let mut kl = 0.0f64;
        for i in 0..n {
            let mut gx = 0.0f64;
            let mut gy = 0.0f64;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let pij = p_sym[i * n + j];
                let num = q_num[i * n + j];
                let qij = (num / z).max(1e-12);
                let coeff = 4.0 * (exaggeration * pij - qij) * num;
                gx += coeff * (y[2 * i] - y[2 * j]);
                gy += coeff * (y[2 * i + 1] - y[2 * j + 1]);
                if j > i {
                    kl += 2.0 * pij * (pij / qij).ln();
                }
            }
            for (dim_ix, grad) in [(2 * i, gx), (2 * i + 1, gy)] {
                let same_sign = (grad > 0.0) == (update[dim_ix] > 0.0);
                gains[dim_ix] =
                    if same_sign { (gains[dim_ix] * 0.8).max(0.01) } else { gains[dim_ix] + 0.2 };
                update[dim_ix] =
                    momentum * update[dim_ix] - config.learning_rate * gains[dim_ix] * grad;
            }
        }
        for i in 0..n {
            y[2 * i] += update[2 * i];
            y[2 * i + 1] += update[2 * i + 1];
        }
        // Re-centre.
        let mx: f64 = (0..n).map(|i| y[2 * i]).sum::<f64>() / n as f64;
        let my: f64 = (0..n).map(|i| y[2 * i + 1]).sum::<f64>() / n as f64;
        for i in 0..n {
            y[2 * i] -= mx;
            y[2 * i + 1] -= my;
        }
        kl_history.push(kl);
    }

    let points = (0..n).map(|i| [y[2 * i], y[2 * i + 1]]).collect();
    Ok(TsneResult { points, kl_history })
}
