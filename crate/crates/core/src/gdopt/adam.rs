use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::basis::GeneratorBasis;
use super::objective::{numeric_gradient, objective_at_params, GradientWorkspace, ParamVector};
use crate::error::{Error, Result};
use crate::math;
use crate::states::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradientMode {
    /// Exact gradient via divided differences of the exponential map.
    Analytic,
    /// Central differences with the given step.
    Numeric { step: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub max_iters: usize,
    /// Independent runs; run 0 starts at `h = 0`, later runs at random `h`.
    pub restarts: usize,
    /// Stop once `|ΔS_t − ΔS_{t−1}| < tol` for `patience` consecutive iterations.
    pub tol: f64,
    pub patience: usize,
    pub seed: u64,
    /// Random starts draw each `h_a` uniformly from `[−init_scale, init_scale]`.
    pub init_scale: f64,
    pub gradient: GradientMode,
    /// Record every `trajectory_stride`-th iteration (the last one is always kept).
    pub trajectory_stride: usize,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            max_iters: 5000,
            restarts: 5,
            tol: 1e-8,
            patience: 1,
            seed: 0,
            init_scale: 1.0,
            gradient: GradientMode::Analytic,
            trajectory_stride: 1,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.lr > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.eps > 0.0
            && self.tol >= 0.0
            && self.init_scale >= 0.0
            && self.max_iters > 0
            && self.restarts > 0
            && self.patience > 0
            && self.trajectory_stride > 0
            && match self.gradient {
                GradientMode::Analytic => true,
                GradientMode::Numeric { step } => step > 0.0,
            };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput("invalid Adam configuration".into()))
        }
    }
}

/// Outcome of [`adam_maximize`]; describes the best restart.
#[derive(Debug, Clone, PartialEq)]
pub struct OptRun {
    pub best_delta_s: f64,
    /// Iterations used by the best restart.
    pub iterations: usize,
    /// `(iteration, ΔS)` of the best restart.
    pub trajectory: Vec<(usize, f64)>,
    pub final_params: ParamVector,
    pub converged: bool,
    pub best_restart: usize,
    /// Best value reached by each restart, in order.
    pub restart_values: Vec<f64>,
    pub total_iterations: usize,
}

/// Adam ascent on `ΔS` over the product Gell-Mann basis of `d_A × d_B`.
pub fn adam_maximize(rho_ab: &DensityMatrix, d_a: usize, d_b: usize, config: &AdamConfig) -> Result<OptRun> {
    let basis = GeneratorBasis::gell_mann_product(d_a, d_b)?;
    adam_maximize_with_basis(rho_ab, d_a, d_b, &basis, config)
}

pub fn adam_maximize_with_basis(
    rho_ab: &DensityMatrix,
    d_a: usize,
    d_b: usize,
    basis: &GeneratorBasis,
    config: &AdamConfig,
) -> Result<OptRun> {
    config.validate()?;
    if rho_ab.dim() != d_a * d_b || basis.dim() != d_a * d_b {
        return Err(Error::DimensionMismatch { expected: d_a * d_b, found: rho_ab.dim() });
    }
    let mut best: Option<OptRun> = None;
    let mut restart_values = Vec::with_capacity(config.restarts);
    let mut total_iterations = 0;
    for r in 0..config.restarts {
        let start = if r == 0 {
            vec![0.0; basis.len()]
        } else {
            let mut rng = ChaCha20Rng::seed_from_u64(config.seed.wrapping_add(r as u64));
            (0..basis.len()).map(|_| config.init_scale * rng.random_range(-1.0..=1.0)).collect()
        };
        let mut run = single_run(rho_ab, d_a, d_b, basis, config, start)?;
        run.best_restart = r;
        restart_values.push(run.best_delta_s);
        total_iterations += run.iterations;
        // strict comparison keeps the earliest restart on ties
        if best.as_ref().is_none_or(|b| run.best_delta_s > b.best_delta_s) {
            best = Some(run);
        }
    }
    let mut best = best.expect("at least one restart");
    best.restart_values = restart_values;
    best.total_iterations = total_iterations;
    Ok(best)
}

fn single_run(
    rho_ab: &DensityMatrix,
    d_a: usize,
    d_b: usize,
    basis: &GeneratorBasis,
    config: &AdamConfig,
    start: Vec<f64>,
) -> Result<OptRun> {
    let n = start.len();
    let mut h = start;
    let mut m = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut ws = GradientWorkspace::new(rho_ab.matrix().clone(), d_a, d_b);
    let mut best_value = f64::NEG_INFINITY;
    let mut best_h = h.clone();
    let mut trajectory = Vec::new();
    let mut prev = f64::NAN;
    let mut last = f64::NAN;
    let mut quiet = 0;
    let mut converged = false;
    let mut iterations = 0;
    let (mut b1t, mut b2t) = (1.0, 1.0);

    for t in 1..=config.max_iters {
        iterations = t;
        let (value, grad) = match config.gradient {
            GradientMode::Analytic => ws.evaluate(basis, &h)?,
            GradientMode::Numeric { step } => {
                let p = ParamVector::new(h.clone())?;
                let f = objective_at_params(rho_ab, d_a, d_b, basis, &p)?;
                (f, numeric_gradient(rho_ab, d_a, d_b, basis, &p, step)?)
            }
        };
        last = value;
        if value > best_value {
            best_value = value;
            best_h.copy_from_slice(&h);
        }
        if (t - 1) % config.trajectory_stride == 0 {
            trajectory.push((t - 1, value));
        }
        if (value - prev).abs() < config.tol {
            quiet += 1;
            if quiet >= config.patience {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
        prev = value;

        b1t *= config.beta1;
        b2t *= config.beta2;
        for a in 0..n {
            m[a] = config.beta1 * m[a] + (1.0 - config.beta1) * grad[a];
            v[a] = config.beta2 * v[a] + (1.0 - config.beta2) * grad[a] * grad[a];
            let m_hat = m[a] / (1.0 - b1t);
            let v_hat = v[a] / (1.0 - b2t);
            h[a] += config.lr * m_hat / (math::sqrt(v_hat) + config.eps);
        }
    }
    if trajectory.last().is_none_or(|&(i, _)| i + 1 != iterations) {
        trajectory.push((iterations - 1, last));
    }
    Ok(OptRun {
        best_delta_s: best_value,
        iterations,
        trajectory,
        final_params: ParamVector::new(best_h)?,
        converged,
        best_restart: 0,
        restart_values: Vec::new(),
        total_iterations: iterations,
    })
}
