//! Drivers for the synthetic studies: the inlier-count sweep, the convergence
//! trace and the noise sweep.
//!
//! Trial `i` of a sweep uses seed `seed + i`. Trials run on a rayon pool whose
//! size comes from `SUBREC_THREADS` (default: all logical processors); results
//! are collected in trial order, so outputs do not depend on scheduling.

use anyhow::{bail, Context, Result};
use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use crate::subspace::{recovery_error, top_d_subspace_with_gap, Subspace};
use crate::synth::{generate, SyntheticModel};
use crate::tyler::{estimate, estimate_with_observer, EstimatorConfig, Termination, TraceOneSpd};

use super::formats::{fmt_f64, CsvTable};

pub const THREADS_ENV: &str = "SUBREC_THREADS";

/// Worker count for trial parallelism.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn run_parallel<T, F>(count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .context("building thread pool")?;
    pool.install(|| (0..count).into_par_iter().map(&f).collect())
}

/// `lo:hi:step`, inclusive of `hi` when it lies on the grid.
pub fn parse_int_range(range: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = range.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        bail!("range must be lo:hi:step, got {range:?}");
    };
    let (lo, hi, step): (usize, usize, usize) = (lo.parse()?, hi.parse()?, step.parse()?);
    if step == 0 {
        bail!("range step must be positive");
    }
    if lo > hi {
        bail!("empty range {range:?}");
    }
    Ok((lo..=hi).step_by(step).collect())
}

/// `lo:hi:steps` with `steps` log-spaced values from `lo` to `hi`. A single
/// step yields `[lo]`, which may be zero.
pub fn parse_log_range(range: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = range.split(':').collect();
    let [lo, hi, steps] = parts.as_slice() else {
        bail!("range must be lo:hi:steps, got {range:?}");
    };
    let (lo, hi, steps): (f64, f64, usize) = (lo.parse()?, hi.parse()?, steps.parse()?);
    match steps {
        0 => bail!("empty range {range:?}"),
        1 if lo >= 0.0 => Ok(vec![lo]),
        _ if lo > 0.0 && hi >= lo => Ok((0..steps)
            .map(|i| lo * (hi / lo).powf(i as f64 / (steps - 1) as f64))
            .collect()),
        _ => bail!("log-spaced range needs 0 < lo <= hi, got {range:?}"),
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Recovery error of the top-d eigenspace of `sigma`. A vanishing eigengap is
/// logged, not fatal.
pub fn subspace_error(sigma: &TraceOneSpd, truth: &Subspace) -> Result<f64> {
    let top = top_d_subspace_with_gap(sigma.as_spd().as_symmetric(), truth.dim())?;
    if top.ambiguous {
        warn!(
            "eigengap at d = {} is {:e}; top-d subspace is ambiguous",
            truth.dim(),
            top.gap
        );
    }
    Ok(recovery_error(&top.subspace, truth)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub recovery_error: f64,
    pub iterations: usize,
    pub termination: Termination,
}

/// Generates one data set and runs the estimator on it. After a breakdown the
/// last finite iterate is scored.
pub fn run_trial(model: &SyntheticModel, config: &EstimatorConfig) -> Result<TrialOutcome> {
    let (data, truth) = generate(model)?;
    let result = estimate(&data, config)?;
    Ok(TrialOutcome {
        recovery_error: subspace_error(&result.sigma, &truth)?,
        iterations: result.iterations,
        termination: result.termination,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactRecoveryConfig {
    pub ambient_dim: usize,
    pub subspace_dim: usize,
    pub n_outliers: usize,
    pub n_inliers: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    #[serde(skip)]
    pub estimator: EstimatorConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactRecoveryRow {
    pub n_inliers: usize,
    pub mean_recovery_error: f64,
    pub std: f64,
    pub trials: usize,
}

pub fn exact_recovery(cfg: &ExactRecoveryConfig) -> Result<Vec<ExactRecoveryRow>> {
    if cfg.n_inliers.is_empty() {
        bail!("inlier range is empty");
    }
    if cfg.trials == 0 {
        bail!("trials must be positive");
    }
    let jobs: Vec<(usize, u64)> = cfg
        .n_inliers
        .iter()
        .flat_map(|&n1| (0..cfg.trials as u64).map(move |t| (n1, t)))
        .collect();
    let errors = run_parallel(jobs.len(), |i| {
        let (n1, t) = jobs[i];
        let model = SyntheticModel::new(
            cfg.ambient_dim,
            cfg.subspace_dim,
            n1,
            cfg.n_outliers,
            0.0,
            cfg.seed.wrapping_add(t),
        )?;
        Ok(run_trial(&model, &cfg.estimator)?.recovery_error)
    })?;
    Ok(cfg
        .n_inliers
        .iter()
        .zip(errors.chunks(cfg.trials))
        .map(|(&n1, errs)| {
            let (mean, std) = mean_std(errs);
            ExactRecoveryRow {
                n_inliers: n1,
                mean_recovery_error: mean,
                std,
                trials: cfg.trials,
            }
        })
        .collect())
}

pub fn exact_recovery_csv(rows: &[ExactRecoveryRow]) -> String {
    let mut t = CsvTable::new(&["n_inliers", "mean_recovery_error", "std", "trials"]);
    for r in rows {
        t.push(&[
            r.n_inliers.to_string(),
            fmt_f64(r.mean_recovery_error),
            fmt_f64(r.std),
            r.trials.to_string(),
        ]);
    }
    t.as_str().to_owned()
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceConfig {
    pub ambient_dim: usize,
    pub subspace_dim: usize,
    pub n_inliers: usize,
    pub n_outliers: usize,
    pub noise: f64,
    pub seed: u64,
    #[serde(skip)]
    pub estimator: EstimatorConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub k: usize,
    /// `||S_k - S_K||_F` with `K` the final iteration.
    pub sigma_diff_to_final: f64,
    pub recovery_error: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceRun {
    pub rows: Vec<ConvergenceRow>,
    pub termination: Termination,
}

/// One run, keeping every iterate.
pub fn convergence(cfg: &ConvergenceConfig) -> Result<ConvergenceRun> {
    let model = SyntheticModel::new(
        cfg.ambient_dim,
        cfg.subspace_dim,
        cfg.n_inliers,
        cfg.n_outliers,
        cfg.noise,
        cfg.seed,
    )?;
    let (data, truth) = generate(&model)?;
    let mut iterates = Vec::new();
    let result = estimate_with_observer(&data, &cfg.estimator, |_, s| iterates.push(s.clone()))?;
    let Some(last) = iterates.last() else {
        return Ok(ConvergenceRun {
            rows: Vec::new(),
            termination: result.termination,
        });
    };
    let last = last.as_matrix().clone();
    let rows = iterates
        .iter()
        .enumerate()
        .map(|(i, s)| {
            Ok(ConvergenceRow {
                k: i + 1,
                sigma_diff_to_final: (s.as_matrix() - &last).norm(),
                recovery_error: subspace_error(s, &truth)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceRun {
        rows,
        termination: result.termination,
    })
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut t = CsvTable::new(&["k", "sigma_diff_to_final", "recovery_error_k"]);
    for r in rows {
        t.push(&[
            r.k.to_string(),
            fmt_f64(r.sigma_diff_to_final),
            fmt_f64(r.recovery_error),
        ]);
    }
    t.as_str().to_owned()
}

#[derive(Debug, Clone, Serialize)]
pub struct NoiseConfig {
    pub ambient_dim: usize,
    pub subspace_dim: usize,
    pub n_inliers: usize,
    pub n_outliers: usize,
    pub noise_levels: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    #[serde(skip)]
    pub estimator: EstimatorConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRow {
    pub epsilon: f64,
    pub mean_recovery_error: f64,
    pub std: f64,
}

pub fn noise_sweep(cfg: &NoiseConfig) -> Result<Vec<NoiseRow>> {
    if cfg.noise_levels.is_empty() {
        bail!("noise range is empty");
    }
    if cfg.trials == 0 {
        bail!("trials must be positive");
    }
    let jobs: Vec<(f64, u64)> = cfg
        .noise_levels
        .iter()
        .flat_map(|&eps| (0..cfg.trials as u64).map(move |t| (eps, t)))
        .collect();
    let errors = run_parallel(jobs.len(), |i| {
        let (eps, t) = jobs[i];
        let model = SyntheticModel::new(
            cfg.ambient_dim,
            cfg.subspace_dim,
            cfg.n_inliers,
            cfg.n_outliers,
            eps,
            cfg.seed.wrapping_add(t),
        )?;
        Ok(run_trial(&model, &cfg.estimator)?.recovery_error)
    })?;
    Ok(cfg
        .noise_levels
        .iter()
        .zip(errors.chunks(cfg.trials))
        .map(|(&eps, errs)| {
            let (mean, std) = mean_std(errs);
            NoiseRow {
                epsilon: eps,
                mean_recovery_error: mean,
                std,
            }
        })
        .collect())
}

pub fn noise_csv(rows: &[NoiseRow]) -> String {
    let mut t = CsvTable::new(&["epsilon", "mean_recovery_error", "std"]);
    for r in rows {
        t.push(&[fmt_f64(r.epsilon), fmt_f64(r.mean_recovery_error), fmt_f64(r.std)]);
    }
    t.as_str().to_owned()
}
