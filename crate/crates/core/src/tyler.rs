//! Tyler's M-estimator of scatter and its fixed-point iteration.
//!
//! The objective over trace-one SPD matrices is
//!
//! ```text
//! F(S) = (1/N) sum_x log(x^T S^{-1} x) + (1/D) log det S
//! ```
//!
//! and the iteration is `S <- T(S)` with
//!
//! ```text
//! T(S) = normalize( sum_x x x^T / (x^T S^{-1} x) )
//! ```
//!
//! where `normalize` rescales to unit trace. Quadratic forms are evaluated through
//! a Cholesky factor `S = L L^T` as `|| L^{-1} x ||^2`; `S^{-1}` is never formed.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::spd::{SpdMatrix, SymmetricMatrix, SPD_THRESHOLD};

/// Trace tolerance for [`TraceOneSpd::new`].
pub const TRACE_TOLERANCE: f64 = 1e-12;

/// SPD matrix with unit trace, the constraint set of the estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceOneSpd(SpdMatrix);

impl TraceOneSpd {
    pub fn new(spd: SpdMatrix) -> Result<Self> {
        let tr = spd.trace();
        if (tr - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidParameter(format!("trace is {tr}, expected 1")));
        }
        Ok(Self(spd))
    }

    /// Rescales `spd` to unit trace.
    pub fn normalize(spd: &SpdMatrix) -> Self {
        let scaled = spd.scale(1.0 / spd.trace()).expect("SPD trace is positive");
        Self(scaled)
    }

    /// `I / D`.
    pub fn identity(dim: usize) -> Self {
        Self::normalize(&SpdMatrix::identity(dim))
    }

    pub fn as_spd(&self) -> &SpdMatrix {
        &self.0
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        self.0.as_matrix()
    }

    pub fn into_spd(self) -> SpdMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn lambda_min(&self) -> f64 {
        self.0.lambda_min()
    }
}

/// Stopping parameters for [`estimate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    /// Stop once `||S_k - S_{k-1}||_F / ||S_k||_F < tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Scan the quadratic forms of each new iterate and stop on a non-positive
    /// or non-finite value. A non-SPD iterate always ends the run.
    pub breakdown_check: bool,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 1000,
            breakdown_check: true,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIterations,
    /// The next iterate could not be formed in floating point; the result holds
    /// the last finite iterate.
    Breakdown,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIterations => "max_iterations",
            Termination::Breakdown => "breakdown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub objective: f64,
    pub rel_step: f64,
    pub lambda_min: f64,
}

#[derive(Debug, Clone)]
pub struct EstimateResult {
    pub sigma: TraceOneSpd,
    pub iterations: usize,
    pub termination: Termination,
    pub trace: Vec<IterationRecord>,
}

impl EstimateResult {
    /// Objective of the returned iterate, if any step was taken.
    pub fn final_objective(&self) -> Option<f64> {
        self.trace.last().map(|r| r.objective)
    }
}

/// Quadratic forms `x^T S^{-1} x` for every point and `log det S`.
struct Evaluation {
    quad: DVector<f64>,
    log_det: f64,
}

impl Evaluation {
    fn of(sigma: &DMatrix<f64>, data: &DataSet) -> Option<Self> {
        let chol: Cholesky<f64, Dyn> = Cholesky::new(sigma.clone())?;
        let l = chol.l();
        let whitened = l.solve_lower_triangular(data.as_columns())?;
        let quad = DVector::from_iterator(data.len(), whitened.column_iter().map(|c| c.norm_squared()));
        let log_det = 2.0 * l.diagonal().iter().map(|v| v.ln()).sum::<f64>();
        Some(Self { quad, log_det })
    }

    fn first_bad_form(&self) -> Option<(usize, f64)> {
        self.quad
            .iter()
            .position(|&q| !(q > 0.0 && q.is_finite()))
            .map(|i| (i, self.quad[i]))
    }

    fn objective(&self, dim: usize) -> f64 {
        let n = self.quad.len() as f64;
        self.quad.iter().map(|q| q.ln()).sum::<f64>() / n + self.log_det / dim as f64
    }

    /// Unnormalized `sum_x x x^T / q_x`, symmetrized.
    fn weighted_scatter(&self, data: &DataSet) -> DMatrix<f64> {
        let x = data.as_columns();
        let mut scaled = x.clone();
        for (mut col, q) in scaled.column_iter_mut().zip(self.quad.iter()) {
            col /= *q;
        }
        let s = scaled * x.transpose();
        let t = s.transpose();
        (s + t) * 0.5
    }
}

fn evaluate(sigma: &SpdMatrix, data: &DataSet) -> Result<Evaluation> {
    data.check_dim(sigma.dim())?;
    let eval = Evaluation::of(sigma.as_matrix(), data).ok_or(Error::NotPositiveDefinite {
        lambda_min: sigma.lambda_min(),
        lambda_max: sigma.lambda_max(),
    })?;
    if let Some((index, value)) = eval.first_bad_form() {
        return Err(Error::NonPositiveQuadraticForm { index, value });
    }
    Ok(eval)
}

fn step_from(eval: &Evaluation, data: &DataSet) -> Result<TraceOneSpd> {
    let s = eval.weighted_scatter(data);
    let tr = s.trace();
    let normalized = SymmetricMatrix::symmetrized(s / tr);
    Ok(TraceOneSpd(SpdMatrix::new(normalized)?))
}

/// Quadratic forms `x^T S^{-1} x` (one per point) and `log det S`.
pub(crate) fn quadratic_forms(sigma: &SpdMatrix, data: &DataSet) -> Result<(DVector<f64>, f64)> {
    let eval = evaluate(sigma, data)?;
    Ok((eval.quad, eval.log_det))
}

/// `F(S) = (1/N) sum_x log(x^T S^{-1} x) + (1/D) log det S`.
///
/// Invariant under `S -> c S` for every `c > 0`.
pub fn objective(sigma: &SpdMatrix, data: &DataSet) -> Result<f64> {
    Ok(evaluate(sigma, data)?.objective(sigma.dim()))
}

/// One application of the fixed-point map `T`.
///
/// Fails with [`Error::NonPositiveQuadraticForm`] or
/// [`Error::NotPositiveDefinite`] when the step cannot be formed, which is the
/// breakdown signal of the iteration.
pub fn fixed_point_step(sigma: &TraceOneSpd, data: &DataSet) -> Result<TraceOneSpd> {
    let eval = evaluate(sigma.as_spd(), data)?;
    step_from(&eval, data)
}

/// `|| T(S) - S ||_F`.
pub fn fixed_point_residual(sigma: &TraceOneSpd, data: &DataSet) -> Result<f64> {
    let next = fixed_point_step(sigma, data)?;
    Ok((next.as_matrix() - sigma.as_matrix()).norm())
}

/// True when `sigma` is below the SPD threshold, cannot be factored, or yields a
/// non-positive or non-finite quadratic form on some point.
pub fn breakdown_detected(sigma: &SymmetricMatrix, data: &DataSet) -> bool {
    if data.dim() != sigma.dim() {
        return true;
    }
    let eig = sigma.eigen();
    if !(eig.lambda_min() > 0.0 && eig.lambda_min() > SPD_THRESHOLD * eig.lambda_max()) {
        return true;
    }
    match Evaluation::of(sigma.as_matrix(), data) {
        Some(eval) => eval.first_bad_form().is_some(),
        None => true,
    }
}

/// Runs the fixed-point iteration from `I / D`.
pub fn estimate(data: &DataSet, config: &EstimatorConfig) -> Result<EstimateResult> {
    estimate_with_observer(data, config, |_, _| {})
}

/// As [`estimate`], calling `observer(k, S_k)` on every accepted iterate.
pub fn estimate_with_observer<F>(data: &DataSet, config: &EstimatorConfig, mut observer: F) -> Result<EstimateResult>
where
    F: FnMut(usize, &TraceOneSpd),
{
    config.validate()?;
    let dim = data.dim();
    let mut sigma = TraceOneSpd::identity(dim);
    let mut eval = evaluate(sigma.as_spd(), data)?;
    let mut trace = Vec::new();
    let mut termination = Termination::MaxIterations;

    for k in 1..=config.max_iter {
        let next = match step_from(&eval, data) {
            Ok(next) => next,
            Err(_) => {
                termination = Termination::Breakdown;
                break;
            }
        };
        let next_eval = match Evaluation::of(next.as_matrix(), data) {
            Some(e) => e,
            None => {
                termination = Termination::Breakdown;
                break;
            }
        };
        if next_eval.first_bad_form().is_some() {
            if config.breakdown_check {
                termination = Termination::Breakdown;
                break;
            }
            // Without the scan the next step still needs finite weights.
            if next_eval.quad.iter().any(|q| !q.is_finite() || *q == 0.0) {
                termination = Termination::Breakdown;
                break;
            }
        }
        let rel_step = (next.as_matrix() - sigma.as_matrix()).norm() / next.as_matrix().norm();
        trace.push(IterationRecord {
            k,
            objective: next_eval.objective(dim),
            rel_step,
            lambda_min: next.lambda_min(),
        });
        observer(k, &next);
        sigma = next;
        eval = next_eval;
        if rel_step < config.tol {
            termination = Termination::Converged;
            break;
        }
    }

    Ok(EstimateResult {
        sigma,
        iterations: trace.len(),
        termination,
        trace,
    })
}
