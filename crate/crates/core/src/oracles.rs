//! Brute-force checks of the hypotheses behind the estimator's guarantees.
//!
//! These are desk-scale oracles. The uniqueness condition quantifies over every
//! linear subspace; a maximizing subspace can always be taken as the span of
//! the data points it contains, so enumerating spans of point subsets of size
//! at most `D - 1` is exhaustive.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::DataSet;
use crate::error::Result;
use crate::spd::SpdMatrix;
use crate::subspace::Subspace;
use crate::synth::{binomial, EXHAUSTIVE_LIMIT, RANDOM_SUBSETS, RANK_TOLERANCE};
use crate::tyler::{objective, quadratic_forms};

/// A point belongs to `L` when `||x - Pi_L x|| <= MEMBERSHIP_TOLERANCE * ||x||`.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMethod {
    Exhaustive,
    Randomized,
}

/// A subspace together with how many data points it contains.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub subspace: Subspace,
    pub member_count: usize,
    pub total: usize,
}

impl Witness {
    pub fn fraction(&self) -> f64 {
        self.member_count as f64 / self.total as f64
    }

    /// `dim(L) / D`, the bound the fraction is compared against.
    pub fn threshold(&self) -> f64 {
        self.subspace.dim() as f64 / self.subspace.ambient_dim() as f64
    }

    /// Recounts the members of the witness subspace in `data`.
    pub fn recount(&self, data: &DataSet) -> usize {
        count_members(data, &self.subspace)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub holds: bool,
    pub method: CheckMethod,
    /// Fraction of points in the reported subspace: the candidate for the
    /// recovery condition, the tightest span found for the uniqueness condition.
    pub fraction: f64,
    /// `dim(L) / D` for the same subspace.
    pub threshold: f64,
    /// Present exactly when the condition fails.
    pub witness: Option<Witness>,
}

pub fn is_member(x: &DVector<f64>, l: &Subspace) -> bool {
    let inside = l.basis() * l.coordinates(x);
    (x - inside).norm() <= MEMBERSHIP_TOLERANCE * x.norm()
}

pub fn count_members(data: &DataSet, l: &Subspace) -> usize {
    if data.dim() != l.ambient_dim() {
        return 0;
    }
    data.iter().filter(|x| is_member(&x.into_owned(), l)).count()
}

/// Checks `|X ∩ L| / N < dim(L) / D` for every proper subspace `L`.
///
/// Candidates are spans of point subsets of size `1..D`. The enumeration is
/// exhaustive when there are at most [`EXHAUSTIVE_LIMIT`] subsets, otherwise
/// [`RANDOM_SUBSETS`] subsets are sampled with a fixed seed.
pub fn uniqueness_condition(data: &DataSet) -> ConditionReport {
    let (n, dim) = (data.len(), data.dim());
    let mut best: Option<(f64, Witness)> = None;
    let mut consider = |idx: &[usize]| {
        let cols: Vec<DVector<f64>> = idx.iter().map(|&i| data.point(i).into_owned()).collect();
        let Some(span) = Subspace::span_of(&DMatrix::from_columns(&cols), RANK_TOLERANCE) else {
            return;
        };
        let members = count_members(data, &span);
        let margin = members as f64 / n as f64 - span.dim() as f64 / dim as f64;
        if best.as_ref().is_none_or(|(m, _)| margin > *m) {
            best = Some((
                margin,
                Witness {
                    subspace: span,
                    member_count: members,
                    total: n,
                },
            ));
        }
    };

    let total: u128 = (1..dim).map(|k| binomial(n, k)).fold(0u128, |a, b| a.saturating_add(b));
    let method = if total <= EXHAUSTIVE_LIMIT {
        for k in 1..dim.min(n + 1) {
            for idx in (0..n).combinations(k) {
                consider(&idx);
            }
        }
        CheckMethod::Exhaustive
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let max_k = (dim - 1).min(n);
        for _ in 0..RANDOM_SUBSETS {
            let k = rng.random_range(1..=max_k);
            consider(&sample(&mut rng, n, k).into_vec());
        }
        CheckMethod::Randomized
    };

    match best {
        None => ConditionReport {
            holds: true,
            method,
            fraction: 0.0,
            threshold: 0.0,
            witness: None,
        },
        Some((_, w)) => {
            // Strict inequality in integers: members * D < dim(L) * N.
            let holds = w.member_count * dim < w.subspace.dim() * n;
            ConditionReport {
                holds,
                method,
                fraction: w.fraction(),
                threshold: w.threshold(),
                witness: (!holds).then_some(w),
            }
        }
    }
}

/// Checks `|X ∩ L| / |X| > d / D` for the given candidate.
pub fn recovery_condition(data: &DataSet, candidate: &Subspace) -> ConditionReport {
    let (n, dim) = (data.len(), data.dim());
    let members = count_members(data, candidate);
    let holds = dim == candidate.ambient_dim() && members * dim > candidate.dim() * n;
    let witness = Witness {
        subspace: candidate.clone(),
        member_count: members,
        total: n,
    };
    ConditionReport {
        holds,
        method: CheckMethod::Exhaustive,
        fraction: witness.fraction(),
        threshold: witness.threshold(),
        witness: (!holds).then_some(witness),
    }
}

/// `G(S, A) - F(S)` for the majorizer
///
/// ```text
/// G(S, A) = (1/N) sum_x (x^T S^{-1} x) / (x^T A^{-1} x) + (1/D) log det S + C
/// C       = (1/N) sum_x log(x^T A^{-1} x) - 1
/// ```
///
/// `C` makes `G(A, A) = F(A)`; concavity of `log` gives `G(S, A) >= F(S)`.
pub fn majorization_gap(sigma: &SpdMatrix, anchor: &SpdMatrix, data: &DataSet) -> Result<f64> {
    let (q, log_det) = quadratic_forms(sigma, data)?;
    let (q_anchor, _) = quadratic_forms(anchor, data)?;
    let n = data.len() as f64;
    let c = q_anchor.iter().map(|v| v.ln()).sum::<f64>() / n - 1.0;
    let ratio = q.iter().zip(q_anchor.iter()).map(|(a, b)| a / b).sum::<f64>() / n;
    let g = ratio + log_det / sigma.dim() as f64 + c;
    Ok(g - objective(sigma, data)?)
}
