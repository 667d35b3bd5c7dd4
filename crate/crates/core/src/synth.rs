//! Synthetic inlier/outlier model.
//!
//! Inliers are i.i.d. `N(0, Pi_L)` on a `d`-dimensional subspace `L`, outliers
//! are i.i.d. uniform on `[0, 1]^D`, and optionally every point receives
//! isotropic noise `N(0, eps^2 I)`.
//!
//! # Random stream
//!
//! All randomness comes from `ChaCha8Rng` (`rand_chacha` 0.9) seeded with
//! `seed_from_u64(seed)`. Stream 0 produces the data in this order: for each
//! inlier `d` standard normals, for each outlier `D` uniforms on `[0, 1)`, then
//! (when `noise > 0`) `D` standard normals per point in data order. Normals come
//! from `rand_distr::StandardNormal` (ziggurat), uniforms from
//! `rand::Rng::random::<f64>()`. A rotated truth subspace draws `D * d` normals,
//! column-major, from stream 1 of the same seed and orthonormalizes them by QR.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::oracles::{CheckMethod, MEMBERSHIP_TOLERANCE};
use crate::subspace::Subspace;

/// Singular values at or below this fraction of the largest count as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Subset enumeration is exhaustive up to this many subsets.
pub const EXHAUSTIVE_LIMIT: u128 = 100_000;

/// Number of random subsets drawn beyond [`EXHAUSTIVE_LIMIT`].
pub const RANDOM_SUBSETS: usize = 10_000;

/// Parameters of the generative model plus its ground-truth subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticModel {
    pub ambient_dim: usize,
    pub subspace_dim: usize,
    pub n_inliers: usize,
    pub n_outliers: usize,
    pub noise: f64,
    pub seed: u64,
    truth: Subspace,
}

impl SyntheticModel {
    /// Model whose truth is the span of the first `subspace_dim` axes.
    pub fn new(
        ambient_dim: usize,
        subspace_dim: usize,
        n_inliers: usize,
        n_outliers: usize,
        noise: f64,
        seed: u64,
    ) -> Result<Self> {
        if n_inliers + n_outliers == 0 {
            return Err(Error::InvalidParameter("need at least one point".into()));
        }
        if !(noise >= 0.0 && noise.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise must be >= 0, got {noise}")));
        }
        let truth = Subspace::coordinate(ambient_dim, subspace_dim)?;
        Ok(Self {
            ambient_dim,
            subspace_dim,
            n_inliers,
            n_outliers,
            noise,
            seed,
            truth,
        })
    }

    /// Replaces the truth by a seeded random subspace of the same dimension.
    pub fn with_random_rotation(mut self) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(1);
        let (dd, d) = (self.ambient_dim, self.subspace_dim);
        let g = DMatrix::from_fn(dd, d, |_, _| rng.sample::<f64, _>(StandardNormal));
        self.truth = Subspace::span_of(&g, RANK_TOLERANCE).expect("Gaussian matrix has full rank");
        self
    }

    pub fn truth(&self) -> &Subspace {
        &self.truth
    }

    pub fn n_points(&self) -> usize {
        self.n_inliers + self.n_outliers
    }

    /// Fraction of inliers, the quantity compared with `d / D`.
    pub fn inlier_fraction(&self) -> f64 {
        self.n_inliers as f64 / self.n_points() as f64
    }
}

/// Draws the data set; inliers come first, then outliers.
pub fn generate(model: &SyntheticModel) -> Result<(DataSet, Subspace)> {
    let (dd, d) = (model.ambient_dim, model.subspace_dim);
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let basis = model.truth.basis();
    let mut points = DMatrix::zeros(dd, model.n_points());

    for j in 0..model.n_inliers {
        let z = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        points.set_column(j, &(basis * z));
    }
    for j in model.n_inliers..model.n_points() {
        for i in 0..dd {
            points[(i, j)] = rng.random::<f64>();
        }
    }
    if model.noise > 0.0 {
        for j in 0..model.n_points() {
            for i in 0..dd {
                points[(i, j)] += model.noise * rng.sample::<f64, _>(StandardNormal);
            }
        }
    }
    Ok((DataSet::from_columns(points)?, model.truth.clone()))
}

/// Scales every point to unit norm.
pub fn spherical_projection(data: &DataSet) -> DataSet {
    let mut points = data.as_columns().clone();
    for mut col in points.column_iter_mut() {
        let n = col.norm();
        col /= n;
    }
    DataSet::from_columns(points).expect("unit vectors are finite and nonzero")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneralPositionReport {
    pub holds: bool,
    pub method: CheckMethod,
}

impl GeneralPositionReport {
    /// A randomized pass is probabilistic: no sampled subset was degenerate.
    pub fn is_probabilistic(&self) -> bool {
        self.method == CheckMethod::Randomized
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    acc
}

fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.max();
    if !(smax > 0.0) {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOLERANCE * smax).count()
}

/// True when every `k`-subset (`k <= ambient`) of `points` spans `k` dimensions.
/// Checking subsets of size `min(ambient, n)` suffices since independence is
/// inherited by subsets.
fn points_in_general_position(points: &[DVector<f64>], ambient: usize, rng: &mut ChaCha8Rng) -> (bool, CheckMethod) {
    let n = points.len();
    let k = ambient.min(n);
    if k == 0 {
        return (true, CheckMethod::Exhaustive);
    }
    let independent = |idx: &[usize]| {
        let cols: Vec<DVector<f64>> = idx.iter().map(|&i| points[i].clone()).collect();
        numerical_rank(&DMatrix::from_columns(&cols)) == idx.len()
    };
    if binomial(n, k) <= EXHAUSTIVE_LIMIT {
        let holds = (0..n).combinations(k).all(|idx| independent(&idx));
        (holds, CheckMethod::Exhaustive)
    } else {
        let holds = (0..RANDOM_SUBSETS).all(|_| independent(&sample(rng, n, k).into_vec()));
        (holds, CheckMethod::Randomized)
    }
}

/// Checks that the inliers (points of `truth`) projected onto `truth` and the
/// outliers projected onto its complement each lie in general position.
pub fn general_position_check(data: &DataSet, truth: &Subspace) -> GeneralPositionReport {
    if data.dim() != truth.ambient_dim() {
        return GeneralPositionReport {
            holds: false,
            method: CheckMethod::Exhaustive,
        };
    }
    let complement = truth.complement();
    let mut inliers = Vec::new();
    let mut outliers = Vec::new();
    for x in data.iter() {
        let x = x.into_owned();
        let coords = truth.coordinates(&x);
        let residual = (&x - truth.basis() * &coords).norm();
        if residual <= MEMBERSHIP_TOLERANCE * x.norm() {
            inliers.push(coords);
        } else if let Some(c) = &complement {
            outliers.push(c.coordinates(&x));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (in_ok, in_method) = points_in_general_position(&inliers, truth.dim(), &mut rng);
    let out_dim = truth.ambient_dim() - truth.dim();
    let (out_ok, out_method) = points_in_general_position(&outliers, out_dim, &mut rng);
    let method = if in_method == CheckMethod::Randomized || out_method == CheckMethod::Randomized {
        CheckMethod::Randomized
    } else {
        CheckMethod::Exhaustive
    };
    GeneralPositionReport {
        holds: in_ok && out_ok,
        method,
    }
}
