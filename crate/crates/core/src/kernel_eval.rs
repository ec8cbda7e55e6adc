//! Exact Gaussian kernel, approximation-error measurement, closed-form
//! variance/bias expressions, and the nearest-neighbor bandwidth rule.

use rand::Rng;
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::feature_maps::{FeatureMap, FeatureVector, TransformKind, TransformSpec};
use crate::seed::{child_seed, rng_from};

/// A pair of points with its normalized distance `z = ‖x−y‖/σ` and exact
/// kernel value precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSample {
    x: Vec<f64>,
    y: Vec<f64>,
    z: f64,
    k_exact: f64,
}

impl PairSample {
    pub fn new(x: Vec<f64>, y: Vec<f64>, sigma: f64) -> Result<Self> {
        let k_exact = exact_kernel(&x, &y, sigma)?;
        let dist: f64 = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        Ok(Self {
            x,
            y,
            z: dist / sigma,
            k_exact,
        })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn k_exact(&self) -> f64 {
        self.k_exact
    }
}

/// Empirical mean squared error of one transform configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct MseReport {
    pub kind: TransformKind,
    pub n_proj: usize,
    pub mse: f64,
    pub n_pairs: usize,
    pub n_seeds: usize,
    /// Standard error of the MSE across seeds.
    pub stderr: f64,
}

/// `K(x,y) = exp(−‖x−y‖²/2σ²)`.
pub fn exact_kernel(x: &[f64], y: &[f64], sigma: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!(
            "kernel arguments have lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Config(format!(
            "sigma must be a positive finite real, got {sigma}"
        )));
    }
    let dist_sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((-dist_sq / (2.0 * sigma * sigma)).exp())
}

/// `K̂(x,y) = φ(x)ᵀφ(y)`.
pub fn approx_kernel(fx: &FeatureVector, fy: &FeatureVector) -> Result<f64> {
    if fx.len() != fy.len() {
        return Err(Error::Dimension(format!(
            "feature vectors have lengths {} and {}",
            fx.len(),
            fy.len()
        )));
    }
    Ok(fx
        .values()
        .iter()
        .zip(fy.values())
        .map(|(a, b)| a * b)
        .sum())
}

/// Closed-form RFF estimator variance `(1 − e^{−z²})²/(2D)`.
pub fn var_rff_closed(z: f64, n_proj: usize) -> f64 {
    debug_assert!(z >= 0.0 && n_proj >= 1);
    let t = 1.0 - (-z * z).exp();
    t * t / (2.0 * n_proj as f64)
}

/// Large-`d` closed-form ratio `Var(ORF)/Var(RFF)`:
/// `1 − (D−1)·e^{−z²}·z⁴ / (d·(1−e^{−z²})²)`. Valid for `1 ≤ D ≤ d`;
/// undefined at `z = 0`.
pub fn var_ratio_closed(z: f64, d: usize, n_proj: usize) -> Result<f64> {
    if n_proj < 1 || n_proj > d {
        return Err(Error::Config(format!(
            "variance ratio requires 1 ≤ D ≤ d, got D={n_proj}, d={d}"
        )));
    }
    if z <= 0.0 {
        return Err(Error::Domain(
            "variance ratio is undefined at z = 0".into(),
        ));
    }
    let e = (-z * z).exp();
    let denom = d as f64 * (1.0 - e) * (1.0 - e);
    Ok(1.0 - (n_proj as f64 - 1.0) * e * z.powi(4) / denom)
}

/// SORF bias bound `6z/√d`.
pub fn sorf_bias_bound(z: f64, d: usize) -> f64 {
    debug_assert!(z >= 0.0 && d >= 1);
    6.0 * z / (d as f64).sqrt()
}

/// Mean squared error of `spec`'s estimator over the given pairs, averaged
/// over `n_seeds` independently drawn maps (seed `i` is
/// `child_seed(spec.seed, i)`). The reported standard error is across seeds.
pub fn mse_estimate(
    spec: &TransformSpec,
    pairs: &[PairSample],
    n_seeds: usize,
) -> Result<MseReport> {
    if pairs.is_empty() {
        return Err(Error::Input("mse_estimate needs at least one pair".into()));
    }
    if n_seeds == 0 {
        return Err(Error::Input("mse_estimate needs at least one seed".into()));
    }
    spec.validate()?;

    let per_seed: Vec<f64> = (0..n_seeds)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let mut seeded = spec.clone();
            seeded.seed = child_seed(spec.seed, i as u64);
            let map = FeatureMap::build(&seeded)?;
            let mut acc = 0.0;
            for pair in pairs {
                let fx = map.features(pair.x())?;
                let fy = map.features(pair.y())?;
                let err = approx_kernel(&fx, &fy)? - pair.k_exact();
                acc += err * err;
            }
            Ok(acc / pairs.len() as f64)
        })
        .collect::<Result<Vec<f64>>>()?;

    let n = n_seeds as f64;
    let mse = per_seed.iter().sum::<f64>() / n;
    let stderr = if n_seeds > 1 {
        let var = per_seed.iter().map(|m| (m - mse) * (m - mse)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };

    Ok(MseReport {
        kind: spec.kind,
        n_proj: spec.n_proj,
        mse,
        n_pairs: pairs.len(),
        n_seeds,
        stderr,
    })
}

/// Bandwidth selection: the mean distance to the `k`-th nearest neighbor
/// over `min(n_sample, n)` sampled points. Callers must reject a zero
/// result (all sampled points coincide with their neighbors).
pub fn select_sigma(points: &Dataset, k: usize, n_sample: usize, seed: u64) -> Result<f64> {
    let n = points.len();
    if k == 0 {
        return Err(Error::Input("k must be at least 1".into()));
    }
    if n <= k {
        return Err(Error::Input(format!(
            "dataset has {n} points; need more than k = {k}"
        )));
    }
    if n_sample == 0 {
        return Err(Error::Input("n_sample must be at least 1".into()));
    }

    // Partial Fisher-Yates: the first m entries are a uniform sample
    // without replacement.
    let m = n_sample.min(n);
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = rng_from(seed);
    for i in 0..m {
        let j = i + rng.random_range(0..(n - i));
        indices.swap(i, j);
    }
    let sample = &indices[..m];

    let kth_distances: Vec<f64> = sample
        .par_iter()
        .map(|&i| {
            let xi = points.row(i);
            let mut dists: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let xj = points.row(j);
                    xi.iter()
                        .zip(xj)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                })
                .collect();
            let (_, kth, _) = dists.select_nth_unstable_by(k - 1, f64::total_cmp);
            kth.sqrt()
        })
        .collect();

    Ok(kth_distances.iter().sum::<f64>() / m as f64)
}
