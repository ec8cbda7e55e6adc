//! Experiment runners behind the `orf` command-line tool.
//!
//! Every runner consumes a plain config struct and returns CSV text. All
//! randomness flows from one root seed through fixed channels
//! ([`crate::seed_channels`]), so a given config produces byte-identical
//! output on every run and at every thread count.

use std::fmt;
use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;

use orf::dataset::Dataset;
use orf::error::{Error, Result};
use orf::feature_maps::{FeatureMap, TransformKind, TransformSpec};
use orf::fmt::f64_csv;
use orf::kernel_eval::{mse_estimate, select_sigma, PairSample};
use orf::seed::{child_seed, rng_from};
use orf::simulate::{
    mc_bias_variance_oriented, near_orthogonality_stats, PairOrientation,
};
use orf::binembed::{angle_estimate, sign_features};

/// Root-seed channels; every runner derives all of its randomness from
/// `child_seed(child_seed(seed, CHANNEL), index)`.
pub mod seed_channels {
    /// Synthetic dataset generation.
    pub const DATA: u64 = 0;
    /// Bandwidth-selection sampling.
    pub const SIGMA: u64 = 1;
    /// Evaluation-pair sampling.
    pub const PAIRS: u64 = 2;
    /// Per-experiment (kind × size combination) streams.
    pub const EXPERIMENT: u64 = 3;
}

/// A rendered CSV table: one header line plus data rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Csv {
    pub header: String,
    pub rows: Vec<String>,
}

impl fmt::Display for Csv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.header)?;
        for row in &self.rows {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// Bandwidth choice: a fixed value or the nearest-neighbor rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaChoice {
    Auto,
    Fixed(f64),
}

impl std::str::FromStr for SigmaChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("auto") {
            return Ok(SigmaChoice::Auto);
        }
        let value: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("--sigma must be 'auto' or a number, got '{s}'")))?;
        Ok(SigmaChoice::Fixed(value))
    }
}

/// Neighbor rank used by the automatic bandwidth rule.
pub const SIGMA_NEIGHBOR_RANK: usize = 50;
/// Points sampled by the automatic bandwidth rule.
pub const SIGMA_SAMPLE_SIZE: usize = 1000;

const TIMING_WARMUPS: usize = 10;
const TIMING_REPS: usize = 100;

pub struct MseCurveConfig {
    pub kinds: Vec<TransformKind>,
    pub data: Dataset,
    pub sigma: SigmaChoice,
    /// Grid of projection counts `D`.
    pub proj_grid: Vec<usize>,
    pub n_pairs: usize,
    pub n_seeds: usize,
    pub seed: u64,
    /// When set, measure the median per-transform wall time; otherwise the
    /// runtime column is 0 so output stays byte-deterministic.
    pub timing: bool,
}

fn require_nonempty<T>(items: &[T], what: &str) -> Result<()> {
    if items.is_empty() {
        return Err(Error::Config(format!("{what} must be non-empty")));
    }
    Ok(())
}

/// Resolves the bandwidth, samples evaluation pairs, and reports the MSE of
/// every (kind, D) combination. Columns:
/// `kind,d,D,mse,stderr,runtime_ns`.
pub fn run_mse_curve(cfg: &MseCurveConfig) -> Result<Csv> {
    require_nonempty(&cfg.kinds, "kind list")?;
    require_nonempty(&cfg.proj_grid, "D grid")?;
    if cfg.n_pairs == 0 || cfg.n_seeds == 0 {
        return Err(Error::Config("--pairs and --seeds must be at least 1".into()));
    }
    let d = cfg.data.dim();
    let sigma = match cfg.sigma {
        SigmaChoice::Fixed(s) if s > 0.0 && s.is_finite() => s,
        SigmaChoice::Fixed(s) => {
            return Err(Error::Config(format!("sigma must be positive, got {s}")))
        }
        SigmaChoice::Auto => {
            let s = select_sigma(
                &cfg.data,
                SIGMA_NEIGHBOR_RANK,
                SIGMA_SAMPLE_SIZE,
                child_seed(cfg.seed, seed_channels::SIGMA),
            )?;
            if s <= 0.0 {
                return Err(Error::Domain(
                    "automatic sigma is zero: sampled points coincide with their neighbors"
                        .into(),
                ));
            }
            s
        }
    };

    let pairs = sample_pairs(
        &cfg.data,
        sigma,
        cfg.n_pairs,
        child_seed(cfg.seed, seed_channels::PAIRS),
    )?;

    let exp_root = child_seed(cfg.seed, seed_channels::EXPERIMENT);
    let mut rows = Vec::new();
    for (ki, &kind) in cfg.kinds.iter().enumerate() {
        for (di, &n_proj) in cfg.proj_grid.iter().enumerate() {
            let combo = (ki * cfg.proj_grid.len() + di) as u64;
            let spec =
                TransformSpec::new(kind, d, n_proj, sigma, child_seed(exp_root, combo));
            let report = mse_estimate(&spec, &pairs, cfg.n_seeds)?;
            let runtime_ns = if cfg.timing {
                median_project_ns(&spec, pairs[0].x())?
            } else {
                0
            };
            rows.push(format!(
                "{},{},{},{},{},{}",
                kind,
                d,
                n_proj,
                f64_csv(report.mse),
                f64_csv(report.stderr),
                runtime_ns
            ));
        }
    }
    Ok(Csv {
        header: "kind,d,D,mse,stderr,runtime_ns".into(),
        rows,
    })
}

/// Samples `n_pairs` ordered pairs of distinct dataset rows.
fn sample_pairs(data: &Dataset, sigma: f64, n_pairs: usize, seed: u64) -> Result<Vec<PairSample>> {
    let n = data.len();
    if n < 2 {
        return Err(Error::Input(
            "need at least two points to sample evaluation pairs".into(),
        ));
    }
    let mut rng = rng_from(seed);
    (0..n_pairs)
        .map(|_| {
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            PairSample::new(data.row(i).to_vec(), data.row(j).to_vec(), sigma)
        })
        .collect()
}

/// Median wall time of one `project` call, after warmup.
fn median_project_ns(spec: &TransformSpec, x: &[f64]) -> Result<u64> {
    let map = FeatureMap::build(spec)?;
    for _ in 0..TIMING_WARMUPS {
        std::hint::black_box(map.project(std::hint::black_box(x))?);
    }
    let mut times: Vec<u64> = (0..TIMING_REPS)
        .map(|_| {
            let start = Instant::now();
            let out = map.project(std::hint::black_box(x));
            let elapsed = start.elapsed().as_nanos() as u64;
            out.map(|v| {
                std::hint::black_box(v);
                elapsed
            })
        })
        .collect::<Result<Vec<u64>>>()?;
    times.sort_unstable();
    Ok(times[times.len() / 2])
}

pub struct BiasVarianceConfig {
    pub kinds: Vec<TransformKind>,
    pub d: usize,
    pub n_proj: usize,
    pub z_grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub orientation: PairOrientation,
}

/// Monte-Carlo bias and variance-ratio curves. Columns:
/// `kind,d,z,bias,var_ratio,trials`.
pub fn run_bias_variance(cfg: &BiasVarianceConfig) -> Result<Csv> {
    require_nonempty(&cfg.kinds, "kind list")?;
    require_nonempty(&cfg.z_grid, "z grid")?;
    let exp_root = child_seed(cfg.seed, seed_channels::EXPERIMENT);
    let mut rows = Vec::new();
    for (ki, &kind) in cfg.kinds.iter().enumerate() {
        let report = mc_bias_variance_oriented(
            kind,
            cfg.d,
            cfg.n_proj,
            &cfg.z_grid,
            cfg.trials,
            child_seed(exp_root, ki as u64),
            cfg.orientation,
        )?;
        for (zi, &z) in report.z_grid.iter().enumerate() {
            rows.push(format!(
                "{},{},{},{},{},{}",
                kind,
                cfg.d,
                f64_csv(z),
                f64_csv(report.bias[zi]),
                f64_csv(report.var_ratio[zi]),
                cfg.trials
            ));
        }
    }
    Ok(Csv {
        header: "kind,d,z,bias,var_ratio,trials".into(),
        rows,
    })
}

pub struct OrthoCheckConfig {
    pub d_grid: Vec<usize>,
    pub trials: usize,
    pub t_grid: Vec<f64>,
    pub seed: u64,
}

/// Near-orthogonality diagnostics of the Hadamard-diagonal chain, one row
/// per (d, t). Columns:
/// `d,trials,row_norm_max_dev,recon_max_err,median_max_inner,t,exceed_frac`.
pub fn run_ortho_check(cfg: &OrthoCheckConfig) -> Result<Csv> {
    require_nonempty(&cfg.d_grid, "d grid")?;
    require_nonempty(&cfg.t_grid, "t grid")?;
    let data_root = child_seed(cfg.seed, seed_channels::DATA);
    let exp_root = child_seed(cfg.seed, seed_channels::EXPERIMENT);
    let mut rows = Vec::new();
    for (di, &d) in cfg.d_grid.iter().enumerate() {
        let mut rng = rng_from(child_seed(data_root, di as u64));
        let z: Vec<f64> = (0..d)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let report = near_orthogonality_stats(
            d,
            &z,
            cfg.trials,
            &cfg.t_grid,
            child_seed(exp_root, di as u64),
        )?;
        for (ti, &t) in report.t_grid.iter().enumerate() {
            rows.push(format!(
                "{},{},{},{},{},{},{}",
                d,
                cfg.trials,
                f64_csv(report.row_norm_max_dev),
                f64_csv(report.reconstruction_max_err),
                f64_csv(report.median_max_inner),
                f64_csv(t),
                f64_csv(report.exceedance[ti])
            ));
        }
    }
    Ok(Csv {
        header: "d,trials,row_norm_max_dev,recon_max_err,median_max_inner,t,exceed_frac"
            .into(),
        rows,
    })
}

pub struct AngleSimConfig {
    pub kinds: Vec<TransformKind>,
    pub d: usize,
    pub proj_grid: Vec<usize>,
    /// True angle between the simulated pair, radians in [0, π].
    pub theta: f64,
    pub n_seeds: usize,
    pub seed: u64,
}

/// Sign-embedding angle estimation. Columns:
/// `kind,d,D,theta,mean_estimate,angular_mse,seeds`.
pub fn run_angle_sim(cfg: &AngleSimConfig) -> Result<Csv> {
    require_nonempty(&cfg.kinds, "kind list")?;
    require_nonempty(&cfg.proj_grid, "D grid")?;
    if cfg.n_seeds == 0 {
        return Err(Error::Config("--seeds must be at least 1".into()));
    }
    if !(0.0..=std::f64::consts::PI).contains(&cfg.theta) {
        return Err(Error::Config(format!(
            "--theta must lie in [0, π], got {}",
            cfg.theta
        )));
    }
    let exp_root = child_seed(cfg.seed, seed_channels::EXPERIMENT);
    let mut rows = Vec::new();
    for (ki, &kind) in cfg.kinds.iter().enumerate() {
        for (di, &n_proj) in cfg.proj_grid.iter().enumerate() {
            let combo = (ki * cfg.proj_grid.len() + di) as u64;
            let combo_seed = child_seed(exp_root, combo);
            let mut sum = 0.0;
            let mut sum_sq_err = 0.0;
            for s in 0..cfg.n_seeds {
                let seed_s = child_seed(combo_seed, s as u64);
                let (x, y) = pair_at_angle(cfg.d, cfg.theta, child_seed(seed_s, 0));
                let spec =
                    TransformSpec::new(kind, cfg.d, n_proj, 1.0, child_seed(seed_s, 1));
                let map = FeatureMap::build(&spec)?;
                let bx = sign_features(&map, &x)?;
                let by = sign_features(&map, &y)?;
                let est = angle_estimate(&bx, &by)?;
                sum += est;
                sum_sq_err += (est - cfg.theta) * (est - cfg.theta);
            }
            let n = cfg.n_seeds as f64;
            rows.push(format!(
                "{},{},{},{},{},{},{}",
                kind,
                cfg.d,
                n_proj,
                f64_csv(cfg.theta),
                f64_csv(sum / n),
                f64_csv(sum_sq_err / n),
                cfg.n_seeds
            ));
        }
    }
    Ok(Csv {
        header: "kind,d,D,theta,mean_estimate,angular_mse,seeds".into(),
        rows,
    })
}

/// Two unit vectors at exactly `theta` radians, spanned by a uniformly
/// random orthonormal 2-frame.
fn pair_at_angle(d: usize, theta: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = rng_from(seed);
    loop {
        let mut u: Vec<f64> = (0..d)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let nu: f64 = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nu == 0.0 {
            continue;
        }
        for v in &mut u {
            *v /= nu;
        }
        let g: Vec<f64> = (0..d)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let proj: f64 = g.iter().zip(&u).map(|(a, b)| a * b).sum();
        let mut v: Vec<f64> = g.iter().zip(&u).map(|(a, b)| a - proj * b).collect();
        let nv: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv == 0.0 {
            continue;
        }
        for x in &mut v {
            *x /= nv;
        }
        let y: Vec<f64> = u
            .iter()
            .zip(&v)
            .map(|(a, b)| theta.cos() * a + theta.sin() * b)
            .collect();
        return (u, y);
    }
}

/// The nearest-neighbor bandwidth rule as a one-value CSV.
pub fn run_sigma(data: &Dataset, k: usize, n_sample: usize, seed: u64) -> Result<Csv> {
    let sigma = select_sigma(data, k, n_sample, child_seed(seed, seed_channels::SIGMA))?;
    Ok(Csv {
        header: "sigma".into(),
        rows: vec![f64_csv(sigma)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use orf::dataset::SynthKind;

    fn sphere_data(n: usize, d: usize) -> Dataset {
        Dataset::synth(SynthKind::Sphere, n, d, 99).unwrap()
    }

    #[test]
    fn mse_curve_row_count_and_schema() {
        let cfg = MseCurveConfig {
            kinds: vec![TransformKind::Rff, TransformKind::Sorf],
            data: sphere_data(80, 8),
            sigma: SigmaChoice::Fixed(1.0),
            proj_grid: vec![8, 16, 32],
            n_pairs: 20,
            n_seeds: 2,
            seed: 5,
            timing: false,
        };
        let csv = run_mse_curve(&cfg).unwrap();
        assert_eq!(csv.header, "kind,d,D,mse,stderr,runtime_ns");
        assert_eq!(csv.rows.len(), 6);
        assert!(csv.rows[0].starts_with("rff,8,8,"));
        assert!(csv.rows[5].starts_with("sorf,8,32,"));
        for row in &csv.rows {
            assert!(row.ends_with(",0"), "runtime must be 0 without --timing");
        }
    }

    #[test]
    fn mse_curve_is_deterministic() {
        let cfg = MseCurveConfig {
            kinds: vec![TransformKind::Orf],
            data: sphere_data(60, 8),
            sigma: SigmaChoice::Auto,
            proj_grid: vec![8],
            n_pairs: 10,
            n_seeds: 3,
            seed: 7,
            timing: false,
        };
        assert_eq!(
            run_mse_curve(&cfg).unwrap().to_string(),
            run_mse_curve(&cfg).unwrap().to_string()
        );
    }

    #[test]
    fn mse_curve_rejects_empty_kinds() {
        let cfg = MseCurveConfig {
            kinds: vec![],
            data: sphere_data(60, 8),
            sigma: SigmaChoice::Fixed(1.0),
            proj_grid: vec![8],
            n_pairs: 10,
            n_seeds: 1,
            seed: 0,
            timing: false,
        };
        assert!(matches!(run_mse_curve(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn mse_curve_auto_sigma_rejects_degenerate_data() {
        let data = Dataset::parse_str(
            &"1,1\n".repeat(60),
            orf::dataset::DatasetFormat::DenseCsv,
            "t",
        )
        .unwrap();
        let cfg = MseCurveConfig {
            kinds: vec![TransformKind::Rff],
            data,
            sigma: SigmaChoice::Auto,
            proj_grid: vec![4],
            n_pairs: 5,
            n_seeds: 1,
            seed: 0,
            timing: false,
        };
        assert!(matches!(run_mse_curve(&cfg), Err(Error::Domain(_))));
    }

    #[test]
    fn bias_variance_rows_match_grid() {
        let cfg = BiasVarianceConfig {
            kinds: vec![TransformKind::Rff, TransformKind::Sorf],
            d: 8,
            n_proj: 8,
            z_grid: vec![0.5, 1.0, 2.0],
            trials: 300,
            seed: 3,
            orientation: PairOrientation::Randomized,
        };
        let csv = run_bias_variance(&cfg).unwrap();
        assert_eq!(csv.rows.len(), 6);
        assert_eq!(csv.header, "kind,d,z,bias,var_ratio,trials");
    }

    #[test]
    fn rff_var_ratio_column_is_near_one() {
        let cfg = BiasVarianceConfig {
            kinds: vec![TransformKind::Rff],
            d: 16,
            n_proj: 16,
            z_grid: vec![0.5, 1.0, 2.0],
            trials: 20_000,
            seed: 11,
            orientation: PairOrientation::Randomized,
        };
        let csv = run_bias_variance(&cfg).unwrap();
        for row in &csv.rows {
            let ratio: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
            assert!((ratio - 1.0).abs() < 0.05, "ratio {ratio} in {row}");
        }
    }

    #[test]
    fn orf_var_ratio_minimum_matches_closed_form_oracle() {
        // Numerical oracle: argmin over the grid of the closed-form ratio.
        // (The Eq.-(6) curve is increasing in z, so both land on the first
        // grid point.)
        let z_grid = vec![0.25, 0.5, 1.0, 1.5, 2.0, 3.0];
        let d = 64;
        let oracle_argmin = z_grid
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                let ra = orf::kernel_eval::var_ratio_closed(**a, d, d).unwrap();
                let rb = orf::kernel_eval::var_ratio_closed(**b, d, d).unwrap();
                ra.total_cmp(&rb)
            })
            .unwrap()
            .0;
        assert_eq!(oracle_argmin, 0);

        let cfg = BiasVarianceConfig {
            kinds: vec![TransformKind::Orf],
            d,
            n_proj: d,
            z_grid: z_grid.clone(),
            trials: 4000,
            seed: 17,
            orientation: PairOrientation::Randomized,
        };
        let csv = run_bias_variance(&cfg).unwrap();
        let ratios: Vec<f64> = csv
            .rows
            .iter()
            .map(|row| row.split(',').nth(4).unwrap().parse().unwrap())
            .collect();
        let empirical_argmin = ratios
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.total_cmp(b))
            .unwrap()
            .0;
        assert_eq!(empirical_argmin, oracle_argmin, "ratios {ratios:?}");
    }

    #[test]
    fn ortho_check_rows_and_row_norms() {
        let cfg = OrthoCheckConfig {
            d_grid: vec![8, 16],
            trials: 100,
            t_grid: vec![0.2, 0.5],
            seed: 9,
            };
        let csv = run_ortho_check(&cfg).unwrap();
        assert_eq!(csv.rows.len(), 4);
        for row in &csv.rows {
            let dev: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
            assert!(dev <= 1e-10, "row-norm deviation {dev}");
        }
    }

    #[test]
    fn angle_sim_mse_decreases_with_proj_count() {
        let cfg = AngleSimConfig {
            kinds: vec![TransformKind::Rff, TransformKind::Sorf],
            d: 32,
            proj_grid: vec![256, 1024, 4096],
            theta: std::f64::consts::PI / 3.0,
            n_seeds: 40,
            seed: 13,
        };
        let csv = run_angle_sim(&cfg).unwrap();
        assert_eq!(csv.rows.len(), 6);
        for kind_rows in csv.rows.chunks(3) {
            let mses: Vec<f64> = kind_rows
                .iter()
                .map(|row| row.split(',').nth(5).unwrap().parse().unwrap())
                .collect();
            assert!(
                mses[0] > mses[1] && mses[1] > mses[2],
                "angular MSE not decreasing: {mses:?}"
            );
        }
    }

    #[test]
    fn angle_sim_validates_theta() {
        let cfg = AngleSimConfig {
            kinds: vec![TransformKind::Rff],
            d: 8,
            proj_grid: vec![16],
            theta: 4.0,
            n_seeds: 2,
            seed: 0,
        };
        assert!(matches!(run_angle_sim(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn sigma_runner_emits_one_value() {
        let csv = run_sigma(&sphere_data(80, 4), 5, 100, 3).unwrap();
        assert_eq!(csv.header, "sigma");
        assert_eq!(csv.rows.len(), 1);
        let val: f64 = csv.rows[0].parse().unwrap();
        assert!(val > 0.0);
    }

    #[test]
    fn pair_at_angle_is_exact() {
        for theta in [0.3, std::f64::consts::PI / 3.0, 2.0] {
            let (x, y) = pair_at_angle(24, theta, 55);
            let dot: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            let nx: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let ny: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((nx - 1.0).abs() < 1e-12);
            assert!((ny - 1.0).abs() < 1e-12);
            assert!((dot.acos() - theta).abs() < 1e-9);
        }
    }
}
