use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use orf::dataset::{Dataset, DatasetFormat, SynthKind};
use orf::error::{Error, Result};
use orf::feature_maps::TransformKind;
use orf::seed::child_seed;
use orf::simulate::PairOrientation;

use orf_cli::{
    run_angle_sim, run_bias_variance, run_mse_curve, run_ortho_check, run_sigma,
    seed_channels, AngleSimConfig, BiasVarianceConfig, Csv, MseCurveConfig,
    OrthoCheckConfig, SigmaChoice,
};

/// Kernel-approximation experiment runner: random Fourier features with
/// orthogonal and Hadamard-structured variants. All subcommands emit CSV and
/// are byte-deterministic for a fixed --seed.
#[derive(Parser)]
#[command(name = "orf", version, about)]
struct Cli {
    /// Worker threads (default: one per core). Output does not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kernel approximation MSE across transform kinds and feature counts.
    MseCurve(MseCurveArgs),
    /// Monte-Carlo bias and variance-ratio curves over z.
    BiasVariance(BiasVarianceArgs),
    /// Near-orthogonality diagnostics of the Hadamard-diagonal chain.
    OrthoCheck(OrthoCheckArgs),
    /// Sign-embedding angle estimation accuracy.
    AngleSim(AngleSimArgs),
    /// Bandwidth from the mean k-th-nearest-neighbor distance rule.
    Sigma(SigmaArgs),
    /// Generate a synthetic dataset as headerless CSV.
    Synth(SynthArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Load points from this file.
    #[arg(long)]
    input: Option<PathBuf>,

    /// Input layout: dense-csv or whitespace.
    #[arg(long, default_value = "dense-csv")]
    format: String,

    /// Generate points instead of loading: gaussian or sphere.
    #[arg(long)]
    synth: Option<String>,

    /// Number of generated points (with --synth).
    #[arg(long, default_value_t = 1000)]
    n: usize,

    /// Dimension of generated points (with --synth).
    #[arg(long = "d")]
    d: Option<usize>,
}

impl DataArgs {
    fn resolve(&self, seed: u64) -> Result<Dataset> {
        match (&self.input, &self.synth) {
            (Some(_), Some(_)) => Err(Error::Config(
                "pass either --input or --synth, not both".into(),
            )),
            (Some(path), None) => {
                let format: DatasetFormat = self.format.parse()?;
                Dataset::load(path, format)
            }
            (None, Some(kind)) => {
                let kind: SynthKind = kind.parse()?;
                let d = self.d.ok_or_else(|| {
                    Error::Config("--synth requires --d for the point dimension".into())
                })?;
                Dataset::synth(kind, self.n, d, child_seed(seed, seed_channels::DATA))
            }
            (None, None) => Err(Error::Config(
                "no dataset: pass --input PATH or --synth gaussian|sphere".into(),
            )),
        }
    }
}

#[derive(Args)]
struct MseCurveArgs {
    #[command(flatten)]
    data: DataArgs,

    /// Comma-separated transform kinds (rff, orf, orf-prime, sorf, hdhd, hd).
    #[arg(long = "kind", value_delimiter = ',', default_value = "rff,orf,sorf")]
    kinds: Vec<String>,

    /// Comma-separated grid of projection counts D.
    #[arg(long = "D", value_delimiter = ',', default_value = "64,256")]
    proj: Vec<usize>,

    /// Kernel bandwidth: a number, or 'auto' for the 50th-NN rule.
    #[arg(long, default_value = "auto")]
    sigma: String,

    /// Independent map draws to average over.
    #[arg(long, default_value_t = 20)]
    seeds: usize,

    /// Evaluation pairs sampled from the dataset.
    #[arg(long, default_value_t = 500)]
    pairs: usize,

    /// Root seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Measure per-transform wall time (makes output non-deterministic).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct BiasVarianceArgs {
    #[arg(long = "kind", value_delimiter = ',', default_value = "rff,orf,sorf")]
    kinds: Vec<String>,

    /// Input dimension d.
    #[arg(long = "d", default_value_t = 64)]
    d: usize,

    /// Projection count D (single value).
    #[arg(long = "D")]
    proj: Option<usize>,

    /// Comma-separated grid of normalized distances z.
    #[arg(long = "z", value_delimiter = ',', default_value = "0.5,1,1.5,2,3")]
    z_grid: Vec<f64>,

    /// Fresh maps per grid point.
    #[arg(long, default_value_t = orf::simulate::DEFAULT_TRIALS)]
    trials: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Keep the pair direction fixed at e₁ instead of randomizing per trial.
    #[arg(long)]
    fixed_direction: bool,
}

#[derive(Args)]
struct OrthoCheckArgs {
    /// Comma-separated grid of (power-of-two) dimensions.
    #[arg(long = "d", value_delimiter = ',', default_value = "64,256,1024")]
    d_grid: Vec<usize>,

    /// Inner-product thresholds t to report exceedance rates for.
    #[arg(long = "t", value_delimiter = ',', default_value = "0.05,0.1,0.2")]
    t_grid: Vec<f64>,

    #[arg(long, default_value_t = 10_000)]
    trials: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct AngleSimArgs {
    #[arg(long = "kind", value_delimiter = ',', default_value = "rff,sorf")]
    kinds: Vec<String>,

    /// Input dimension d.
    #[arg(long = "d", default_value_t = 64)]
    d: usize,

    /// Comma-separated grid of code lengths D.
    #[arg(long = "D", value_delimiter = ',', default_value = "256,1024,4096")]
    proj: Vec<usize>,

    /// True pair angle in radians.
    #[arg(long, default_value_t = std::f64::consts::PI / 3.0)]
    theta: f64,

    /// Independent map draws per configuration.
    #[arg(long, default_value_t = 50)]
    seeds: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SigmaArgs {
    #[command(flatten)]
    data: DataArgs,

    /// Neighbor rank k.
    #[arg(long, default_value_t = 50)]
    k: usize,

    /// Number of sampled query points.
    #[arg(long, default_value_t = 1000)]
    sample: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SynthArgs {
    /// Dataset kind: gaussian or sphere.
    #[arg(long)]
    kind: String,

    #[arg(long)]
    n: usize,

    #[arg(long = "d")]
    d: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_kinds(raw: &[String]) -> Result<Vec<TransformKind>> {
    if raw.is_empty() {
        return Err(Error::Config("at least one --kind is required".into()));
    }
    raw.iter().map(|s| s.parse()).collect()
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(match err {
            Error::Config(_) | Error::Dimension(_) => 2,
            Error::Input(_) | Error::Parse { .. } | Error::Io(_) => 3,
            Error::Domain(_) => 4,
        });
    }
}

fn run(cli: Cli) -> Result<()> {
    let output = match cli.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
            pool.install(|| dispatch(&cli.command))?
        }
        None => dispatch(&cli.command)?,
    };
    match &cli.out {
        Some(path) => fs::write(path, output)?,
        None => print!("{output}"),
    }
    Ok(())
}

fn dispatch(command: &Command) -> Result<String> {
    match command {
        Command::MseCurve(args) => {
            let cfg = MseCurveConfig {
                kinds: parse_kinds(&args.kinds)?,
                data: args.data.resolve(args.seed)?,
                sigma: args.sigma.parse::<SigmaChoice>()?,
                proj_grid: args.proj.clone(),
                n_pairs: args.pairs,
                n_seeds: args.seeds,
                seed: args.seed,
                timing: args.timing,
            };
            run_mse_curve(&cfg).map(render)
        }
        Command::BiasVariance(args) => {
            let cfg = BiasVarianceConfig {
                kinds: parse_kinds(&args.kinds)?,
                d: args.d,
                n_proj: args.proj.unwrap_or(args.d),
                z_grid: args.z_grid.clone(),
                trials: args.trials,
                seed: args.seed,
                orientation: if args.fixed_direction {
                    PairOrientation::Fixed
                } else {
                    PairOrientation::Randomized
                },
            };
            run_bias_variance(&cfg).map(render)
        }
        Command::OrthoCheck(args) => {
            let cfg = OrthoCheckConfig {
                d_grid: args.d_grid.clone(),
                trials: args.trials,
                t_grid: args.t_grid.clone(),
                seed: args.seed,
            };
            run_ortho_check(&cfg).map(render)
        }
        Command::AngleSim(args) => {
            let cfg = AngleSimConfig {
                kinds: parse_kinds(&args.kinds)?,
                d: args.d,
                proj_grid: args.proj.clone(),
                theta: args.theta,
                n_seeds: args.seeds,
                seed: args.seed,
            };
            run_angle_sim(&cfg).map(render)
        }
        Command::Sigma(args) => {
            let data = args.data.resolve(args.seed)?;
            run_sigma(&data, args.k, args.sample, args.seed).map(render)
        }
        Command::Synth(args) => {
            let kind: SynthKind = args.kind.parse()?;
            let data = Dataset::synth(
                kind,
                args.n,
                args.d,
                child_seed(args.seed, seed_channels::DATA),
            )?;
            Ok(data.to_csv())
        }
    }
}

fn render(csv: Csv) -> String {
    csv.to_string()
}
