//! Temporary measurement harness (deleted before shipping).

use orf::dataset::{Dataset, SynthKind};
use orf::feature_maps::{TransformKind, TransformSpec};
use orf::kernel_eval::{mse_estimate, select_sigma, PairSample};
use orf::seed::rng_from;
use rand::Rng;

fn pairs_from(data: &Dataset, sigma: f64, n_pairs: usize, seed: u64) -> Vec<PairSample> {
    let mut rng = rng_from(seed);
    (0..n_pairs)
        .map(|_| {
            let i = rng.random_range(0..data.len());
            let mut j = rng.random_range(0..data.len() - 1);
            if j >= i {
                j += 1;
            }
            PairSample::new(data.row(i).to_vec(), data.row(j).to_vec(), sigma).unwrap()
        })
        .collect()
}

fn report(label: &str, data: &Dataset, sigma: f64, n_seeds: usize) {
    let d = data.dim();
    let pairs = pairs_from(data, sigma, 500, 602);
    let mean_z = pairs.iter().map(|p| p.z()).sum::<f64>() / pairs.len() as f64;
    println!("== {label}: d={d} sigma={sigma:.4} mean z={mean_z:.3}");
    for n_proj in [64usize, 256] {
        for kind in [
            TransformKind::Rff,
            TransformKind::Orf,
            TransformKind::Sorf,
            TransformKind::Hdhd,
            TransformKind::Hd,
        ] {
            let spec = TransformSpec::new(kind, d, n_proj, sigma, 7100);
            let r = mse_estimate(&spec, &pairs, n_seeds).unwrap();
            println!(
                "   D={n_proj:3} {kind:9} mse {:.4e} ± {:.2e}",
                r.mse, r.stderr
            );
        }
    }
}

#[test]
fn measure_effects() {
    // Sphere (criterion fixture).
    let sphere = Dataset::synth(SynthKind::Sphere, 1000, 64, 600).unwrap();
    let sigma = select_sigma(&sphere, 50, 1000, 601).unwrap();
    report("sphere", &sphere, sigma, 200);

    // Anisotropic gaussian: coordinate k scaled by 1/(k+1).
    let gauss = Dataset::synth(SynthKind::Gaussian, 1000, 64, 610).unwrap();
    let scaled_rows: Vec<String> = gauss
        .rows()
        .map(|r| {
            r.iter()
                .enumerate()
                .map(|(k, v)| orf::fmt::f64_csv(v / (k as f64 + 1.0)))
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    let aniso = Dataset::parse_str(
        &scaled_rows.join("\n"),
        orf::dataset::DatasetFormat::DenseCsv,
        "aniso",
    )
    .unwrap();
    let sigma_a = select_sigma(&aniso, 50, 1000, 611).unwrap();
    report("anisotropic 1/(k+1)", &aniso, sigma_a, 200);

    // Sparse: 4 random non-zero gaussian coordinates per point.
    let mut rng = rng_from(620);
    let mut rows = Vec::new();
    for _ in 0..1000 {
        let mut row = vec![0.0f64; 64];
        for _ in 0..4 {
            let idx = rng.random_range(0..64);
            row[idx] = rng.random::<f64>() * 2.0 - 1.0;
        }
        rows.push(
            row.iter()
                .map(|v| orf::fmt::f64_csv(*v))
                .collect::<Vec<_>>()
                .join(","),
        );
    }
    let sparse = Dataset::parse_str(
        &rows.join("\n"),
        orf::dataset::DatasetFormat::DenseCsv,
        "sparse",
    )
    .unwrap();
    let sigma_s = select_sigma(&sparse, 50, 1000, 621).unwrap();
    report("sparse-4", &sparse, sigma_s, 200);
}
