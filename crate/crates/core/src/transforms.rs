//! Low-level randomized linear algebra: the fast Walsh–Hadamard transform,
//! Haar-orthogonal matrix sampling, and the χ_d / Rademacher diagonal
//! samplers used to assemble feature maps.
//!
//! All samplers are pure functions of `(dimension, seed)` and are
//! bit-reproducible; see [`crate::seed`].

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::seed;

/// Per-entry tolerance for the `QᵀQ = I` check on [`OrthogonalMatrix`].
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// A power-of-two transform dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HadamardDim(usize);

impl HadamardDim {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 || !d.is_power_of_two() {
            return Err(Error::Dimension(format!(
                "Hadamard dimension must be a power of two, got {d}"
            )));
        }
        Ok(Self(d))
    }

    /// Smallest power of two that is ≥ `d`.
    pub fn enclosing(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Dimension("dimension must be positive".into()));
        }
        Ok(Self(d.next_power_of_two()))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// In-place fast Walsh–Hadamard transform, normalized by `1/√d` so the
/// transform is orthonormal (and therefore involutory). `O(d log d)`.
pub fn fwht(values: &mut [f64]) -> Result<()> {
    let d = values.len();
    HadamardDim::new(d)?;
    let mut half = 1;
    while half < d {
        for block in values.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let u = *a;
                let v = *b;
                *a = u + v;
                *b = u - v;
            }
        }
        half *= 2;
    }
    let norm = 1.0 / (d as f64).sqrt();
    for v in values.iter_mut() {
        *v *= norm;
    }
    Ok(())
}

/// A ±1 diagonal (Rademacher sign-flipping matrix).
#[derive(Debug, Clone, PartialEq)]
pub struct SignDiagonal {
    entries: Vec<f64>,
}

impl SignDiagonal {
    /// Builds from explicit entries; every entry must be exactly ±1.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Dimension("sign diagonal must be non-empty".into()));
        }
        if let Some(bad) = entries.iter().find(|&&e| e != 1.0 && e != -1.0) {
            return Err(Error::Input(format!(
                "sign diagonal entries must be exactly +1 or -1, got {bad}"
            )));
        }
        Ok(Self { entries })
    }

    /// All-ones diagonal (the identity).
    pub fn identity(d: usize) -> Self {
        Self {
            entries: vec![1.0; d],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Multiplies `v` elementwise by the diagonal.
    pub fn apply(&self, v: &mut [f64]) -> Result<()> {
        if v.len() != self.entries.len() {
            return Err(Error::Dimension(format!(
                "sign diagonal has length {}, vector has length {}",
                self.entries.len(),
                v.len()
            )));
        }
        for (x, s) in v.iter_mut().zip(&self.entries) {
            *x *= s;
        }
        Ok(())
    }
}

/// A positive diagonal with entries drawn i.i.d. from the χ-distribution
/// with `d` degrees of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiDiagonal {
    entries: Vec<f64>,
}

impl ChiDiagonal {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// A square matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalMatrix {
    q: DMatrix<f64>,
}

impl OrthogonalMatrix {
    /// Validates `QᵀQ = I` to [`ORTHOGONALITY_TOL`] per entry.
    pub fn new(q: DMatrix<f64>) -> Result<Self> {
        if q.nrows() != q.ncols() || q.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "orthogonal matrix must be square and non-empty, got {}x{}",
                q.nrows(),
                q.ncols()
            )));
        }
        let gram = q.transpose() * &q;
        let d = q.nrows();
        for i in 0..d {
            for j in 0..d {
                let expect = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - expect).abs() > ORTHOGONALITY_TOL {
                    return Err(Error::Input(format!(
                        "matrix is not orthogonal: |QᵀQ - I| = {:e} at ({i},{j})",
                        (gram[(i, j)] - expect).abs()
                    )));
                }
            }
        }
        Ok(Self { q })
    }

    // QR output is orthogonal by construction; skip the O(d³) recheck.
    fn from_qr(q: DMatrix<f64>) -> Self {
        Self { q }
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.q
    }
}

/// Samples a Haar-uniform random orthogonal matrix: QR-decompose a `d×d`
/// standard Gaussian matrix and flip each column of `Q` by the sign of the
/// corresponding diagonal entry of `R`. Without the sign correction the
/// decomposition's sign convention biases the distribution away from Haar.
pub fn sample_haar_orthogonal(d: usize, seed: u64) -> Result<OrthogonalMatrix> {
    if d == 0 {
        return Err(Error::Dimension(
            "orthogonal matrix dimension must be positive".into(),
        ));
    }
    let mut rng = seed::rng_from(seed);
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            for i in 0..d {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    Ok(OrthogonalMatrix::from_qr(q))
}

/// Samples `d` i.i.d. χ_d entries, each computed as the Euclidean norm of
/// `d` independent standard normals.
pub fn sample_chi_diagonal(d: usize, seed: u64) -> Result<ChiDiagonal> {
    if d == 0 {
        return Err(Error::Dimension(
            "chi diagonal dimension must be positive".into(),
        ));
    }
    let mut rng = seed::rng_from(seed);
    let entries = (0..d)
        .map(|_| {
            let mut sum_sq = 0.0;
            for _ in 0..d {
                let g: f64 = rng.sample(StandardNormal);
                sum_sq += g * g;
            }
            sum_sq.sqrt()
        })
        .collect();
    Ok(ChiDiagonal { entries })
}

/// Samples `d` i.i.d. Rademacher (±1 uniform) entries.
pub fn sample_sign_diagonal(d: usize, seed: u64) -> Result<SignDiagonal> {
    if d == 0 {
        return Err(Error::Dimension(
            "sign diagonal dimension must be positive".into(),
        ));
    }
    let mut rng = seed::rng_from(seed);
    let entries = (0..d)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    Ok(SignDiagonal { entries })
}

/// Applies `scale · H D_k ⋯ H D_1 x`: `diagonals[0]` is applied first and
/// every diagonal multiply is followed by one Hadamard pass. With three
/// diagonals and `scale = √d/σ` this is the SORF transform; with one or two
/// it is the HD / HDHD ablation.
pub fn apply_hd_chain(x: &[f64], diagonals: &[SignDiagonal], scale: f64) -> Result<Vec<f64>> {
    if diagonals.is_empty() || diagonals.len() > 3 {
        return Err(Error::Config(format!(
            "HD chain takes 1 to 3 diagonals, got {}",
            diagonals.len()
        )));
    }
    HadamardDim::new(x.len())?;
    let mut out = x.to_vec();
    for diag in diagonals {
        diag.apply(&mut out)?;
        fwht(&mut out)?;
    }
    for v in &mut out {
        *v *= scale;
    }
    Ok(out)
}
