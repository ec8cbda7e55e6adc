//! The transform families (RFF, ORF, ORF′, SORF, HDHD, HD) and the sin/cos
//! feature map.
//!
//! A [`TransformSpec`] fully determines a [`FeatureMap`]: the map is rebuilt
//! bit-identically from `(kind, d_input, n_proj, sigma, seed)`, so the spec is
//! also the canonical serialization format (see [`TransformSpec::to_json`]).

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, DVectorView};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{child_seed, rng_from};
use crate::transforms::{
    apply_hd_chain, sample_chi_diagonal, sample_haar_orthogonal, sample_sign_diagonal,
    ChiDiagonal, HadamardDim, OrthogonalMatrix, SignDiagonal,
};

/// Version tag embedded in serialized specs.
pub const SPEC_FORMAT_VERSION: u32 = 1;

/// The supported linear-transformation families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformKind {
    /// `W = G/σ`, `G` i.i.d. standard normal.
    Rff,
    /// `W = SQ/σ`: Haar-orthogonal `Q`, χ_d diagonal `S`.
    Orf,
    /// `W = √d·Q/σ`: ORF with the χ rescaling replaced by the scalar `√d`.
    OrfPrime,
    /// `W = (√d/σ)·HD₁HD₂HD₃`: three Hadamard-diagonal blocks.
    Sorf,
    /// Two Hadamard-diagonal blocks (SORF ablation).
    Hdhd,
    /// One Hadamard-diagonal block (SORF ablation).
    Hd,
}

impl TransformKind {
    pub const ALL: [TransformKind; 6] = [
        TransformKind::Rff,
        TransformKind::Orf,
        TransformKind::OrfPrime,
        TransformKind::Sorf,
        TransformKind::Hdhd,
        TransformKind::Hd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Rff => "rff",
            TransformKind::Orf => "orf",
            TransformKind::OrfPrime => "orf-prime",
            TransformKind::Sorf => "sorf",
            TransformKind::Hdhd => "hdhd",
            TransformKind::Hd => "hd",
        }
    }

    /// Hadamard-chain kinds operate on a zero-padded power-of-two dimension;
    /// the dense kinds use the input dimension as-is.
    pub fn uses_hadamard(self) -> bool {
        matches!(
            self,
            TransformKind::Sorf | TransformKind::Hdhd | TransformKind::Hd
        )
    }

    fn hd_block_count(self) -> usize {
        match self {
            TransformKind::Sorf => 3,
            TransformKind::Hdhd => 2,
            TransformKind::Hd => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rff" => Ok(TransformKind::Rff),
            "orf" => Ok(TransformKind::Orf),
            "orf-prime" | "orfprime" | "orf'" => Ok(TransformKind::OrfPrime),
            "sorf" | "hdhdhd" => Ok(TransformKind::Sorf),
            "hdhd" => Ok(TransformKind::Hdhd),
            "hd" => Ok(TransformKind::Hd),
            other => Err(Error::Config(format!(
                "unknown transform kind '{other}' (expected one of rff, orf, orf-prime, sorf, hdhd, hd)"
            ))),
        }
    }
}

/// Declarative description of a feature map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec {
    pub kind: TransformKind,
    /// Input dimension `d`.
    pub d_input: usize,
    /// Number of projection directions `D`; the feature vector has length `2D`.
    pub n_proj: usize,
    /// Gaussian kernel bandwidth.
    pub sigma: f64,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
struct VersionedSpec {
    version: u32,
    #[serde(flatten)]
    spec: TransformSpec,
}

impl TransformSpec {
    pub fn new(kind: TransformKind, d_input: usize, n_proj: usize, sigma: f64, seed: u64) -> Self {
        Self {
            kind,
            d_input,
            n_proj,
            sigma,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d_input == 0 {
            return Err(Error::Config("d_input must be positive".into()));
        }
        if self.n_proj == 0 {
            return Err(Error::Config("n_proj must be positive".into()));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::Config(format!(
                "sigma must be a positive finite real, got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    /// Internal (possibly padded) block dimension for this spec.
    pub fn d_padded(&self) -> Result<usize> {
        if self.kind.uses_hadamard() {
            Ok(HadamardDim::enclosing(self.d_input)?.get())
        } else if self.d_input == 0 {
            Err(Error::Config("d_input must be positive".into()))
        } else {
            Ok(self.d_input)
        }
    }

    /// Serializes as a versioned JSON blob.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&VersionedSpec {
            version: SPEC_FORMAT_VERSION,
            spec: self.clone(),
        })
        .expect("spec serialization cannot fail")
    }

    /// Parses a blob written by [`TransformSpec::to_json`].
    pub fn from_json(text: &str) -> Result<Self> {
        let versioned: VersionedSpec = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("invalid transform spec: {e}")))?;
        if versioned.version != SPEC_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "unsupported spec format version {} (expected {})",
                versioned.version, SPEC_FORMAT_VERSION
            )));
        }
        versioned.spec.validate()?;
        Ok(versioned.spec)
    }
}

/// Per-block random state.
#[derive(Debug, Clone)]
enum Block {
    /// RFF: the scaled Gaussian matrix `G/σ`, stored verbatim.
    Dense(DMatrix<f64>),
    /// ORF: `(1/σ)·S·Q` kept as its factors.
    ChiOrthogonal {
        chi: ChiDiagonal,
        q: OrthogonalMatrix,
    },
    /// ORF′: `(√d/σ)·Q`.
    ScaledOrthogonal(OrthogonalMatrix),
    /// SORF/HDHD/HD: sign diagonals in application order (innermost first).
    HdChain(Vec<SignDiagonal>),
}

/// A built, immutable transform. Apply with [`FeatureMap::project`] (the raw
/// linear map `Wx`) or [`FeatureMap::features`] (the sin/cos embedding).
#[derive(Debug, Clone)]
pub struct FeatureMap {
    spec: TransformSpec,
    d_padded: usize,
    blocks: Vec<Block>,
}

/// The sin/cos embedding of one point; always unit-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }
}

impl FeatureMap {
    /// Draws all random state for `spec`. Block `b` uses child seed
    /// `child_seed(spec.seed, b)`; components within a block use nested
    /// children of that seed.
    pub fn build(spec: &TransformSpec) -> Result<Self> {
        spec.validate()?;
        let d_padded = spec.d_padded()?;
        let n_blocks = spec.n_proj.div_ceil(d_padded);
        let mut blocks = Vec::with_capacity(n_blocks);
        for b in 0..n_blocks {
            let block_seed = child_seed(spec.seed, b as u64);
            blocks.push(Self::build_block(spec, d_padded, block_seed)?);
        }
        Ok(Self {
            spec: spec.clone(),
            d_padded,
            blocks,
        })
    }

    fn build_block(spec: &TransformSpec, d: usize, block_seed: u64) -> Result<Block> {
        match spec.kind {
            TransformKind::Rff => {
                let mut rng = rng_from(child_seed(block_seed, 0));
                let inv_sigma = 1.0 / spec.sigma;
                let g = DMatrix::from_fn(d, d, |_, _| {
                    rng.sample::<f64, _>(StandardNormal) * inv_sigma
                });
                Ok(Block::Dense(g))
            }
            TransformKind::Orf => Ok(Block::ChiOrthogonal {
                q: sample_haar_orthogonal(d, child_seed(block_seed, 0))?,
                chi: sample_chi_diagonal(d, child_seed(block_seed, 1))?,
            }),
            TransformKind::OrfPrime => Ok(Block::ScaledOrthogonal(sample_haar_orthogonal(
                d,
                child_seed(block_seed, 0),
            )?)),
            TransformKind::Sorf | TransformKind::Hdhd | TransformKind::Hd => {
                let k = spec.kind.hd_block_count();
                let signs = (0..k)
                    .map(|i| sample_sign_diagonal(d, child_seed(block_seed, i as u64)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Block::HdChain(signs))
            }
        }
    }

    pub fn spec(&self) -> &TransformSpec {
        &self.spec
    }

    /// Block dimension after padding (equals `d_input` for dense kinds).
    pub fn d_padded(&self) -> usize {
        self.d_padded
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Number of projection directions `D`.
    pub fn n_proj(&self) -> usize {
        self.spec.n_proj
    }

    /// The linear transform `Wx`, of length `n_proj`. `O(D·d)` for the dense
    /// kinds and `O(D log d)` for the Hadamard-chain kinds.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.spec.d_input {
            return Err(Error::Dimension(format!(
                "expected input of length {}, got {}",
                self.spec.d_input,
                x.len()
            )));
        }
        let mut padded;
        let input: &[f64] = if self.d_padded == x.len() {
            x
        } else {
            padded = vec![0.0; self.d_padded];
            padded[..x.len()].copy_from_slice(x);
            &padded
        };

        let mut out = Vec::with_capacity(self.blocks.len() * self.d_padded);
        for block in &self.blocks {
            let u = self.apply_block(block, input)?;
            out.extend_from_slice(&u);
        }
        out.truncate(self.spec.n_proj);
        Ok(out)
    }

    fn apply_block(&self, block: &Block, x: &[f64]) -> Result<Vec<f64>> {
        let d = self.d_padded;
        let sigma = self.spec.sigma;
        let xv = DVectorView::from_slice(x, d);
        match block {
            Block::Dense(g) => Ok((g * xv).as_slice().to_vec()),
            Block::ChiOrthogonal { chi, q } => {
                let mut u: DVector<f64> = q.matrix() * xv;
                for (ui, si) in u.iter_mut().zip(chi.entries()) {
                    *ui *= si / sigma;
                }
                Ok(u.as_slice().to_vec())
            }
            Block::ScaledOrthogonal(q) => {
                let scale = (d as f64).sqrt() / sigma;
                let u: DVector<f64> = q.matrix() * xv * scale;
                Ok(u.as_slice().to_vec())
            }
            Block::HdChain(signs) => {
                let scale = (d as f64).sqrt() / sigma;
                apply_hd_chain(x, signs, scale)
            }
        }
    }

    /// The feature embedding `√(1/D)·[sin(Wx); cos(Wx)]`, of length `2D`.
    pub fn features(&self, x: &[f64]) -> Result<FeatureVector> {
        let u = self.project(x)?;
        let scale = (1.0 / self.spec.n_proj as f64).sqrt();
        let mut values = Vec::with_capacity(2 * u.len());
        values.extend(u.iter().map(|v| v.sin() * scale));
        values.extend(u.iter().map(|v| v.cos() * scale));
        Ok(FeatureVector { values })
    }

    /// The explicit `n_proj × d_padded` matrix `W` with `Wx = project(x)`
    /// (up to zero-padding of `x`). Intended as a testing oracle and for
    /// row-level diagnostics; the fast paths never materialize it.
    pub fn materialize(&self) -> DMatrix<f64> {
        let d = self.d_padded;
        let sigma = self.spec.sigma;
        let mut w = DMatrix::zeros(self.spec.n_proj, d);
        let mut row0 = 0usize;
        for block in &self.blocks {
            let rows = (self.spec.n_proj - row0).min(d);
            match block {
                Block::Dense(g) => {
                    for i in 0..rows {
                        for j in 0..d {
                            w[(row0 + i, j)] = g[(i, j)];
                        }
                    }
                }
                Block::ChiOrthogonal { chi, q } => {
                    for i in 0..rows {
                        let s = chi.entries()[i] / sigma;
                        for j in 0..d {
                            w[(row0 + i, j)] = s * q.matrix()[(i, j)];
                        }
                    }
                }
                Block::ScaledOrthogonal(q) => {
                    let scale = (d as f64).sqrt() / sigma;
                    for i in 0..rows {
                        for j in 0..d {
                            w[(row0 + i, j)] = scale * q.matrix()[(i, j)];
                        }
                    }
                }
                Block::HdChain(signs) => {
                    let scale = (d as f64).sqrt() / sigma;
                    let mut basis = vec![0.0; d];
                    for j in 0..d {
                        basis[j] = 1.0;
                        let col = apply_hd_chain(&basis, signs, scale)
                            .expect("chain validated at build time");
                        basis[j] = 0.0;
                        for i in 0..rows {
                            w[(row0 + i, j)] = col[i];
                        }
                    }
                }
            }
            row0 += rows;
            if row0 == self.spec.n_proj {
                break;
            }
        }
        w
    }
}
