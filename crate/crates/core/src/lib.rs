//! Gaussian kernel approximation with random Fourier features and their
//! orthogonal variants.
//!
//! The crate implements the feature-map families
//!
//! * **RFF** — the classic random Fourier feature map, `W = G/σ` with `G`
//!   i.i.d. standard normal,
//! * **ORF** — orthogonal random features, `W = SQ/σ` with `Q` Haar-orthogonal
//!   and `S` a χ_d-distributed row rescaling,
//! * **ORF′** — the simplified variant `W = √d·Q/σ`,
//! * **SORF / HDHD / HD** — structured orthogonal features built from one to
//!   three Hadamard-diagonal blocks, applied in `O(d log d)` via the fast
//!   Walsh–Hadamard transform,
//!
//! together with the exact Gaussian kernel, closed-form variance expressions,
//! Monte-Carlo bias/variance harnesses, and a sign-projection binary embedding
//! for angle estimation.
//!
//! Everything randomized takes an explicit `u64` seed and is bit-reproducible;
//! see [`seed`] for the child-seed derivation scheme.

pub mod binembed;
pub mod dataset;
pub mod error;
pub mod feature_maps;
pub mod fmt;
pub mod kernel_eval;
pub mod seed;
pub mod simulate;
pub mod transforms;

pub use error::{Error, Result};
pub use feature_maps::{FeatureMap, FeatureVector, TransformKind, TransformSpec};
