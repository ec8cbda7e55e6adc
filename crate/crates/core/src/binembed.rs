//! Sign-based binary embedding: angle estimation from sign projections and a
//! small retrieval-recall harness over Hamming shortlists.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::feature_maps::FeatureMap;

/// The sign pattern of one projected point; entries are ±1. Treated as a
/// feature vector it carries an implicit `1/√D` scale, so the normalized
/// dot product of two codes lives in `[−1, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryCode {
    bits: Vec<i8>,
}

impl BinaryCode {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[i8] {
        &self.bits
    }

    /// `Σ bxᵢ·byᵢ` as an exact integer.
    pub fn dot(&self, other: &BinaryCode) -> Result<i64> {
        if self.len() != other.len() {
            return Err(Error::Dimension(format!(
                "codes have lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| (*a as i64) * (*b as i64))
            .sum())
    }

    /// Fraction of positions on which two codes agree.
    pub fn agreement(&self, other: &BinaryCode) -> Result<f64> {
        let dot = self.dot(other)? as f64;
        Ok((1.0 + dot / self.len() as f64) / 2.0)
    }

    /// Number of differing positions.
    pub fn hamming(&self, other: &BinaryCode) -> Result<usize> {
        let dot = self.dot(other)?;
        Ok(((self.len() as i64 - dot) / 2) as usize)
    }
}

/// Elementwise sign of `project(map, x)`, with `sign(0) := +1` for
/// determinism. The zero vector is rejected: its angle to anything is
/// undefined.
pub fn sign_features(map: &FeatureMap, x: &[f64]) -> Result<BinaryCode> {
    if x.iter().all(|&v| v == 0.0) {
        return Err(Error::Input(
            "sign features of the zero vector are undefined".into(),
        ));
    }
    let u = map.project(x)?;
    Ok(BinaryCode {
        bits: u.iter().map(|&v| if v < 0.0 { -1 } else { 1 }).collect(),
    })
}

/// Angle estimate `θ̂ = (π/2)·(1 − bxᵀby/D)`, in `[0, π]`. Unbiased under
/// the sign-LSH collision law `Pr[sign mismatch] = θ/π`.
pub fn angle_estimate(bx: &BinaryCode, by: &BinaryCode) -> Result<f64> {
    let dot = bx.dot(by)? as f64;
    Ok(FRAC_PI_2 * (1.0 - dot / bx.len() as f64))
}

/// Indices of the `k` smallest scores, ties broken by index order.
fn top_k_by_score(scores: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        scores[a].total_cmp(&scores[b]).then(a.cmp(&b))
    });
    order.truncate(k);
    order
}

/// Average recall of the true `k` nearest neighbors by angle within the
/// Hamming-distance `shortlist`, over all queries.
pub fn recall_at_k(
    base: &Dataset,
    queries: &Dataset,
    map: &FeatureMap,
    k: usize,
    shortlist: usize,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    if shortlist < k {
        return Err(Error::Config(format!(
            "shortlist ({shortlist}) must be at least k ({k})"
        )));
    }
    if base.len() <= shortlist {
        return Err(Error::Config(format!(
            "base ({} points) must be larger than the shortlist ({shortlist})",
            base.len()
        )));
    }
    if base.dim() != queries.dim() {
        return Err(Error::Dimension(format!(
            "base dimension {} != query dimension {}",
            base.dim(),
            queries.dim()
        )));
    }

    let base_codes: Vec<BinaryCode> = (0..base.len())
        .into_par_iter()
        .map(|i| sign_features(map, base.row(i)))
        .collect::<Result<Vec<_>>>()?;
    let base_norms: Vec<f64> = base
        .rows()
        .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();

    let recalls: Vec<f64> = (0..queries.len())
        .into_par_iter()
        .map(|qi| -> Result<f64> {
            let q = queries.row(qi);
            let q_norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
            if q_norm == 0.0 {
                return Err(Error::Input("query has zero norm".into()));
            }
            let angles: Vec<f64> = (0..base.len())
                .map(|bi| {
                    let b = base.row(bi);
                    let dot: f64 = q.iter().zip(b).map(|(a, c)| a * c).sum();
                    let cos = (dot / (q_norm * base_norms[bi])).clamp(-1.0, 1.0);
                    cos.acos()
                })
                .collect();
            let truth = top_k_by_score(&angles, k);

            let code = sign_features(map, q)?;
            let dists: Vec<f64> = base_codes
                .iter()
                .map(|bc| code.hamming(bc).map(|h| h as f64))
                .collect::<Result<Vec<_>>>()?;
            let candidates = top_k_by_score(&dists, shortlist);

            let hits = truth
                .iter()
                .filter(|t| candidates.contains(t))
                .count();
            Ok(hits as f64 / k as f64)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(recalls.iter().sum::<f64>() / recalls.len() as f64)
}
