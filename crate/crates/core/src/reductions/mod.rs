//! Sample transformations between the distribution family members:
//! worst-to-average rotation, rejection sampling from CLWE to homogeneous
//! CLWE, noise-add-and-rescale, BDD-to-CLWE sample generation, and the
//! multi-direction hybrid embedding.

mod bdd;
mod hybrid;
mod rejection;

pub use bdd::{bdd_to_clwe, conditional_coset_params, BddInstance, BddOutputParams, BddTransformParams};
pub use hybrid::embed_hybrid;
pub use rejection::{clwe_to_hclwe_rejection, RejectionConfig, RejectionStats};

use crate::distributions::{rotate_rows, BatchData, SampleBatch};
use crate::error::{Error, Result};
use crate::numerics::{width_to_std, Matrix, Real, Vector};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

/// Draws an orthogonal matrix from the rotation-invariant distribution:
/// Gaussian matrix, Gram-Schmidt orthonormalization, sign fixed by the
/// diagonal of the triangular factor.
pub fn random_rotation(n: usize, prec: u32, rng: &mut ChaCha12Rng) -> Matrix {
    loop {
        let g = Matrix::from_fn(n, n, |_, _| {
            Real::from_f64(rng.sample::<f64, _>(StandardNormal), prec)
        });
        if let Some(q) = orthonormalize(&g) {
            return q;
        }
    }
}

fn orthonormalize(g: &Matrix) -> Option<Matrix> {
    // Gram-Schmidt QR with positive triangular diagonal; applied to a
    // Gaussian matrix this produces the rotation-invariant distribution
    let n = g.cols();
    let mut cols: Vec<Vector> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.col(j);
        for c in cols.iter() {
            let d = v.dot(c);
            v.axpy(&(-&d), c);
        }
        let norm = v.norm();
        if norm.to_f64() < 1e-12 {
            return None;
        }
        cols.push(v.scaled(&norm.recip()));
    }
    Some(Matrix::from_cols(&cols))
}

/// Provenance record emitted by reduction runs.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionRecord {
    pub input_generator: String,
    pub input_seed: u64,
    pub operation: String,
    pub parameters: serde_json::Value,
    pub attempts: Option<u64>,
    pub accepted: Option<u64>,
    pub acceptance_rate: Option<f64>,
    pub output_len: usize,
}

/// Applies a fresh random rotation to a CLWE batch (y -> R y, z kept),
/// returning the rotated batch and the rotation so recovered directions
/// can be mapped back through `R^T`.
pub fn worst_to_average(
    batch: &SampleBatch,
    prec: u32,
    rng: &mut ChaCha12Rng,
) -> Result<(SampleBatch, Matrix)> {
    let r = random_rotation(batch.meta.n, prec, rng);
    let mut out = batch.clone();
    match &mut out.data {
        BatchData::F64 { ys, .. } => {
            rotate_rows(ys, &r);
        }
        BatchData::Precise { ys, .. } => {
            for y in ys.iter_mut() {
                *y = r.mul_vec(y);
            }
        }
    }
    out.meta.generator = format!("{}+rotated", batch.meta.generator);
    Ok((out, r))
}

/// Adds width `beta/gamma` Gaussian noise to a noiseless homogeneous
/// batch and rescales by `gamma/sqrt(beta^2+gamma^2)`; the output is a
/// homogeneous CLWE batch with parameters
/// `gamma_out = gamma/sqrt(1+(beta/gamma)^2)`, `beta_out = gamma_out*(beta/gamma)`.
pub fn add_noise_rescale(
    ys: &mut Vec<Vec<f64>>,
    gamma: f64,
    beta: f64,
    rng: &mut ChaCha12Rng,
) -> Result<(f64, f64)> {
    if !(gamma > 0.0) || !(beta >= 0.0) {
        return Err(Error::Parameter("need gamma > 0 and beta >= 0".into()));
    }
    if beta == 0.0 {
        return Ok((0.0, gamma)); // identity map in the noiseless limit
    }
    let noise_std = width_to_std(beta / gamma);
    let scale = gamma / (beta * beta + gamma * gamma).sqrt();
    for y in ys.iter_mut() {
        for x in y.iter_mut() {
            *x = (*x + rng.sample::<f64, _>(StandardNormal) * noise_std) * scale;
        }
    }
    let ratio = beta / gamma;
    let gamma_out = gamma / (1.0 + ratio * ratio).sqrt();
    let beta_out = gamma_out * ratio;
    Ok((beta_out, gamma_out))
}
