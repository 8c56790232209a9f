//! Hybrid embedding for the multi-direction decision problem: append `i`
//! hidden coordinates and `m-1-i` standard Gaussian coordinates to an
//! `n'`-dimensional batch, then rotate uniformly. A single-direction
//! homogeneous batch becomes an `(i+1)`-direction batch in dimension
//! `n = n' + m - 1`; a null batch becomes an `i`-direction batch.

use super::random_rotation;
use crate::distributions::{rotate_rows, ClweParams, ZIndexTable};
use crate::error::{Error, Result};
use crate::numerics::{width_to_std, Matrix};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// Embeds the batch into dimension `n' + m - 1`, returning the rotated
/// rows and the rotation applied (un-rotating recovers the block
/// structure).
pub fn embed_hybrid(
    ys: &[Vec<f64>],
    i: usize,
    m: usize,
    params: &ClweParams,
    prec: u32,
    rng: &mut ChaCha12Rng,
) -> Result<(Vec<Vec<f64>>, Matrix)> {
    if m == 0 || i > m - 1 {
        return Err(Error::Parameter("need 0 <= i <= m-1".into()));
    }
    let n_in = ys.first().map(|y| y.len()).unwrap_or(0);
    if n_in == 0 {
        return Err(Error::Parameter("empty batch".into()));
    }
    let n_out = n_in + m - 1;
    let table = ZIndexTable::new(params.mixture_index_width(), prec)?;
    let spacing = params.layer_spacing();
    let layer_std = width_to_std(params.layer_width());
    let unit_std = width_to_std(1.0);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(ys.len());
    for y in ys {
        if y.len() != n_in {
            return Err(Error::Parameter("ragged batch".into()));
        }
        let mut row = Vec::with_capacity(n_out);
        row.extend_from_slice(y);
        // i hidden coordinates, each an independent 1-D homogeneous draw
        for _ in 0..i {
            let j = table.draw(rng) as f64;
            row.push(j * spacing + rng.sample::<f64, _>(StandardNormal) * layer_std);
        }
        for _ in 0..(m - 1 - i) {
            row.push(rng.sample::<f64, _>(StandardNormal) * unit_std);
        }
        rows.push(row);
    }
    let r = random_rotation(n_out, prec, rng);
    rotate_rows(&mut rows, &r);
    Ok((rows, r))
}
