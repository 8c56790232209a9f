//! Babai nearest-plane decoding. On an LLL-reduced basis this solves
//! bounded-distance decoding up to radius `2^(-n/2) * lambda_1(L)`.

use super::Lattice;
use crate::error::Result;
use crate::numerics::Vector;

/// Finds a lattice vector `v` near `target` by the nearest-plane walk,
/// returning `(v, target - v)`.
///
/// If the lattice does not carry an LLL-reduced basis it is reduced first
/// (with delta = 3/4); the returned vector is a point of the same lattice
/// either way.
pub fn babai_nearest_plane(l: &Lattice, target: &Vector) -> Result<(Vector, Vector)> {
    let reduced_storage;
    let l = if l.lll_delta().is_some() {
        l
    } else {
        let (r, _) = l.lll(0.75)?;
        reduced_storage = r;
        &reduced_storage
    };
    let n = l.dim();
    let gs = l.gs();
    let mut resid = target.clone();
    for i in (0..n).rev() {
        let c = resid.dot(&gs.orth[i]) / &gs.norm_sq[i];
        let k = c.round();
        resid.axpy(&(-&k), &l.basis().col(i));
    }
    let v = target.sub(&resid);
    Ok((v, resid))
}
