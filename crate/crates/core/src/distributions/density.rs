//! Density evaluators for the homogeneous CLWE distribution.
//!
//! The unnormalized density at `y` is `rho(y) * sum_k rho_beta(k - gamma*<y,w>)`;
//! its integral over `R^n` is `Z = beta/sqrt(beta^2+gamma^2) *
//! rho_{sqrt(beta^2+gamma^2)}(Z)`, so the normalized density divides by `Z`
//! (every orthogonal coordinate of `rho` integrates to 1 on its own).

use super::ClweParams;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::numerics::{gaussian_mass, Real};
use std::f64::consts::PI;

/// The normalization constant `Z` of the homogeneous CLWE density,
/// computed from the theta oracle.
pub fn normalization_z(params: &ClweParams, prec: u32) -> Result<Real> {
    if params.beta <= 0.0 {
        return Err(Error::Parameter("normalization needs beta > 0".into()));
    }
    let gp = params.mixture_index_width();
    let l = Lattice::integers(1, prec);
    let theta = gaussian_mass(&l, &Real::from_f64(gp, prec), 1e-15)?.mass;
    Ok(Real::from_f64(params.beta / gp, prec) * theta)
}

fn layer_sum(t: f64, beta: f64, gamma: f64, k_trunc: i64) -> f64 {
    let mut s = 0.0;
    for k in -k_trunc..=k_trunc {
        let d = (k as f64 - gamma * t) / beta;
        s += (-PI * d * d).exp();
    }
    s
}

/// Checks that `k_trunc` covers the layer sum at hidden coordinate `t`
/// with omitted terms below `1e-12` of the retained mass.
fn check_truncation(t: f64, beta: f64, gamma: f64, k_trunc: i64) -> Result<()> {
    let center = (gamma * t).abs();
    let dist = (k_trunc + 1) as f64 - center;
    if dist <= 0.0 {
        return Err(Error::Tolerance(format!(
            "k_trunc = {k_trunc} does not reach the nearest layer at gamma*t = {center}"
        )));
    }
    let next = (-PI * (dist / beta) * (dist / beta)).exp();
    let ratio = (-PI * (2.0 * dist + 1.0) / (beta * beta)).exp();
    let omitted = 2.0 * next / (1.0 - ratio).max(1e-300);
    if omitted > 1e-12 {
        return Err(Error::Tolerance(format!(
            "k_trunc = {k_trunc} leaves layer mass {omitted:e} at t = {t}"
        )));
    }
    Ok(())
}

/// Normalized homogeneous CLWE density at `y` for hidden direction `w`.
///
/// The layer sum is truncated at `|k| <= k_trunc`; insufficient truncation
/// is detected and reported rather than silently accepted.
pub fn hclwe_density(y: &[f64], params: &ClweParams, w: &[f64], k_trunc: i64) -> Result<f64> {
    if params.beta <= 0.0 {
        return Err(Error::Parameter("density evaluator needs beta > 0".into()));
    }
    if y.len() != params.n || w.len() != params.n {
        return Err(Error::Parameter("density dimension mismatch".into()));
    }
    let t: f64 = y.iter().zip(w).map(|(a, b)| a * b).sum();
    check_truncation(t, params.beta, params.gamma, k_trunc)?;
    let z = normalization_z(params, crate::numerics::DEFAULT_PREC)?.to_f64();
    let rho_y: f64 = (-PI * y.iter().map(|x| x * x).sum::<f64>()).exp();
    Ok(rho_y * layer_sum(t, params.beta, params.gamma, k_trunc) / z)
}

/// Marginal density of homogeneous CLWE along the hidden direction.
pub fn hclwe_marginal_1d(t: f64, params: &ClweParams, k_trunc: i64) -> Result<f64> {
    let z = normalization_z(params, crate::numerics::DEFAULT_PREC)?.to_f64();
    hclwe_marginal_with_z(t, params, k_trunc, z)
}

/// Marginal density with the normalization supplied by the caller (for
/// quadrature loops that evaluate `Z` once).
pub fn hclwe_marginal_with_z(t: f64, params: &ClweParams, k_trunc: i64, z: f64) -> Result<f64> {
    check_truncation(t, params.beta, params.gamma, k_trunc)?;
    Ok((-PI * t * t).exp() * layer_sum(t, params.beta, params.gamma, k_trunc) / z)
}

/// The density ratio `a(t)` between the hidden marginal of homogeneous
/// CLWE and the standard Gaussian: `a(t) = (1/Z) * sum_k rho_{beta/gamma}(t - k/gamma)`.
pub fn density_ratio(t: f64, params: &ClweParams, k_trunc: i64) -> Result<f64> {
    check_truncation(t, params.beta, params.gamma, k_trunc)?;
    let z = normalization_z(params, crate::numerics::DEFAULT_PREC)?.to_f64();
    Ok(layer_sum(t, params.beta, params.gamma, k_trunc) / z)
}

/// Fast path used by Monte-Carlo loops: the caller evaluates `Z` once and
/// supplies it; the truncation index adapts to `t`.
pub fn density_ratio_with_z(t: f64, beta: f64, gamma: f64, z: f64) -> f64 {
    let k_needed = (gamma * t.abs()).ceil() as i64 + (8.0 * beta.ceil()).max(8.0) as i64;
    layer_sum(t, beta, gamma, k_needed) / z
}
