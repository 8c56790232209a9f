//! Small closed-form identities on Gaussians: the product-of-Gaussians
//! (complete-the-squares) decomposition and the Devroye et al. upper bound
//! on the total variation distance between two normal distributions.

use super::{Real, Vector};
use crate::error::{Error, Result};

/// Completes the square in the product of two Gaussians:
/// `rho_{r1}(x - c1) * rho_{r2}(x - c2) = rho_{r0}(c1 - c2) * rho_{r3}(x - c3)`
/// with `r0 = sqrt(r1^2 + r2^2)`, `r3 = r1*r2/r0`, and
/// `c3 = (r3/r1)^2 c1 + (r3/r2)^2 c2`.
///
/// Returns `(r0, r3, c3)`.
pub fn complete_squares(
    r1: &Real,
    r2: &Real,
    c1: &Vector,
    c2: &Vector,
) -> Result<(Real, Real, Vector)> {
    if *r1 <= 0.0 || *r2 <= 0.0 {
        return Err(Error::Parameter(
            "complete_squares requires positive widths".into(),
        ));
    }
    if c1.dim() != c2.dim() {
        return Err(Error::Parameter(
            "complete_squares centers must share a dimension".into(),
        ));
    }
    let r0 = (r1.square() + r2.square()).sqrt();
    let r3 = r1 * r2 / &r0;
    let w1 = (&r3 / r1).square();
    let w2 = (&r3 / r2).square();
    let mut c3 = c1.scaled(&w1);
    c3.axpy(&w2, c2);
    Ok((r0, r3, c3))
}

/// Upper bound on the statistical distance between `N(mu1, sigma1)` and
/// `N(mu2, sigma2)` (sigmas are standard deviations):
/// `3|s1^2 - s2^2| / (2 max(s1^2, s2^2)) + |mu1 - mu2| / (2 max(s1, s2))`.
///
/// The bound may exceed 1; callers clip if they need a probability.
pub fn gaussian_tv_bound(mu1: &Real, sigma1: &Real, mu2: &Real, sigma2: &Real) -> Result<Real> {
    if *sigma1 <= 0.0 || *sigma2 <= 0.0 {
        return Err(Error::Parameter(
            "gaussian_tv_bound requires positive sigmas".into(),
        ));
    }
    let v1 = sigma1.square();
    let v2 = sigma2.square();
    let vmax = v1.max(&v2);
    let smax = sigma1.max(sigma2);
    let prec = vmax.prec();
    let two = Real::from_f64(2.0, prec);
    let three = Real::from_f64(3.0, prec);
    let var_term = three * (v1 - v2).abs() / (&two * vmax);
    let mean_term = (mu1 - mu2).abs() / (two * smax);
    Ok(var_term + mean_term)
}
