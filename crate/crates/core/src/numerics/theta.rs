//! Lattice Gaussian mass (theta series) by certified box enumeration,
//! the Poisson-summation residual check, and the second moment of the
//! one-dimensional discrete Gaussian computed along both the primal and
//! dual series.
//!
//! Truncation is certified per Gram-Schmidt coordinate: the mass outside
//! the enumerated box is dominated by a geometric series with ratio
//! `exp(-pi*(2C+1)*a)` along each coordinate (`a` the squared normalized
//! Gram-Schmidt norm), times the full theta mass of the remaining
//! coordinates.

use super::{Real, Vector};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use std::f64::consts::PI;

/// Result of a certified Gaussian-mass evaluation.
#[derive(Clone, Debug)]
pub struct GaussianMassResult {
    pub mass: Real,
    /// Euclidean radius that the enumerated box is guaranteed to cover.
    pub truncation_radius: f64,
    /// Certified upper bound on the mass outside the enumerated box.
    pub tail_bound: f64,
}

/// `rho_s(L) = sum_{v in L} exp(-pi*||v/s||^2)` with certified remainder
/// below `tol`. Exact enumeration; dimension at most 4.
pub fn gaussian_mass(l: &Lattice, s: &Real, tol: f64) -> Result<GaussianMassResult> {
    gaussian_mass_impl(l, None, s, tol)
}

/// Gaussian mass of the coset `shift + L`.
pub fn gaussian_mass_coset(
    l: &Lattice,
    shift: &Vector,
    s: &Real,
    tol: f64,
) -> Result<GaussianMassResult> {
    gaussian_mass_impl(l, Some(shift), s, tol)
}

fn gaussian_mass_impl(
    l: &Lattice,
    shift: Option<&Vector>,
    s: &Real,
    tol: f64,
) -> Result<GaussianMassResult> {
    if *s <= 0.0 {
        return Err(Error::Parameter("gaussian_mass needs width > 0".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Parameter("gaussian_mass needs tol > 0".into()));
    }
    let n = l.dim();
    if n > 4 {
        return Err(Error::Parameter(
            "exact enumeration supports dimension <= 4".into(),
        ));
    }
    let prec = l.prec().max(s.prec());
    let gs = l.gs();
    let s_sq = s.square();

    // normalized squared GS norms a_i = ||b*_i||^2 / s^2
    let a: Vec<Real> = gs.norm_sq.iter().map(|h| h / &s_sq).collect();
    let a_f: Vec<f64> = a.iter().map(Real::to_f64).collect();

    // full 1-D theta overestimates along each coordinate
    let theta_f: Vec<f64> = a_f.iter().map(|&ai| theta_1d_upper(ai)).collect();

    // per-coordinate box bounds: tail_i <= tol / (2n)
    let per_tol = tol / (2.0 * n as f64);
    let mut c_bound = vec![0i64; n];
    let mut tail_total = 0.0f64;
    for i in 0..n {
        let others: f64 = (0..n).filter(|&j| j != i).map(|j| theta_f[j]).product();
        let mut c = 1i64;
        loop {
            let t = geometric_tail_upper(c, a_f[i]) * others;
            if t <= per_tol {
                tail_total += t;
                c_bound[i] = c;
                break;
            }
            c += 1;
            if c > 2_000_000 {
                return Err(Error::Tolerance(format!(
                    "cannot certify tail {tol:e} along coordinate {i} (a = {:e})",
                    a_f[i]
                )));
            }
        }
    }
    let mut volume = 1.0f64;
    for &c in &c_bound {
        volume *= 2.0 * c as f64 + 2.0;
    }
    if volume > 2.0e7 {
        return Err(Error::BoxTooLarge(format!(
            "certified enumeration needs ~{volume:.3e} points"
        )));
    }

    // GS coordinates of the coset shift
    let sigma: Vec<Real> = match shift {
        Some(y) => (0..n).map(|i| y.dot(&gs.orth[i]) / &gs.norm_sq[i]).collect(),
        None => (0..n).map(|_| Real::zero(prec)).collect(),
    };

    let pi_r = Real::pi(prec);
    let mut acc = Real::zero(prec);
    let mut coeffs = vec![0i64; n];
    enumerate_level(
        l,
        &a,
        &sigma,
        &c_bound,
        &pi_r,
        n - 1,
        &Real::one(prec),
        &mut coeffs,
        &mut acc,
    );

    let mut radius_sq = 0.0;
    for i in 0..n {
        let h = gs.norm_sq[i].to_f64().sqrt();
        radius_sq += (c_bound[i] as f64 * h).powi(2);
    }
    Ok(GaussianMassResult {
        mass: acc,
        truncation_radius: radius_sq.sqrt(),
        tail_bound: tail_total,
    })
}

/// Upper bound on `sum_{k in Z} exp(-pi k^2 a)`, valid for any coset shift.
fn theta_1d_upper(a: f64) -> f64 {
    let mut total = 1.0;
    let mut k = 1f64;
    loop {
        let term = (-PI * k * k * a).exp();
        total += 2.0 * term;
        if term < 1e-22 || k > 1e6 {
            // geometric remainder
            let ratio = (-PI * (2.0 * k + 1.0) * a).exp();
            total += 2.0 * term * ratio / (1.0 - ratio).max(1e-300);
            break;
        }
        k += 1.0;
    }
    total * (1.0 + 1e-9)
}

/// Upper bound on `sum over points of Z + shift with |t| > C` of
/// `exp(-pi t^2 a)`.
fn geometric_tail_upper(c: i64, a: f64) -> f64 {
    let c = c as f64;
    let lead = (-PI * c * c * a).exp();
    let ratio = (-PI * (2.0 * c + 1.0) * a).exp();
    if ratio >= 1.0 - 1e-12 {
        return f64::INFINITY;
    }
    2.0 * lead / (1.0 - ratio) * (1.0 + 1e-9)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_level(
    l: &Lattice,
    a: &[Real],
    sigma: &[Real],
    c_bound: &[i64],
    pi_r: &Real,
    level: usize,
    partial: &Real,
    coeffs: &mut [i64],
    acc: &mut Real,
) {
    // offset of the GS coordinate at this level given the chosen higher coeffs
    let gs_mu = &l.gs().mu;
    let prec = partial.prec();
    let mut offset = sigma[level].clone();
    for j in (level + 1)..a.len() {
        if coeffs[j] != 0 {
            offset += &(&gs_mu[j][level] * &Real::from_i64(coeffs[j], prec));
        }
    }
    let off_f = offset.to_f64();
    let c_lo = (-(c_bound[level] as f64) - off_f).ceil() as i64;
    let c_hi = ((c_bound[level] as f64) - off_f).floor() as i64;
    if c_lo > c_hi {
        return;
    }
    if level == 0 {
        // innermost loop: walk t = c + offset incrementally;
        // w(t+1) = w(t) * exp(-pi a (2t+1)), and that ratio itself advances
        // by the constant factor exp(-2 pi a)
        let t0 = &Real::from_i64(c_lo, prec) + &offset;
        let minus_pi_a = -(pi_r * &a[0]);
        let mut w = (&minus_pi_a * t0.square()).exp();
        let two_t0_plus_1 =
            &t0 + &t0 + Real::one(prec);
        let mut ratio = (&minus_pi_a * two_t0_plus_1).exp();
        let q2 = (&minus_pi_a + &minus_pi_a).exp();
        let mut c = c_lo;
        loop {
            *acc += &(partial * &w);
            if c == c_hi {
                break;
            }
            w *= &ratio;
            ratio *= &q2;
            c += 1;
        }
    } else {
        for c in c_lo..=c_hi {
            coeffs[level] = c;
            let t = &Real::from_i64(c, prec) + &offset;
            let w = (-(pi_r * &a[level]) * t.square()).exp();
            let next = partial * &w;
            enumerate_level(l, a, sigma, c_bound, pi_r, level - 1, &next, coeffs, acc);
        }
        coeffs[level] = 0;
    }
}

/// `| rho_s(L) - det(L*) * s^n * rho_{1/s}(L*) |`, which Poisson summation
/// forces below `2*tol` when both masses are certified to `tol`-scale
/// remainders.
pub fn poisson_residual(l: &Lattice, s: &Real, tol: f64) -> Result<Real> {
    let n = l.dim();
    let dual = l.dual()?;
    let det_dual = dual.det_abs().clone();
    let s_pow_n = {
        let mut p = Real::one(s.prec());
        for _ in 0..n {
            p *= s;
        }
        p
    };
    let factor = (&det_dual * &s_pow_n).to_f64();
    // split the budget so each side's dropped tail stays within tol overall
    let tol_primal = tol;
    let tol_dual = tol / factor.max(1.0);
    let m1 = gaussian_mass(l, s, tol_primal)?;
    let m2 = gaussian_mass(&dual, &s.recip(), tol_dual)?;
    Ok((&m1.mass - det_dual * s_pow_n * &m2.mass).abs())
}

/// Second moment `E[x^2]` of the discrete Gaussian on `(1/gamma)Z` (width 1),
/// computed along the primal series `g(L)/rho(L)` and the dual series
/// `g_hat(L*)/rho(L*)` with `g_hat(y) = (1/(2*pi) - y^2) * rho(y)`; the two
/// routes must agree within `4*tol`, and the dual-side value is returned.
pub fn discrete_gaussian_second_moment(gamma: &Real, tol: f64) -> Result<Real> {
    if *gamma < 1.0 {
        return Err(Error::Parameter(
            "second moment calculator requires gamma >= 1".into(),
        ));
    }
    let prec = gamma.prec();
    let pi_r = Real::pi(prec);
    let gamma_f = gamma.to_f64();

    // primal: points k/gamma, k in Z
    let mut num_p = Real::zero(prec);
    let mut den_p = Real::zero(prec);
    {
        let mut k = 0i64;
        loop {
            let x = Real::from_i64(k, prec) / gamma;
            let w = (-(&pi_r * x.square())).exp();
            let contrib_num = x.square() * &w;
            if k == 0 {
                den_p += &w;
            } else {
                den_p += &(&w + &w);
                num_p += &(&contrib_num + &contrib_num);
            }
            // certified remainder: x^2 rho(x) <= (2/(pi e)) rho_{sqrt(2)}(x)
            let xf = k as f64 / gamma_f;
            let rem_den = geometric_tail_upper(k + 1, 1.0 / (gamma_f * gamma_f));
            let rem_num =
                0.2342 * geometric_tail_upper(k + 1, 0.5 / (gamma_f * gamma_f)) * 2.0;
            if xf > 1.0 && rem_den < tol * 1e-3 && rem_num < tol * 1e-3 {
                break;
            }
            k += 1;
            if k > 1_000_000 {
                return Err(Error::Tolerance("primal series does not certify".into()));
            }
        }
    }
    let primal = num_p / den_p;

    // dual: points gamma*k; E = g_hat(L*) / rho(L*) with the
    // (1/(2 pi) - y^2) weight
    let inv_two_pi = Real::one(prec) / (&pi_r + &pi_r);
    let mut num_d = Real::zero(prec);
    let mut den_d = Real::zero(prec);
    {
        let mut k = 0i64;
        loop {
            let y = Real::from_i64(k, prec) * gamma;
            let w = (-(&pi_r * y.square())).exp();
            let term = (&inv_two_pi - y.square()) * &w;
            if k == 0 {
                den_d += &w;
                num_d += &term;
            } else {
                den_d += &(&w + &w);
                num_d += &(&term + &term);
            }
            let rem_den = geometric_tail_upper(k + 1, gamma_f * gamma_f);
            let rem_num = (0.2342 + 0.16)
                * geometric_tail_upper(k + 1, 0.5 * gamma_f * gamma_f)
                * 2.0;
            if rem_den < tol * 1e-3 && rem_num < tol * 1e-3 {
                break;
            }
            k += 1;
            if k > 1_000_000 {
                return Err(Error::Tolerance("dual series does not certify".into()));
            }
        }
    }
    let dual = num_d / den_d;

    let gap = (&primal - &dual).abs();
    if gap.to_f64() > 4.0 * tol {
        return Err(Error::Consistency(format!(
            "primal/dual second moments disagree by {:e} (> 4*tol)",
            gap.to_f64()
        )));
    }
    Ok(dual)
}
