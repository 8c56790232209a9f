//! Smoothing-parameter bounds. The smoothing parameter `eta_eps(L)` is the
//! smallest `s` with `rho_{1/s}(L* \ {0}) <= eps`; this module evaluates
//! the classical lower bound and the two upper bounds (via `lambda_1(L*)`
//! and `lambda_n(L)`), then certifies the upper bound by direct theta
//! evaluation on the dual.

use super::{shortest_vector_bruteforce, successive_minima, Lattice};
use crate::error::{Error, Result};
use crate::numerics::{gaussian_mass, Real};

#[derive(Clone, Debug)]
pub struct SmoothingBounds {
    pub epsilon: f64,
    /// `sqrt(ln(1/eps)/pi) / lambda_1(L*)`
    pub lower: Real,
    /// `c*sqrt(n)/lambda_1(L*)` with `eps = exp(-c^2 n)`
    pub upper_dual: Real,
    /// `sqrt(ln(2n(1+1/eps))/pi) * lambda_n(L)`
    pub upper_primal: Real,
    /// `rho_{1/upper}(L* \ {0})` at the smaller upper bound (diagnostic)
    pub dual_mass_at_upper: f64,
}

/// Computes the three smoothing bounds for a lattice of dimension <= 4
/// (successive minima by brute force) and verifies by theta evaluation
/// that the smaller upper bound `u` indeed satisfies
/// `rho_{1/u}(L* \ {0}) <= eps`.
pub fn smoothing_bounds(l: &Lattice, epsilon: f64) -> Result<SmoothingBounds> {
    if !(0.0 < epsilon && epsilon < 1.0) {
        return Err(Error::Parameter(format!(
            "epsilon must lie in (0,1), got {epsilon}"
        )));
    }
    let n = l.dim();
    let prec = l.prec();
    let dual = l.dual()?;
    let lambda1_dual = shortest_vector_bruteforce(&dual, 6)?.norm();
    let lambda_n = successive_minima(l, 6)?.pop().expect("nonempty minima");

    let ln_inv_eps = Real::from_f64(epsilon, prec).recip().ln();
    let pi_r = Real::pi(prec);

    let lower = (&ln_inv_eps / &pi_r).sqrt() / &lambda1_dual;
    // eps expressed as exp(-c^2 n): c*sqrt(n) = sqrt(ln(1/eps))
    let upper_dual = ln_inv_eps.sqrt() / &lambda1_dual;
    let two_n = Real::from_f64(2.0 * n as f64, prec);
    let arg = two_n * (Real::one(prec) + Real::from_f64(epsilon, prec).recip());
    let upper_primal = (arg.ln() / pi_r).sqrt() * &lambda_n;

    let upper = upper_dual.min(&upper_primal);
    let mass = gaussian_mass(&dual, &upper.recip(), (epsilon * 1e-3).min(1e-12))?;
    let dual_mass_at_upper = mass.mass.to_f64() - 1.0;
    if dual_mass_at_upper > epsilon {
        return Err(Error::Consistency(format!(
            "upper smoothing bound fails its certificate: rho_{{1/u}}(L*\\0) = {dual_mass_at_upper:e} > eps = {epsilon:e}"
        )));
    }

    Ok(SmoothingBounds {
        epsilon,
        lower,
        upper_dual,
        upper_primal,
        dual_mass_at_upper,
    })
}

/// Decides whether a width `s` smooths the lattice at slack `eps`, i.e.
/// whether `rho_{1/s}(L* \ {0}) <= eps`, by certified theta evaluation.
pub fn smooths_at(l: &Lattice, s: &Real, epsilon: f64) -> Result<bool> {
    let dual = l.dual()?;
    let mass = gaussian_mass(&dual, &s.recip(), (epsilon * 1e-3).min(1e-12))?;
    Ok(mass.mass.to_f64() - 1.0 + mass.tail_bound <= epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{Matrix, DEFAULT_PREC};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use std::f64::consts::PI;

    #[test]
    fn integers_at_eps_exp_minus_pi() {
        // lower bound = sqrt(ln(1/eps)/pi)/lambda_1(Z*) = 1 at eps = exp(-pi);
        // theta summation decides eta_eps(Z) > 1 there, since
        // rho_1(Z \ 0) = 2 exp(-pi) + ... > exp(-pi)
        let l = Lattice::integers(1, DEFAULT_PREC);
        let eps = (-PI).exp();
        let b = smoothing_bounds(&l, eps).unwrap();
        assert!((b.lower.to_f64() - 1.0).abs() < 1e-12);
        let mass_at_one = gaussian_mass(&l.dual().unwrap(), &Real::one(DEFAULT_PREC), 1e-13)
            .unwrap()
            .mass
            .to_f64()
            - 1.0;
        assert!(mass_at_one > eps, "eta_eps(Z) must exceed 1 at this eps");
        assert!(!smooths_at(&l, &Real::one(DEFAULT_PREC), eps).unwrap());
        assert!(b.upper_primal.to_f64() >= b.lower.to_f64());
    }

    #[test]
    fn bounds_scale_homogeneously() {
        let l = Lattice::integers(2, DEFAULT_PREC);
        let c = 1.7;
        let lc = l.scale(&Real::from_f64(c, DEFAULT_PREC)).unwrap();
        let eps = 1e-3;
        let b1 = smoothing_bounds(&l, eps).unwrap();
        let b2 = smoothing_bounds(&lc, eps).unwrap();
        assert!((b2.lower.to_f64() - c * b1.lower.to_f64()).abs() < 1e-10);
        assert!((b2.upper_dual.to_f64() - c * b1.upper_dual.to_f64()).abs() < 1e-10);
        assert!((b2.upper_primal.to_f64() - c * b1.upper_primal.to_f64()).abs() < 1e-10);
    }

    #[test]
    fn lower_never_exceeds_uppers_on_random_lattices() {
        let mut rng = ChaCha12Rng::seed_from_u64(5150);
        let mut done = 0;
        while done < 100 {
            let rows: Vec<Vec<f64>> = (0..2)
                .map(|_| (0..2).map(|_| rng.random_range(-2.0..2.0)).collect())
                .collect();
            let m = Matrix::from_rows_f64(&rows, DEFAULT_PREC);
            let Ok(l) = Lattice::from_basis(m) else { continue };
            if l.det_abs().to_f64() < 0.3 {
                continue; // keep enumeration small
            }
            let b = match smoothing_bounds(&l, 1e-2) {
                Ok(b) => b,
                Err(Error::BoxTooLarge(_)) => continue,
                Err(e) => panic!("unexpected error: {e}"),
            };
            assert!(b.lower.to_f64() <= b.upper_dual.to_f64() + 1e-12);
            assert!(b.lower.to_f64() <= b.upper_primal.to_f64() + 1e-12);
            done += 1;
        }
    }

    #[test]
    fn rejects_bad_epsilon() {
        let l = Lattice::integers(1, DEFAULT_PREC);
        assert!(smoothing_bounds(&l, 0.0).is_err());
        assert!(smoothing_bounds(&l, 1.0).is_err());
    }
}
