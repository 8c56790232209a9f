//! CLWE sample generation from a bounded-distance-decoding instance.
//!
//! Given a target `u + w` with `u` in the dual lattice and discrete
//! Gaussian samples `x ~ D_{L,r}`, each output is
//! `((x + v)/t, (<x, u + w> + e) mod 1)` with `v ~ D_{R^n, s1}`,
//! `e ~ D_{R, s2}`, `t = sqrt(r^2 + s1^2)`. When the smoothing
//! precondition holds the stream is within statistical distance
//! `8*eps` of the CLWE distribution with hidden direction `w/||w||`,
//! `beta = ||w|| sqrt((r s1/t)^2 + (s2/||w||)^2)`, `gamma = ||w|| r^2/t`.

use crate::distributions::ClweSample;
use crate::error::{Error, Result};
use crate::lattice::{smooths_at, DiscreteGaussianSampler, Lattice};
use crate::numerics::{width_to_std, Real, Vector};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// Width parameters of the transformation, with the derived quantities
/// `t = sqrt(r^2+s1^2)`, `r' = r^2/t`, `s1' = r*s1/t`.
#[derive(Clone, Debug)]
pub struct BddTransformParams {
    pub r: f64,
    pub s1: f64,
    pub s2: f64,
    /// Smoothing slack eps for the precondition certificate.
    pub epsilon: f64,
}

impl BddTransformParams {
    pub fn new(r: f64, s1: f64, s2: f64, epsilon: f64) -> Result<Self> {
        if !(r > 0.0 && s1 > 0.0 && s2 > 0.0) {
            return Err(Error::Parameter("widths must be positive".into()));
        }
        if !(0.0 < epsilon && epsilon < 0.5) {
            return Err(Error::Parameter("need eps in (0, 1/2)".into()));
        }
        Ok(BddTransformParams { r, s1, s2, epsilon })
    }

    pub fn t(&self) -> f64 {
        (self.r * self.r + self.s1 * self.s1).sqrt()
    }

    pub fn r_prime(&self) -> f64 {
        self.r * self.r / self.t()
    }

    pub fn s1_prime(&self) -> f64 {
        self.r * self.s1 / self.t()
    }

    /// The width that must exceed the smoothing parameter of `L`:
    /// `r*s1 / sqrt(||w||^2 (r*s1/s2)^2 + t^2)`.
    pub fn smoothing_width(&self, w_norm: f64) -> f64 {
        let rs1 = self.r * self.s1;
        let t = self.t();
        rs1 / (w_norm * w_norm * (rs1 / self.s2) * (rs1 / self.s2) + t * t).sqrt()
    }

    /// Output CLWE parameters for offset norm `||w||`.
    pub fn output_params(&self, w_norm: f64) -> (f64, f64) {
        let t = self.t();
        let beta = w_norm
            * ((self.r * self.s1 / t) * (self.r * self.s1 / t)
                + (self.s2 / w_norm) * (self.s2 / w_norm))
                .sqrt();
        let gamma = w_norm * self.r * self.r / t;
        (beta, gamma)
    }
}

/// Parameters of the conditional distribution of `x ~ D_{L,r}` given
/// `x + v = y_bar` with `v ~ D_{R^n,s}`: a discrete Gaussian on the
/// shifted coset with center `(r/t)^2 * y_bar` and width `r*s/t`.
pub fn conditional_coset_params(r: f64, s: f64, y_bar: &[f64]) -> Result<(Vec<f64>, f64)> {
    if !(r > 0.0 && s > 0.0) {
        return Err(Error::Parameter("widths must be positive".into()));
    }
    let t2 = r * r + s * s;
    let c = r * r / t2;
    let center = y_bar.iter().map(|x| c * x).collect();
    let width = r * s / t2.sqrt();
    Ok((center, width))
}

/// A bounded-distance-decoding instance: the target `u + w` lives in the
/// dual of `lattice` (`u` a dual point, `w` the planted offset).
#[derive(Clone, Debug)]
pub struct BddInstance {
    pub lattice: Lattice,
    pub target: Vector,
    pub offset_norm: f64,
}

impl BddInstance {
    /// Builds an instance with a planted dual point and known offset.
    pub fn with_planted(lattice: Lattice, dual_coeffs: &[i64], offset: &[f64]) -> Result<Self> {
        let dual = lattice.dual()?;
        let u = dual.point(dual_coeffs);
        let prec = lattice.prec();
        let w = Vector::from_f64s(offset, prec);
        let offset_norm = w.norm().to_f64();
        Ok(BddInstance {
            lattice,
            target: u.add(&w),
            offset_norm,
        })
    }
}

#[derive(Clone, Debug)]
pub struct BddOutputParams {
    pub beta: f64,
    pub gamma: f64,
    /// Unit hidden direction `w/||w||` of the generated stream.
    pub w_unit: Vec<f64>,
}

/// Generates `count` CLWE samples from the instance. The smoothing
/// precondition is certified by theta evaluation before any samples are
/// emitted; failure refuses to emit rather than produce silently invalid
/// experiments.
pub fn bdd_to_clwe(
    instance: &BddInstance,
    params: &BddTransformParams,
    offset: &[f64],
    dgs: &DiscreteGaussianSampler,
    count: usize,
    rng: &mut ChaCha12Rng,
) -> Result<(Vec<ClweSample>, BddOutputParams)> {
    let l = &instance.lattice;
    let n = l.dim();
    let prec = l.prec();
    let w_norm = (offset.iter().map(|x| x * x).sum::<f64>()).sqrt();
    if (w_norm - instance.offset_norm).abs() > 1e-9 {
        return Err(Error::Parameter("offset does not match the instance".into()));
    }
    let s_star = params.smoothing_width(w_norm);
    if !smooths_at(l, &Real::from_f64(s_star, prec), params.epsilon)? {
        return Err(Error::Parameter(format!(
            "smoothing precondition fails: width {s_star:.6} does not smooth \
             the lattice at eps = {:e}",
            params.epsilon
        )));
    }
    let t = params.t();
    let t_r = Real::from_f64(t, prec);
    let s1_std = width_to_std(params.s1);
    let s2_std = width_to_std(params.s2);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let x = dgs.sample(rng)?;
        // <x, u + w> mod 1 = <x, w> mod 1; reduced at precision, never in f64
        let ip = x.dot(&instance.target);
        let e = rng.sample::<f64, _>(StandardNormal) * s2_std;
        let z = (&ip + &Real::from_f64(e, prec)).mod_one().to_f64();
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            let v_i = rng.sample::<f64, _>(StandardNormal) * s1_std;
            y.push((&(x.get(i) + &Real::from_f64(v_i, prec)) / &t_r).to_f64());
        }
        out.push(ClweSample { y, z });
    }
    let (beta, gamma) = params.output_params(w_norm);
    let w_unit = offset.iter().map(|x| x / w_norm).collect();
    Ok((
        out,
        BddOutputParams {
            beta,
            gamma,
            w_unit,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{DgMode, DiscreteGaussianSpec};
    use crate::numerics::DEFAULT_PREC;
    use rand::SeedableRng;

    #[test]
    fn conditional_params_examples() {
        // r = s = 1: center = y/2, width = 1/sqrt(2)
        let (c, w) = conditional_coset_params(1.0, 1.0, &[0.8]).unwrap();
        assert!((c[0] - 0.4).abs() < 1e-15);
        assert!((w - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        // s -> infinity: center -> 0, width -> r
        let (c2, w2) = conditional_coset_params(1.0, 1e9, &[0.8]).unwrap();
        assert!(c2[0].abs() < 1e-15);
        assert!((w2 - 1.0).abs() < 1e-9);
        assert!(conditional_coset_params(0.0, 1.0, &[1.0]).is_err());
    }

    #[test]
    fn parameter_identities_are_algebraic() {
        let p = BddTransformParams::new(8.0, 1.5, 0.4, 1e-5).unwrap();
        let w_norm = 0.25;
        let (beta, gamma) = p.output_params(w_norm);
        let t = (8.0f64 * 8.0 + 1.5 * 1.5).sqrt();
        assert!((gamma - 0.25 * 64.0 / t).abs() < 1e-14);
        let expect_beta =
            (0.25f64 * 0.25 * (8.0 * 1.5 / t) * (8.0 * 1.5 / t) + 0.4 * 0.4).sqrt();
        assert!((beta - expect_beta).abs() < 1e-14);
        assert!((p.r_prime() - 64.0 / t).abs() < 1e-14);
        assert!((p.s1_prime() - 12.0 / t).abs() < 1e-14);
    }

    #[test]
    fn refuses_unsmoothed_parameters() {
        // tiny r on a coarse lattice: precondition cannot hold
        let l = Lattice::integers(2, DEFAULT_PREC);
        let inst = BddInstance::with_planted(l.clone(), &[1, 0], &[0.05, 0.0]).unwrap();
        let p = BddTransformParams::new(0.3, 0.1, 0.1, 1e-6).unwrap();
        let spec = DiscreteGaussianSpec {
            lattice: l,
            coset_shift: None,
            width: Real::from_f64(0.3, DEFAULT_PREC),
            mode: DgMode::ExactEnumeration,
        };
        let dgs = DiscreteGaussianSampler::prepare(spec).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(50);
        let r = bdd_to_clwe(&inst, &p, &[0.05, 0.0], &dgs, 10, &mut rng);
        assert!(r.is_err());
    }

    #[test]
    fn zero_offset_limit_gives_gaussian_mod_one() {
        // w = 0: the z coordinate is e mod 1 with e ~ D_{R, s2}
        let l = Lattice::scaled_integers(0.5, 2, DEFAULT_PREC).unwrap();
        let inst = BddInstance::with_planted(l.clone(), &[1, -2], &[0.0, 0.0]).unwrap();
        let p = BddTransformParams::new(8.0, 1.5, 0.4, 1e-4).unwrap();
        let spec = DiscreteGaussianSpec {
            lattice: l,
            coset_shift: None,
            width: Real::from_f64(8.0, DEFAULT_PREC),
            mode: DgMode::ExactEnumeration,
        };
        let dgs = DiscreteGaussianSampler::prepare(spec).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(51);
        let (samples, out) = bdd_to_clwe(&inst, &p, &[0.0, 0.0], &dgs, 30_000, &mut rng).unwrap();
        assert_eq!(out.gamma, 0.0);
        // e ~ width 0.4 mod 1: compare to direct draws
        let a: Vec<f64> = samples.iter().map(|s| s.z - s.z.round()).collect();
        let std = crate::numerics::width_to_std(0.4);
        let b: Vec<f64> = (0..30_000)
            .map(|_| {
                let e: f64 = rng.sample::<f64, _>(StandardNormal) * std;
                let m = e.rem_euclid(1.0);
                m - m.round()
            })
            .collect();
        assert!(crate::harness::stats::ks_two_sample(&a, &b, 0.001).unwrap().pass);
    }
}
