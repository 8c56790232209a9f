//! Discrete Gaussian sampling over lattices and cosets.
//!
//! Two modes are provided. Exact enumeration (dimension <= 3) samples from
//! the normalized restriction of `rho_r` to a candidate set whose excluded
//! mass is certified below 1e-12. The randomized nearest-plane mode walks
//! the Gram-Schmidt frame with per-coordinate 1-D discrete Gaussians of
//! width `r/||b*_i||`, valid when `r` comfortably exceeds the largest
//! Gram-Schmidt norm.
//!
//! The 1-D integer sampler is rejection from a two-sided geometric
//! proposal with exact acceptance: the accept/reject comparison is decided
//! in f64 only when the margin is provably safe and re-evaluated at full
//! precision otherwise, so no floating shortcut affects the sampled law.

use super::Lattice;
use crate::error::{Error, Result};
use crate::numerics::{Real, Vector};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DgMode {
    ExactEnumeration,
    RandomizedNearestPlane,
}

/// Specification of a discrete Gaussian `D_{shift + L, width}`.
#[derive(Clone, Debug)]
pub struct DiscreteGaussianSpec {
    pub lattice: Lattice,
    pub coset_shift: Option<Vector>,
    pub width: Real,
    pub mode: DgMode,
}

/// Prepared sampler state (enumeration tables or Gram-Schmidt data).
pub struct DiscreteGaussianSampler {
    spec: DiscreteGaussianSpec,
    table: Option<ExactTable>,
}

struct ExactTable {
    coeffs: Vec<Vec<i64>>,
    cum_f64: Vec<f64>,
    cum_real: Vec<Real>,
    total: Real,
    weights_f64: Vec<f64>,
}

const EXACT_EXCLUDED_MASS: f64 = 1e-12;
const EXACT_CANDIDATE_LIMIT: usize = 1_000_000;

impl DiscreteGaussianSampler {
    pub fn prepare(spec: DiscreteGaussianSpec) -> Result<Self> {
        if spec.width <= 0.0 {
            return Err(Error::Parameter("discrete Gaussian width must be > 0".into()));
        }
        if let Some(shift) = &spec.coset_shift {
            if shift.dim() != spec.lattice.dim() {
                return Err(Error::Parameter("coset shift dimension mismatch".into()));
            }
        }
        match spec.mode {
            DgMode::ExactEnumeration => {
                if spec.lattice.dim() > 3 {
                    return Err(Error::Parameter(
                        "exact enumeration sampling supports dimension <= 3".into(),
                    ));
                }
                let table = build_exact_table(&spec)?;
                Ok(DiscreteGaussianSampler {
                    spec,
                    table: Some(table),
                })
            }
            DgMode::RandomizedNearestPlane => {
                let gs = spec.lattice.gs();
                let max_h = gs
                    .norm_sq
                    .iter()
                    .map(|x| x.to_f64().sqrt())
                    .fold(0.0f64, f64::max);
                let n = spec.lattice.dim() as f64;
                // validity gate: per-coordinate widths must smooth Z
                let needed = ((2.0 * n * (1.0 + 2f64.powi(30))).ln() / PI).sqrt() * max_h;
                if spec.width.to_f64() < needed {
                    return Err(Error::Parameter(format!(
                        "randomized nearest-plane mode needs width >= {needed:.4} here \
                         (max Gram-Schmidt norm {max_h:.4}); got {}",
                        spec.width.to_f64()
                    )));
                }
                Ok(DiscreteGaussianSampler { spec, table: None })
            }
        }
    }

    pub fn spec(&self) -> &DiscreteGaussianSpec {
        &self.spec
    }

    pub fn sample(&self, rng: &mut ChaCha12Rng) -> Result<Vector> {
        match self.spec.mode {
            DgMode::ExactEnumeration => {
                let table = self.table.as_ref().expect("table prepared");
                let idx = table.draw(rng);
                Ok(self.point_for(&table.coeffs[idx]))
            }
            DgMode::RandomizedNearestPlane => self.sample_nearest_plane(rng),
        }
    }

    /// Enumerated support and exact pmf (exact mode only); used by
    /// chi-square goodness-of-fit checks.
    pub fn support_pmf(&self) -> Option<(&[Vec<i64>], Vec<f64>)> {
        let t = self.table.as_ref()?;
        let total = t.total.to_f64();
        Some((&t.coeffs, t.weights_f64.iter().map(|w| w / total).collect()))
    }

    fn point_for(&self, coeffs: &[i64]) -> Vector {
        let mut p = self.spec.lattice.point(coeffs);
        if let Some(shift) = &self.spec.coset_shift {
            p = p.add(shift);
        }
        p
    }

    fn sample_nearest_plane(&self, rng: &mut ChaCha12Rng) -> Result<Vector> {
        let l = &self.spec.lattice;
        let n = l.dim();
        let prec = l.prec().max(self.spec.width.prec());
        let gs = l.gs();
        // sample v ~ D_{L, r, center}, return shift + v with center = -shift
        let mut residual = match &self.spec.coset_shift {
            Some(y) => y.scaled(&(-Real::one(prec))),
            None => Vector::zeros(n, prec),
        };
        let mut v = Vector::zeros(n, prec);
        for i in (0..n).rev() {
            let h = gs.norm_sq[i].sqrt();
            let center = residual.dot(&gs.orth[i]) / &gs.norm_sq[i];
            let width_i = &self.spec.width / &h;
            let z = sample_z_shifted(&center, &width_i, prec, rng)?;
            let zr = Real::from_i64(z, prec);
            let col = l.basis().col(i);
            v.axpy(&zr, &col);
            residual.axpy(&(-&zr), &col);
        }
        Ok(match &self.spec.coset_shift {
            Some(y) => y.add(&v),
            None => v,
        })
    }
}

/// One-shot convenience wrapper around [`DiscreteGaussianSampler`].
pub fn sample_discrete_gaussian(
    spec: &DiscreteGaussianSpec,
    rng: &mut ChaCha12Rng,
) -> Result<Vector> {
    DiscreteGaussianSampler::prepare(spec.clone())?.sample(rng)
}

fn build_exact_table(spec: &DiscreteGaussianSpec) -> Result<ExactTable> {
    let l = &spec.lattice;
    let n = l.dim();
    let prec = l.prec().max(spec.width.prec());
    // reuse the certified mass machinery to fix the candidate box, then
    // enumerate candidates and their exact weights
    let zero_shift = Vector::zeros(n, prec);
    let shift = spec.coset_shift.as_ref().unwrap_or(&zero_shift);
    let mass = crate::numerics::gaussian_mass_coset(l, shift, &spec.width, EXACT_EXCLUDED_MASS)?;
    let gs = l.gs();
    let s_sq = spec.width.square();
    let a: Vec<Real> = gs.norm_sq.iter().map(|h| h / &s_sq).collect();
    let sigma: Vec<Real> = (0..n)
        .map(|i| shift.dot(&gs.orth[i]) / &gs.norm_sq[i])
        .collect();
    // recompute per-coordinate bounds the same way gaussian_mass planned them
    let radius = mass.truncation_radius;
    let mut bounds = vec![0i64; n];
    for i in 0..n {
        let h = gs.norm_sq[i].to_f64().sqrt();
        bounds[i] = (radius / h).ceil() as i64 + 1;
    }

    let pi_r = Real::pi(prec);
    let mut coeffs_out: Vec<Vec<i64>> = Vec::new();
    let mut weights: Vec<Real> = Vec::new();
    let mut stack_coeffs = vec![0i64; n];
    collect_candidates(
        l,
        &a,
        &sigma,
        &bounds,
        &pi_r,
        n - 1,
        &Real::one(prec),
        &mut stack_coeffs,
        &mut coeffs_out,
        &mut weights,
    )?;
    if coeffs_out.is_empty() {
        return Err(Error::Consistency("empty discrete Gaussian support".into()));
    }

    let mut cum_real = Vec::with_capacity(weights.len());
    let mut acc = Real::zero(prec);
    for w in &weights {
        acc += w;
        cum_real.push(acc.clone());
    }
    let total = acc;
    let total_f = total.to_f64();
    let cum_f64: Vec<f64> = cum_real.iter().map(|x| x.to_f64() / total_f).collect();
    let weights_f64: Vec<f64> = weights.iter().map(Real::to_f64).collect();
    Ok(ExactTable {
        coeffs: coeffs_out,
        cum_f64,
        cum_real,
        total,
        weights_f64,
    })
}

#[allow(clippy::too_many_arguments)]
fn collect_candidates(
    l: &Lattice,
    a: &[Real],
    sigma: &[Real],
    bounds: &[i64],
    pi_r: &Real,
    level: usize,
    partial: &Real,
    coeffs: &mut [i64],
    out_coeffs: &mut Vec<Vec<i64>>,
    out_weights: &mut Vec<Real>,
) -> Result<()> {
    let gs_mu = &l.gs().mu;
    let prec = partial.prec();
    let mut offset = sigma[level].clone();
    for j in (level + 1)..a.len() {
        if coeffs[j] != 0 {
            offset += &(&gs_mu[j][level] * &Real::from_i64(coeffs[j], prec));
        }
    }
    let off_f = offset.to_f64();
    let c_lo = (-(bounds[level] as f64) - off_f).ceil() as i64;
    let c_hi = ((bounds[level] as f64) - off_f).floor() as i64;
    for c in c_lo..=c_hi {
        coeffs[level] = c;
        let t = &Real::from_i64(c, prec) + &offset;
        let w = (-(pi_r * &a[level]) * t.square()).exp();
        let next = partial * &w;
        if level == 0 {
            if out_coeffs.len() >= EXACT_CANDIDATE_LIMIT {
                return Err(Error::BoxTooLarge(
                    "exact sampler candidate set exceeds 10^6 points".into(),
                ));
            }
            out_coeffs.push(coeffs.to_vec());
            out_weights.push(next.clone());
        } else {
            collect_candidates(
                l, a, sigma, bounds, pi_r, level - 1, &next, coeffs, out_coeffs, out_weights,
            )?;
        }
    }
    coeffs[level] = 0;
    Ok(())
}

impl ExactTable {
    /// Inverse-CDF draw: decided against the f64 shadow table when the
    /// uniform lands clear of every boundary, re-decided against the exact
    /// cumulative weights otherwise.
    fn draw(&self, rng: &mut ChaCha12Rng) -> usize {
        let u: f64 = rng.random();
        let idx = self.cum_f64.partition_point(|&c| c < u);
        let idx = idx.min(self.cum_f64.len() - 1);
        let margin = 1e-12;
        let clear_left = idx == 0 || (u - self.cum_f64[idx - 1]).abs() > margin;
        let clear_right = (self.cum_f64[idx] - u).abs() > margin;
        if clear_left && clear_right {
            return idx;
        }
        // boundary case: extend the uniform to full precision and compare
        // against the exact cumulative sums
        let prec = self.total.prec();
        let mut ur = Real::from_f64(u, prec);
        let scale = Real::from_f64(2f64.powi(-52), prec) * Real::from_f64(2f64.powi(-52), prec);
        let extra: f64 = rng.random();
        ur += &(Real::from_f64(extra, prec) * scale);
        let target = ur * &self.total;
        match self
            .cum_real
            .binary_search_by(|c| c.partial_cmp(&target).unwrap())
        {
            Ok(i) => i,
            Err(i) => i.min(self.cum_real.len() - 1),
        }
    }
}

/// Exact sampler for the 1-D discrete Gaussian on `Z` with weight
/// proportional to `rho_width(k - center)`.
///
/// Rejection from a two-sided geometric proposal `q^|u|` around the
/// rounded center with `q = exp(-pi/(2 width^2))`; the acceptance ratio
/// `rho_width(u - mu) / (M q^|u|)` with `M = exp(pi/(4 width^2))` is at
/// most 1 for every integer `u` and `|mu| <= 1/2`.
pub fn sample_z_shifted(
    center: &Real,
    width: &Real,
    prec: u32,
    rng: &mut ChaCha12Rng,
) -> Result<i64> {
    if *width <= 0.0 {
        return Err(Error::Parameter("1-D sampler width must be > 0".into()));
    }
    let c_f = center.to_f64();
    let j0 = c_f.round();
    let j0_i = j0 as i64;
    let mu = center - Real::from_f64(j0, prec); // in [-1/2, 1/2]
    let mu_f = mu.to_f64();
    let w_f = width.to_f64();
    let inv_w2 = 1.0 / (w_f * w_f);
    let ln_q = -PI / 2.0 * inv_w2;
    // ln A(u) = (pi/w^2) * (|u|/2 - (u - mu)^2 - 1/4)
    let max_rounds = 50_000usize + (w_f.abs() as usize) * 2_000;
    for _ in 0..max_rounds {
        // magnitude m >= 0 with P(m) ~ q^m, by inversion of the geometric cdf
        let u1: f64 = rng.random();
        let u1 = u1.max(f64::MIN_POSITIVE);
        let raw = u1.ln() / ln_q;
        let m = raw.floor();
        // guard the floor against f64 boundary ambiguity
        let m = if (raw - m) < 1e-9 || (m + 1.0 - raw) < 1e-9 {
            exact_geometric_magnitude(u1, width, prec, rng)
        } else {
            m as i64
        };
        let negative: bool = rng.random();
        if m == 0 && negative {
            continue; // fold the double-counted zero
        }
        let u = if negative { -m } else { m };
        let uf = u as f64;
        let ln_a = PI * inv_w2 * (uf.abs() / 2.0 - (uf - mu_f) * (uf - mu_f) - 0.25);
        let v: f64 = rng.random();
        let a = if ln_a < -745.0 { 0.0 } else { ln_a.exp() };
        if (v - a).abs() > 1e-9 {
            if v < a {
                return Ok(j0_i + u);
            }
            continue;
        }
        // boundary: recompute the acceptance ratio at full precision
        let pi_r = Real::pi(prec);
        let u_r = Real::from_i64(u, prec);
        let w2 = width.square();
        let quarter = Real::from_f64(0.25, prec);
        let half_abs = u_r.abs() / Real::from_f64(2.0, prec);
        let dev = (&u_r - &mu).square();
        let ln_a_r = pi_r / w2 * (half_abs - dev - quarter);
        let a_r = ln_a_r.exp();
        let v_r = extended_uniform(v, prec, rng);
        if v_r < a_r {
            return Ok(j0_i + u);
        }
    }
    Err(Error::Starvation(format!(
        "1-D discrete Gaussian rejection did not accept within {max_rounds} rounds \
         (width {w_f}, center {c_f})"
    )))
}

/// Exact geometric magnitude when the f64 inversion is ambiguous: walk the
/// cumulative `1 - q^(m+1)` at full precision.
fn exact_geometric_magnitude(u1: f64, width: &Real, prec: u32, rng: &mut ChaCha12Rng) -> i64 {
    let u = extended_uniform(u1, prec, rng);
    let pi_r = Real::pi(prec);
    let q = (-(pi_r / (width.square() + width.square()))).exp();
    // find smallest m with q^(m+1) < u  <=>  cumulative >= 1 - u ... walk
    let mut pow = q.clone();
    let mut m = 0i64;
    while pow >= u && m < 1_000_000 {
        pow *= &q;
        m += 1;
    }
    m
}

/// Extends an f64 uniform draw with fresh random bits below its resolution.
fn extended_uniform(u: f64, prec: u32, rng: &mut ChaCha12Rng) -> Real {
    let mut r = Real::from_f64(u, prec);
    let mut scale = Real::from_f64(2f64.powi(-53), prec);
    for _ in 0..4 {
        let extra: f64 = rng.random();
        r += &(Real::from_f64(extra, prec) * &scale);
        scale *= &Real::from_f64(2f64.powi(-53), prec);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::stats::chi_square_counts;
    use crate::numerics::DEFAULT_PREC;
    use rand::SeedableRng;

    fn r(x: f64) -> Real {
        Real::from_f64(x, DEFAULT_PREC)
    }

    #[test]
    fn z_width_one_zero_probability() {
        // Pr[0] = 1/rho(Z) = 0.92044... within 3 sigma binomial at N = 1e5
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let n = 100_000;
        let mut zeros = 0usize;
        for _ in 0..n {
            let k = sample_z_shifted(&r(0.0), &r(1.0), DEFAULT_PREC, &mut rng).unwrap();
            if k == 0 {
                zeros += 1;
            }
        }
        let p = 0.9204417878355910;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        let got = zeros as f64 / n as f64;
        assert!(
            (got - p).abs() < 3.0 * sigma,
            "Pr[0] = {got}, expected {p} += {sigma}"
        );
    }

    #[test]
    fn coset_half_symmetric() {
        // D on Z with weight rho(k - 1/2): output symmetric about 1/2,
        // i.e. k and 1-k equally likely
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let n = 60_000;
        let mut pos = 0i64;
        let mut neg = 0i64;
        for _ in 0..n {
            let k = sample_z_shifted(&r(0.5), &r(1.0), DEFAULT_PREC, &mut rng).unwrap();
            if k >= 1 {
                pos += 1;
            } else {
                neg += 1;
            }
        }
        let dev = (pos - neg).abs() as f64;
        assert!(dev < 4.0 * (n as f64).sqrt(), "asymmetry {pos} vs {neg}");
    }

    #[test]
    fn exact_mode_matches_enumerated_pmf() {
        // 2-D chi-square against the exact pmf at N = 1e5
        let l = Lattice::integers(2, DEFAULT_PREC);
        let spec = DiscreteGaussianSpec {
            lattice: l,
            coset_shift: None,
            width: r(1.3),
            mode: DgMode::ExactEnumeration,
        };
        let sampler = DiscreteGaussianSampler::prepare(spec).unwrap();
        let (support, pmf) = sampler.support_pmf().unwrap();
        let index: std::collections::HashMap<Vec<i64>, usize> = support
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let n = 100_000;
        let mut counts = vec![0u64; pmf.len()];
        for _ in 0..n {
            let v = sampler.sample(&mut rng).unwrap();
            let key: Vec<i64> = v.iter().map(|x| x.round().to_f64() as i64).collect();
            counts[*index.get(&key).expect("sample in support")] += 1;
        }
        let res = chi_square_counts(&counts, &pmf, 0.001).unwrap();
        assert!(res.pass, "chi-square p = {}", res.p_value);
    }

    #[test]
    fn nearest_plane_mode_matches_exact_mode_marginals() {
        let l = Lattice::integers(1, DEFAULT_PREC);
        let width = r(4.0);
        let spec_np = DiscreteGaussianSpec {
            lattice: l.clone(),
            coset_shift: None,
            width: width.clone(),
            mode: DgMode::RandomizedNearestPlane,
        };
        let spec_ex = DiscreteGaussianSpec {
            lattice: l,
            coset_shift: None,
            width,
            mode: DgMode::ExactEnumeration,
        };
        let s1 = DiscreteGaussianSampler::prepare(spec_np).unwrap();
        let s2 = DiscreteGaussianSampler::prepare(spec_ex).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(14);
        let n = 40_000;
        let mut sum1 = 0.0;
        let mut sumsq1 = 0.0;
        let mut sum2 = 0.0;
        let mut sumsq2 = 0.0;
        for _ in 0..n {
            let a = s1.sample(&mut rng).unwrap().get(0).to_f64();
            let b = s2.sample(&mut rng).unwrap().get(0).to_f64();
            sum1 += a;
            sumsq1 += a * a;
            sum2 += b;
            sumsq2 += b * b;
        }
        let v1 = sumsq1 / n as f64 - (sum1 / n as f64).powi(2);
        let v2 = sumsq2 / n as f64 - (sum2 / n as f64).powi(2);
        // variances agree within 5 std errors of the variance estimate
        let se = v1 * (2.0 / n as f64).sqrt() * 2.0;
        assert!((v1 - v2).abs() < 5.0 * se, "v1 = {v1}, v2 = {v2}");
    }

    #[test]
    fn nearest_plane_rejects_small_width() {
        let l = Lattice::integers(2, DEFAULT_PREC);
        let spec = DiscreteGaussianSpec {
            lattice: l,
            coset_shift: None,
            width: r(0.5),
            mode: DgMode::RandomizedNearestPlane,
        };
        assert!(DiscreteGaussianSampler::prepare(spec).is_err());
    }
}
