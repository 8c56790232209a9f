//! Samplers and density evaluators for the CLWE distribution family:
//! CLWE samples `(y, z)`, the homogeneous mixture (Gaussian pancakes),
//! its noiseless and multi-direction variants, and the null distributions
//! used by the decision problems.
//!
//! Statistics paths carry 64-bit floats; solver paths carry full-precision
//! values with the algebraic relation `z = gamma*<y,w> + e mod 1` exact at
//! working precision. A [`SampleBatch`] records which fidelity it holds.

mod batch;
mod density;

pub use batch::{BatchData, BatchMeta, Fidelity, SampleBatch};
pub use density::{density_ratio, hclwe_density, hclwe_marginal_1d, normalization_z};

use crate::error::{Error, Result};
use crate::lattice::sample_z_shifted;
use crate::numerics::{width_to_std, Matrix, Real, Vector};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

/// Parameters of the CLWE problem: dimension `n`, noise width `beta`,
/// layer density `gamma`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ClweParams {
    pub n: usize,
    pub beta: f64,
    pub gamma: f64,
}

impl ClweParams {
    pub fn new(n: usize, beta: f64, gamma: f64) -> Result<Self> {
        let p = ClweParams { n, beta, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Parameter("dimension must be positive".into()));
        }
        if !(self.beta >= 0.0) {
            return Err(Error::Parameter("beta must be >= 0".into()));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::Parameter("gamma must be > 0".into()));
        }
        Ok(())
    }

    /// Whether the parameters sit in the hardness regime:
    /// `gamma >= 2*sqrt(n)` with `gamma/beta` below the given bound.
    pub fn is_hardness_regime(&self, ratio_bound: f64) -> bool {
        self.gamma >= 2.0 * (self.n as f64).sqrt()
            && self.beta > 0.0
            && self.gamma / self.beta <= ratio_bound
    }

    /// `sqrt(beta^2 + gamma^2)`, the width of the mixture-index Gaussian.
    pub fn mixture_index_width(&self) -> f64 {
        (self.beta * self.beta + self.gamma * self.gamma).sqrt()
    }

    /// Spacing of the mixture components along the hidden direction,
    /// `gamma / (beta^2 + gamma^2)`.
    pub fn layer_spacing(&self) -> f64 {
        self.gamma / (self.beta * self.beta + self.gamma * self.gamma)
    }

    /// Width of each mixture component along the hidden direction,
    /// `beta / sqrt(beta^2 + gamma^2)`.
    pub fn layer_width(&self) -> f64 {
        self.beta / self.mixture_index_width()
    }
}

/// A unit hidden direction.
#[derive(Clone, Debug)]
pub struct HiddenDirection {
    w: Vec<f64>,
}

impl HiddenDirection {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        let norm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Parameter("hidden direction must be nonzero".into()));
        }
        Ok(HiddenDirection {
            w: w.into_iter().map(|x| x / norm).collect(),
        })
    }

    /// Uniformly random unit vector.
    pub fn random(n: usize, rng: &mut ChaCha12Rng) -> Self {
        loop {
            let w: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            if let Ok(d) = HiddenDirection::new(w) {
                return d;
            }
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn dot(&self, y: &[f64]) -> f64 {
        self.w.iter().zip(y).map(|(a, b)| a * b).sum()
    }

    pub fn to_vector(&self, prec: u32) -> Vector {
        Vector::from_f64s(&self.w, prec)
    }
}

/// An orthonormal set of `m` hidden directions (columns of an n x m matrix).
#[derive(Clone, Debug)]
pub struct HiddenSubspace {
    cols: Vec<Vec<f64>>,
}

impl HiddenSubspace {
    /// Validates orthonormality of the given columns.
    pub fn new(cols: Vec<Vec<f64>>) -> Result<Self> {
        for (i, a) in cols.iter().enumerate() {
            for (j, b) in cols.iter().enumerate() {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                if (dot - expect).abs() > 1e-10 {
                    return Err(Error::Parameter(format!(
                        "hidden subspace columns not orthonormal: <w{i}, w{j}> = {dot}"
                    )));
                }
            }
        }
        Ok(HiddenSubspace { cols })
    }

    /// Haar-random m-dimensional orthonormal frame in dimension n.
    pub fn random(n: usize, m: usize, rng: &mut ChaCha12Rng) -> Result<Self> {
        if m > n {
            return Err(Error::Parameter("need m <= n hidden directions".into()));
        }
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(m);
        while cols.len() < m {
            let mut v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            for c in &cols {
                let d: f64 = v.iter().zip(c.iter()).map(|(a, b)| a * b).sum();
                for (x, y) in v.iter_mut().zip(c.iter()) {
                    *x -= d * y;
                }
            }
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-8 {
                cols.push(v.into_iter().map(|x| x / norm).collect());
            }
        }
        Ok(HiddenSubspace { cols })
    }

    /// The first `m` coordinate directions of dimension n.
    pub fn axis_aligned(n: usize, m: usize) -> Result<Self> {
        if m > n {
            return Err(Error::Parameter("need m <= n hidden directions".into()));
        }
        let cols = (0..m)
            .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Ok(HiddenSubspace { cols })
    }

    pub fn m(&self) -> usize {
        self.cols.len()
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.cols
    }
}

/// A CLWE sample `(y, z)` at statistics fidelity.
#[derive(Clone, Debug)]
pub struct ClweSample {
    pub y: Vec<f64>,
    pub z: f64,
}

/// A CLWE sample at solver fidelity: `y` is lifted exactly and `z`
/// satisfies `z = gamma*<y,w> + e mod 1` at working precision.
#[derive(Clone, Debug)]
pub struct PreciseClweSample {
    pub y: Vector,
    pub z: Real,
}

fn standard_normal_vec(n: usize, rng: &mut ChaCha12Rng) -> Vec<f64> {
    let std = width_to_std(1.0);
    (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal) * std)
        .collect()
}

/// Exact sampler for the 1-D discrete Gaussian over `Z` used for mixture
/// component indices: the certified truncated table carries exact weights;
/// draws fall back to full-precision comparisons near category boundaries.
pub struct ZIndexTable {
    offsets: Vec<i64>,
    cum_f64: Vec<f64>,
    cum_real: Vec<Real>,
    total: Real,
    pub tail_bound: f64,
}

impl ZIndexTable {
    /// Table for `D_{Z, width}` truncated at `|k| <= 8*ceil(width)` (tail
    /// certified far below any statistical resolution used in tests).
    pub fn new(width: f64, prec: u32) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::Parameter("index width must be > 0".into()));
        }
        let k_max = (8.0 * width.ceil()).max(8.0) as i64;
        let pi_r = Real::pi(prec);
        let w_r = Real::from_f64(width, prec);
        let w2 = w_r.square();
        let mut offsets = Vec::new();
        let mut cum_real = Vec::new();
        let mut acc = Real::zero(prec);
        for k in -k_max..=k_max {
            let kr = Real::from_i64(k, prec);
            let weight = (-(&pi_r * kr.square() / &w2)).exp();
            acc += &weight;
            offsets.push(k);
            cum_real.push(acc.clone());
        }
        let total = acc;
        let total_f = total.to_f64();
        let cum_f64 = cum_real.iter().map(|c| c.to_f64() / total_f).collect();
        let tail_bound = 2.0 * (-PI * (k_max as f64 / width).powi(2)).exp()
            / (1.0 - (-PI * (2.0 * k_max as f64 + 1.0) / (width * width)).exp());
        Ok(ZIndexTable {
            offsets,
            cum_f64,
            cum_real,
            total,
            tail_bound,
        })
    }

    pub fn draw(&self, rng: &mut ChaCha12Rng) -> i64 {
        let u: f64 = rng.random();
        let idx = self.cum_f64.partition_point(|&c| c < u);
        let idx = idx.min(self.offsets.len() - 1);
        let margin = 1e-12;
        let clear_left = idx == 0 || (u - self.cum_f64[idx - 1]).abs() > margin;
        let clear_right = (self.cum_f64[idx] - u).abs() > margin;
        if clear_left && clear_right {
            return self.offsets[idx];
        }
        let prec = self.total.prec();
        let mut ur = Real::from_f64(u, prec);
        let extra: f64 = rng.random();
        ur += &(Real::from_f64(extra, prec) * Real::from_f64(2f64.powi(-53), prec).square());
        let target = ur * &self.total;
        let i = match self
            .cum_real
            .binary_search_by(|c| c.partial_cmp(&target).unwrap())
        {
            Ok(i) => i,
            Err(i) => i.min(self.offsets.len() - 1),
        };
        self.offsets[i]
    }
}

/// Draws one CLWE sample: `y ~ D_{R^n}`, `e ~ D_{R,beta}` (zero when
/// `beta = 0`), `z = (gamma*<y,w> + e) mod 1`.
pub fn sample_clwe(
    params: &ClweParams,
    w: &HiddenDirection,
    rng: &mut ChaCha12Rng,
) -> ClweSample {
    let y = standard_normal_vec(params.n, rng);
    let e = if params.beta > 0.0 {
        rng.sample::<f64, _>(StandardNormal) * width_to_std(params.beta)
    } else {
        0.0
    };
    let z = (params.gamma * w.dot(&y) + e).rem_euclid(1.0);
    ClweSample { y, z }
}

/// Solver-fidelity CLWE sample: the coordinates of `y` are drawn at f64
/// resolution and lifted exactly; `z` is computed at `prec` bits so the
/// linear relation holds exactly for the lifted values.
pub fn sample_clwe_precise(
    params: &ClweParams,
    w: &HiddenDirection,
    prec: u32,
    rng: &mut ChaCha12Rng,
) -> PreciseClweSample {
    let y_f = standard_normal_vec(params.n, rng);
    let y = Vector::from_f64s(&y_f, prec);
    let w_r = w.to_vector(prec);
    let gamma = Real::from_f64(params.gamma, prec);
    let mut z = gamma * y.dot(&w_r);
    if params.beta > 0.0 {
        let e = rng.sample::<f64, _>(StandardNormal) * width_to_std(params.beta);
        z += &Real::from_f64(e, prec);
    }
    PreciseClweSample { y, z: z.mod_one() }
}

/// Draws one homogeneous CLWE sample (mixture form): component index
/// `j ~ D_{Z, sqrt(beta^2+gamma^2)}`, hidden coordinate centered at
/// `gamma*j/(beta^2+gamma^2)` with width `beta/sqrt(beta^2+gamma^2)`,
/// standard Gaussian on the orthogonal complement.
pub fn sample_hclwe(
    params: &ClweParams,
    w: &HiddenDirection,
    index_table: &ZIndexTable,
    rng: &mut ChaCha12Rng,
) -> Vec<f64> {
    let j = index_table.draw(rng) as f64;
    let mean = j * params.layer_spacing();
    let hidden = mean + rng.sample::<f64, _>(StandardNormal) * width_to_std(params.layer_width());
    let mut y = standard_normal_vec(params.n, rng);
    let along = w.dot(&y);
    for (yi, wi) in y.iter_mut().zip(w.coords()) {
        *yi += (hidden - along) * wi;
    }
    y
}

/// Convenience wrapper building the index table per call; use
/// [`HClweSampler`] for bulk sampling.
pub fn sample_hclwe_once(
    params: &ClweParams,
    w: &HiddenDirection,
    rng: &mut ChaCha12Rng,
) -> Result<Vec<f64>> {
    let sampler = HClweSampler::new(params.clone(), w.clone())?;
    Ok(sampler.sample(rng))
}

/// Prepared homogeneous CLWE sampler (index table built once).
pub struct HClweSampler {
    pub params: ClweParams,
    pub w: HiddenDirection,
    table: ZIndexTable,
}

impl HClweSampler {
    pub fn new(params: ClweParams, w: HiddenDirection) -> Result<Self> {
        params.validate()?;
        if params.beta == 0.0 {
            return Err(Error::Parameter(
                "homogeneous sampler needs beta > 0; use the noiseless sampler".into(),
            ));
        }
        if w.dim() != params.n {
            return Err(Error::Parameter("hidden direction dimension mismatch".into()));
        }
        let table = ZIndexTable::new(params.mixture_index_width(), crate::numerics::DEFAULT_PREC)?;
        Ok(HClweSampler { params, w, table })
    }

    pub fn sample(&self, rng: &mut ChaCha12Rng) -> Vec<f64> {
        sample_hclwe(&self.params, &self.w, &self.table, rng)
    }
}

/// Noiseless homogeneous CLWE: hidden coordinate exactly on `(1/gamma)Z`
/// drawn from the width-1 discrete Gaussian, standard Gaussian complement.
pub struct NoiselessHClweSampler {
    pub gamma: f64,
    pub w: HiddenDirection,
    table: ZIndexTable,
}

impl NoiselessHClweSampler {
    pub fn new(gamma: f64, w: HiddenDirection) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::Parameter("gamma must be > 0".into()));
        }
        // D_{(1/gamma)Z, 1}: value k/gamma with weight rho(k/gamma), i.e.
        // index k ~ D_{Z, gamma}
        let table = ZIndexTable::new(gamma, crate::numerics::DEFAULT_PREC)?;
        Ok(NoiselessHClweSampler {
            gamma,
            w,
            table,
        })
    }

    pub fn sample(&self, rng: &mut ChaCha12Rng) -> Vec<f64> {
        let hidden = self.table.draw(rng) as f64 / self.gamma;
        let mut y = standard_normal_vec(self.w.dim(), rng);
        let along = self.w.dot(&y);
        for (yi, wi) in y.iter_mut().zip(self.w.coords()) {
            *yi += (hidden - along) * wi;
        }
        y
    }
}

pub fn sample_hclwe_noiseless(
    gamma: f64,
    w: &HiddenDirection,
    rng: &mut ChaCha12Rng,
) -> Result<Vec<f64>> {
    Ok(NoiselessHClweSampler::new(gamma, w.clone())?.sample(rng))
}

/// m-direction homogeneous CLWE: each hidden coordinate sampled
/// independently as in the single-direction case; `m = 0` yields exactly
/// the standard Gaussian.
pub struct MHClweSampler {
    pub params: ClweParams,
    pub subspace: HiddenSubspace,
    table: ZIndexTable,
}

impl MHClweSampler {
    pub fn new(params: ClweParams, subspace: HiddenSubspace) -> Result<Self> {
        params.validate()?;
        if params.beta == 0.0 {
            return Err(Error::Parameter("m-direction sampler needs beta > 0".into()));
        }
        for c in subspace.columns() {
            if c.len() != params.n {
                return Err(Error::Parameter("subspace dimension mismatch".into()));
            }
        }
        let table = ZIndexTable::new(params.mixture_index_width(), crate::numerics::DEFAULT_PREC)?;
        Ok(MHClweSampler {
            params,
            subspace,
            table,
        })
    }

    pub fn sample(&self, rng: &mut ChaCha12Rng) -> Vec<f64> {
        let mut y = standard_normal_vec(self.params.n, rng);
        for w in self.subspace.columns() {
            let j = self.table.draw(rng) as f64;
            let mean = j * self.params.layer_spacing();
            let hidden = mean
                + rng.sample::<f64, _>(StandardNormal) * width_to_std(self.params.layer_width());
            let along: f64 = w.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
            for (yi, wi) in y.iter_mut().zip(w.iter()) {
                *yi += (hidden - along) * wi;
            }
        }
        y
    }
}

/// Null for the CLWE decision problem: standard Gaussian `y`, uniform `z`.
pub fn sample_null_clwe(n: usize, rng: &mut ChaCha12Rng) -> ClweSample {
    ClweSample {
        y: standard_normal_vec(n, rng),
        z: rng.random::<f64>(),
    }
}

/// Null for the homogeneous decision problem: standard Gaussian.
pub fn sample_null_gaussian(n: usize, rng: &mut ChaCha12Rng) -> Vec<f64> {
    standard_normal_vec(n, rng)
}

/// The `(2k+1)`-component truncation of the homogeneous CLWE mixture along
/// its hidden direction, with the truncation total-variation bound
/// `2*exp(-pi*k^2/(beta^2+gamma^2))` attached.
#[derive(Clone, Debug)]
pub struct TruncatedMixture {
    pub k: i64,
    pub weights: Vec<f64>,
    pub means: Vec<f64>,
    pub component_width: f64,
    pub tv_bound: f64,
}

/// Truncates the mixture to the central `2k+1` components, renormalizing
/// the discrete-Gaussian weights.
pub fn truncate_hclwe(params: &ClweParams, k: i64) -> Result<TruncatedMixture> {
    params.validate()?;
    if params.beta == 0.0 {
        return Err(Error::Parameter("truncation applies to beta > 0".into()));
    }
    if k < 0 {
        return Err(Error::Parameter("k must be >= 0".into()));
    }
    let s2 = params.beta * params.beta + params.gamma * params.gamma;
    let raw: Vec<f64> = (-k..=k).map(|j| (-PI * (j * j) as f64 / s2).exp()).collect();
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| w / total).collect();
    let means = (-k..=k)
        .map(|j| j as f64 * params.layer_spacing())
        .collect();
    Ok(TruncatedMixture {
        k,
        weights,
        means,
        component_width: params.layer_width(),
        tv_bound: 2.0 * (-PI * (k * k) as f64 / s2).exp(),
    })
}

impl TruncatedMixture {
    /// Density of the truncated marginal along the hidden direction
    /// (each component is `rho_w(t - m)/w`, which integrates to 1).
    pub fn marginal_density(&self, t: f64) -> f64 {
        self.weights
            .iter()
            .zip(self.means.iter())
            .map(|(w, m)| {
                let u = (t - m) / self.component_width;
                w * (-PI * u * u).exp() / self.component_width
            })
            .sum()
    }
}

/// Applies a rotation matrix (given at f64 fidelity) to each sample row.
pub fn rotate_rows(rows: &mut [Vec<f64>], r: &Matrix) {
    let n = r.rows();
    let rf: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| r.at(i, j).to_f64()).collect())
        .collect();
    for row in rows.iter_mut() {
        let mut out = vec![0.0; n];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, x) in row.iter().enumerate() {
                *o += rf[i][j] * x;
            }
        }
        *row = out;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::stats::{chi_square_uniform, ks_two_sample};
    use crate::numerics::DEFAULT_PREC;
    use rand::SeedableRng;

    #[test]
    fn noiseless_relation_is_exact() {
        let params = ClweParams::new(3, 0.0, 4.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let w = HiddenDirection::random(3, &mut rng);
        for _ in 0..50 {
            let s = sample_clwe_precise(&params, &w, 256, &mut rng);
            // z - gamma*<y,w> must be an integer at working precision
            let w_r = w.to_vector(256);
            let gamma = Real::from_f64(4.0, 256);
            let resid = (&s.z - gamma * s.y.dot(&w_r)).centered_mod_one();
            assert!(resid.abs().to_f64() < 1e-60);
        }
    }

    #[test]
    fn clwe_y_marginal_variance() {
        // per-coordinate empirical variance ~= 1/(2 pi) within 4 sigma
        let params = ClweParams::new(2, 0.1, 2.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let w = HiddenDirection::new(vec![1.0, 0.0]).unwrap();
        let n = 100_000;
        let mut sumsq = [0.0f64; 2];
        for _ in 0..n {
            let s = sample_clwe(&params, &w, &mut rng);
            sumsq[0] += s.y[0] * s.y[0];
            sumsq[1] += s.y[1] * s.y[1];
        }
        let target = 1.0 / (2.0 * PI);
        // std error of the variance estimate: target * sqrt(2/n)
        let se = target * (2.0 / n as f64).sqrt();
        for v in sumsq {
            assert!((v / n as f64 - target).abs() < 4.0 * se);
        }
    }

    #[test]
    fn clwe_z_uniform_at_large_gamma() {
        // gamma well above the smoothing scale of Z: z is uniform
        let params = ClweParams::new(2, 0.0, 2.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let w = HiddenDirection::random(2, &mut rng);
        let zs: Vec<f64> = (0..100_000)
            .map(|_| sample_clwe(&params, &w, &mut rng).z)
            .collect();
        let res = chi_square_uniform(&zs, 64, 0.001).unwrap();
        assert!(res.pass, "p = {}", res.p_value);
    }

    #[test]
    fn hclwe_layers_have_expected_spacing() {
        // peaks spaced by gamma/(beta^2+gamma^2): fold the hidden
        // projection by the spacing; the folded values concentrate near 0
        let params = ClweParams::new(2, 0.05, 2.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let w = HiddenDirection::new(vec![0.6, 0.8]).unwrap();
        let sampler = HClweSampler::new(params.clone(), w.clone()).unwrap();
        let spacing = params.layer_spacing();
        let n = 20_000;
        let mut within = 0;
        for _ in 0..n {
            let y = sampler.sample(&mut rng);
            let t = w.dot(&y);
            let frac = (t / spacing - (t / spacing).round()).abs();
            if frac < 0.25 {
                within += 1;
            }
        }
        // layer width 0.025 vs spacing 0.5: nearly all folded points in band
        assert!(within as f64 / n as f64 > 0.95);
    }

    #[test]
    fn hclwe_orthogonal_complement_is_standard() {
        let params = ClweParams::new(2, 0.1, 2.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let w = HiddenDirection::new(vec![1.0, 0.0]).unwrap();
        let sampler = HClweSampler::new(params, w).unwrap();
        let n = 100_000;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let y = sampler.sample(&mut rng);
            sumsq += y[1] * y[1];
        }
        let target = 1.0 / (2.0 * PI);
        let se = target * (2.0 / n as f64).sqrt();
        assert!((sumsq / n as f64 - target).abs() < 4.0 * se);
    }

    #[test]
    fn noiseless_support_is_layer_grid() {
        let gamma = 2.0;
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let w = HiddenDirection::new(vec![1.0, 0.0, 0.0]).unwrap();
        let s = NoiselessHClweSampler::new(gamma, w.clone()).unwrap();
        for _ in 0..200 {
            let y = s.sample(&mut rng);
            let t = w.dot(&y) * gamma;
            assert!((t - t.round()).abs() < 1e-9, "support must lie on (1/g)Z");
        }
    }

    #[test]
    fn noiseless_second_moment_matches_theta_oracle() {
        let gamma = 2.0;
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let w = HiddenDirection::new(vec![1.0, 0.0]).unwrap();
        let s = NoiselessHClweSampler::new(gamma, w.clone()).unwrap();
        let n = 1_000_000;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let y = s.sample(&mut rng);
            let t = w.dot(&y);
            sumsq += t * t;
        }
        let oracle = crate::numerics::discrete_gaussian_second_moment(
            &Real::from_f64(gamma, DEFAULT_PREC),
            1e-12,
        )
        .unwrap()
        .to_f64();
        let got = sumsq / n as f64;
        // 4 sigma of the mean of t^2 (var of t^2 roughly 2*oracle^2)
        let se = oracle * (2.0 / n as f64).sqrt() * 1.5;
        assert!((got - oracle).abs() < 4.0 * se, "got {got}, oracle {oracle}");
    }

    #[test]
    fn noiseless_zero_probability_matches_theta() {
        // gamma = 1: Pr[<y,w> = 0] = 1/rho(Z)
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let w = HiddenDirection::new(vec![1.0, 0.0]).unwrap();
        let s = NoiselessHClweSampler::new(1.0, w.clone()).unwrap();
        let n = 100_000;
        let mut zero = 0;
        for _ in 0..n {
            let y = s.sample(&mut rng);
            if w.dot(&y).abs() < 1e-9 {
                zero += 1;
            }
        }
        let p = 0.9204417878355910;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!(((zero as f64 / n as f64) - p).abs() < 3.0 * sigma);
    }

    #[test]
    fn m_zero_is_standard_gaussian_path() {
        let params = ClweParams::new(4, 0.1, 2.0).unwrap();
        let sub = HiddenSubspace::new(vec![]).unwrap();
        let sampler = MHClweSampler::new(params, sub).unwrap();
        let mut rng1 = ChaCha12Rng::seed_from_u64(9);
        let a: Vec<f64> = (0..500).flat_map(|_| sampler.sample(&mut rng1)).collect();
        let mut rng2 = ChaCha12Rng::seed_from_u64(9);
        let b: Vec<f64> = (0..500)
            .flat_map(|_| sample_null_gaussian(4, &mut rng2))
            .collect();
        // identical draws from the same stream: the m = 0 path adds nothing
        assert_eq!(a, b);
    }

    #[test]
    fn m_one_matches_single_direction_sampler() {
        let params = ClweParams::new(3, 0.15, 1.8).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        let w = HiddenDirection::new(vec![0.0, 1.0, 0.0]).unwrap();
        let sub = HiddenSubspace::new(vec![vec![0.0, 1.0, 0.0]]).unwrap();
        let s1 = HClweSampler::new(params.clone(), w.clone()).unwrap();
        let sm = MHClweSampler::new(params, sub).unwrap();
        let n = 30_000;
        let a: Vec<f64> = (0..n).map(|_| w.dot(&s1.sample(&mut rng))).collect();
        let b: Vec<f64> = (0..n).map(|_| w.dot(&sm.sample(&mut rng))).collect();
        let res = ks_two_sample(&a, &b, 0.001).unwrap();
        assert!(res.pass, "KS p = {}", res.p_value);
    }

    #[test]
    fn m_two_hidden_coordinates_are_uncorrelated() {
        let params = ClweParams::new(4, 0.1, 1.5).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let sub = HiddenSubspace::axis_aligned(4, 2).unwrap();
        let sampler = MHClweSampler::new(params, sub).unwrap();
        let n = 100_000;
        let mut cross = 0.0;
        let mut var0 = 0.0;
        let mut var1 = 0.0;
        for _ in 0..n {
            let y = sampler.sample(&mut rng);
            cross += y[0] * y[1];
            var0 += y[0] * y[0];
            var1 += y[1] * y[1];
        }
        let cross = cross / n as f64;
        let se = ((var0 / n as f64) * (var1 / n as f64) / n as f64).sqrt();
        assert!(cross.abs() < 4.0 * se, "cross-covariance {cross} vs se {se}");
    }

    #[test]
    fn null_z_uniform_and_isotropic() {
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let n = 100_000;
        let mut zs = Vec::with_capacity(n);
        let mut cross = 0.0;
        for _ in 0..n {
            let s = sample_null_clwe(2, &mut rng);
            zs.push(s.z);
            cross += s.y[0] * s.y[1];
        }
        let res = chi_square_uniform(&zs, 64, 0.001).unwrap();
        assert!(res.pass);
        let se = 1.0 / (2.0 * PI) / (n as f64).sqrt();
        assert!((cross / n as f64).abs() < 4.0 * se);
    }

    #[test]
    fn truncation_weights_match_restricted_gaussian() {
        let params = ClweParams::new(2, 0.1, 2.0).unwrap();
        let t = truncate_hclwe(&params, 2).unwrap();
        assert_eq!(t.weights.len(), 5);
        let s2: f64 = params.beta * params.beta + params.gamma * params.gamma;
        let raw: Vec<f64> = (-2..=2).map(|j| (-PI * (j * j) as f64 / s2).exp()).collect();
        let tot: f64 = raw.iter().sum();
        for (w, r) in t.weights.iter().zip(raw.iter()) {
            assert!((w - r / tot).abs() < 1e-15);
        }
        assert!((t.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // k = 0 degenerates to a single gaussian at 0
        let t0 = truncate_hclwe(&params, 0).unwrap();
        assert_eq!(t0.weights, vec![1.0]);
        assert_eq!(t0.means, vec![0.0]);
    }

    #[test]
    fn rotation_equivariance_of_hclwe() {
        // sampler applied with R^T w equals R^T applied to samples with w,
        // in distribution: two-sample KS on the hidden projection
        let params = ClweParams::new(3, 0.2, 1.5).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let w = HiddenDirection::random(3, &mut rng);
        let r = crate::reductions::random_rotation(3, DEFAULT_PREC, &mut rng);
        let rt = r.transpose();
        let rtw_coords: Vec<f64> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| rt.at(i, j).to_f64() * w.coords()[j])
                    .sum::<f64>()
            })
            .collect();
        let rtw = HiddenDirection::new(rtw_coords.clone()).unwrap();
        let s_direct = HClweSampler::new(params.clone(), rtw.clone()).unwrap();
        let s_orig = HClweSampler::new(params, w).unwrap();
        let n = 30_000;
        let a: Vec<f64> = (0..n).map(|_| rtw.dot(&s_direct.sample(&mut rng))).collect();
        let b: Vec<f64> = (0..n)
            .map(|_| {
                let mut rows = vec![s_orig.sample(&mut rng)];
                rotate_rows(&mut rows, &rt);
                rtw.dot(&rows[0])
            })
            .collect();
        let res = ks_two_sample(&a, &b, 0.001).unwrap();
        assert!(res.pass, "KS p = {}", res.p_value);
    }
}
