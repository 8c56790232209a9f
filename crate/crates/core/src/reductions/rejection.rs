//! Rejection sampling from CLWE to homogeneous CLWE.
//!
//! A CLWE sample `(y, z)` is accepted with probability `g(z) = g0(z)/M`
//! where `g0(z) = sum_k rho_delta(z + k)` and `M = g0(0)` (the supremum:
//! `g0` is symmetric and unimodal on the circle). Accepted `y`s follow the
//! homogeneous distribution with noise `sqrt(beta^2 + delta^2)`; the
//! expected acceptance rate is at least `delta/4`.

use crate::distributions::ClweSample;
use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug)]
pub struct RejectionConfig {
    /// Window width `delta` in (0,1).
    pub delta: f64,
    pub max_attempts_per_sample: u64,
}

impl RejectionConfig {
    pub fn new(delta: f64) -> Result<Self> {
        if !(0.0 < delta && delta < 1.0) {
            return Err(Error::Parameter(format!(
                "rejection window delta must lie in (0,1), got {delta}"
            )));
        }
        Ok(RejectionConfig {
            delta,
            max_attempts_per_sample: 10_000,
        })
    }
}

#[derive(Clone, Copy, Debug, Default, serde::Serialize)]
pub struct RejectionStats {
    pub attempts: u64,
    pub accepted: u64,
}

impl RejectionStats {
    pub fn rate(&self) -> f64 {
        if self.attempts == 0 {
            0.0
        } else {
            self.accepted as f64 / self.attempts as f64
        }
    }
}

/// `g0(z) = sum_{|k| <= 8} rho_delta(z + k)`; for `delta < 1` the omitted
/// tail is below 1e-15 of the sum.
fn g0(z: f64, delta: f64) -> f64 {
    let mut s = 0.0;
    for k in -8..=8 {
        let d = (z + k as f64) / delta;
        s += (-PI * d * d).exp();
    }
    s
}

/// Accepts samples from the source until `target_accepted` samples pass,
/// returning the accepted `y`s and the acceptance statistics.
///
/// Starvation beyond `max_attempts_per_sample` per accepted sample flags
/// parameter misuse instead of looping forever.
pub fn clwe_to_hclwe_rejection(
    mut source: impl FnMut(&mut ChaCha12Rng) -> ClweSample,
    cfg: &RejectionConfig,
    target_accepted: usize,
    rng: &mut ChaCha12Rng,
) -> Result<(Vec<Vec<f64>>, RejectionStats)> {
    let m = g0(0.0, cfg.delta);
    let mut out = Vec::with_capacity(target_accepted);
    let mut stats = RejectionStats::default();
    let budget = cfg
        .max_attempts_per_sample
        .saturating_mul(target_accepted as u64);
    while out.len() < target_accepted {
        if stats.attempts >= budget {
            return Err(Error::Starvation(format!(
                "rejection acceptance starved: {} accepted in {} attempts (delta = {})",
                stats.accepted, stats.attempts, cfg.delta
            )));
        }
        let s = source(rng);
        stats.attempts += 1;
        // z lives on the circle; fold to the nearest representative
        let z = s.z - s.z.round();
        let accept_p = g0(z, cfg.delta) / m;
        if rng.random::<f64>() < accept_p {
            stats.accepted += 1;
            out.push(s.y);
        }
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{
        sample_clwe, sample_null_clwe, ClweParams, HClweSampler, HiddenDirection,
    };
    use crate::harness::stats::{ks_two_sample, wilson_interval};
    use rand::SeedableRng;

    #[test]
    fn null_input_yields_standard_gaussian() {
        // acceptance is independent of y, so the null's y-marginal is
        // untouched; compare against fresh nulls
        let cfg = RejectionConfig::new(0.2).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        let (ys, _) =
            clwe_to_hclwe_rejection(|r| sample_null_clwe(2, r), &cfg, 20_000, &mut rng).unwrap();
        let a: Vec<f64> = ys.iter().map(|y| y[0]).collect();
        let b: Vec<f64> = (0..20_000)
            .map(|_| sample_null_clwe(2, &mut rng).y[0])
            .collect();
        assert!(ks_two_sample(&a, &b, 0.001).unwrap().pass);
    }

    #[test]
    fn output_matches_direct_target_sampler() {
        // beta = 0.1, delta = 0.1, gamma = 2, n = 2: accepted y's follow
        // the homogeneous distribution with beta' = sqrt(0.02)
        let params = ClweParams::new(2, 0.1, 2.0).unwrap();
        let cfg = RejectionConfig::new(0.1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let w = HiddenDirection::new(vec![0.6, 0.8]).unwrap();
        let wc = w.clone();
        let (ys, stats) = clwe_to_hclwe_rejection(
            move |r| sample_clwe(&params, &wc, r),
            &cfg,
            50_000,
            &mut rng,
        )
        .unwrap();
        let beta_out = (0.1f64 * 0.1 + 0.1 * 0.1).sqrt();
        let target = ClweParams::new(2, beta_out, 2.0).unwrap();
        let direct = HClweSampler::new(target, w.clone()).unwrap();
        let a: Vec<f64> = ys.iter().map(|y| w.dot(y)).collect();
        let b: Vec<f64> = (0..ys.len())
            .map(|_| w.dot(&direct.sample(&mut rng)))
            .collect();
        let res = ks_two_sample(&a, &b, 0.001).unwrap();
        assert!(res.pass, "hidden-axis KS p = {}", res.p_value);
        // acceptance rate >= delta/4 with 99% Wilson confidence
        let (lo, _) = wilson_interval(stats.accepted, stats.attempts, 2.576);
        assert!(lo >= 0.1 / 4.0, "acceptance lower bound {lo}");
    }

    #[test]
    fn starvation_reports() {
        // an absurd window on a tight budget
        let mut cfg = RejectionConfig::new(1e-4).unwrap();
        cfg.max_attempts_per_sample = 10;
        let mut rng = ChaCha12Rng::seed_from_u64(43);
        let r = clwe_to_hclwe_rejection(|r| sample_null_clwe(1, r), &cfg, 1000, &mut rng);
        assert!(matches!(r, Err(Error::Starvation(_))));
    }

    #[test]
    fn rejects_bad_delta() {
        assert!(RejectionConfig::new(0.0).is_err());
        assert!(RejectionConfig::new(1.0).is_err());
    }
}
