//! Statistical test utilities: two-sample Kolmogorov-Smirnov, chi-square
//! goodness of fit, Wilson confidence intervals, and advantage estimation
//! for distinguishers.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Outcome of a statistical test at a configured significance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StatTestResult {
    pub name: String,
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
    pub significance: f64,
    pub pass: bool,
}

impl StatTestResult {
    fn new(name: &str, statistic: f64, p_value: f64, n: usize, significance: f64) -> Self {
        StatTestResult {
            name: name.into(),
            statistic,
            p_value,
            n,
            significance,
            pass: p_value > significance,
        }
    }
}

/// Survival function of the Kolmogorov distribution,
/// `Q(lambda) = 2 * sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sided two-sample Kolmogorov-Smirnov test with the asymptotic
/// p-value (Stephens' small-sample correction applied to the statistic).
pub fn ks_two_sample(a: &[f64], b: &[f64], significance: f64) -> Result<StatTestResult> {
    if a.len() < 100 || b.len() < 100 {
        return Err(Error::Parameter(
            "KS test needs at least 100 samples per side".into(),
        ));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).ok_or(()).expect("NaN in KS input"));
    ys.sort_by(|p, q| p.partial_cmp(q).ok_or(()).expect("NaN in KS input"));
    let (n1, n2) = (xs.len(), ys.len());
    let mut i = 0usize;
    let mut j = 0usize;
    let mut d: f64 = 0.0;
    while i < n1 && j < n2 {
        let x = xs[i];
        let y = ys[j];
        if x <= y {
            i += 1;
        }
        if y <= x {
            j += 1;
        }
        let f1 = i as f64 / n1 as f64;
        let f2 = j as f64 / n2 as f64;
        d = d.max((f1 - f2).abs());
    }
    let ne = (n1 as f64 * n2 as f64) / (n1 + n2) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    let p = kolmogorov_sf(lambda);
    Ok(StatTestResult::new(
        "ks_two_sample",
        d,
        p,
        n1.min(n2),
        significance,
    ))
}

/// Regularized lower incomplete gamma function `P(a, x)`.
fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        // series expansion
        let mut ap = a;
        let mut sum = 1.0 / a;
        let mut del = sum;
        for _ in 0..500 {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        sum * (-x + a * x.ln() - ln_gamma(a)).exp()
    } else {
        1.0 - gamma_q_cf(a, x)
    }
}

/// Regularized upper incomplete gamma by continued fraction (for x > a+1).
fn gamma_q_cf(a: f64, x: f64) -> f64 {
    let fpmin = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / fpmin;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < fpmin {
            d = fpmin;
        }
        c = b + an / c;
        if c.abs() < fpmin {
            c = fpmin;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    ((-x + a * x.ln() - ln_gamma(a)).exp() * h).clamp(0.0, 1.0)
}

/// Lanczos approximation of `ln Gamma`.
fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    let mut y = x;
    let tmp = x + 5.5;
    let tmp = tmp - (x + 0.5) * tmp.ln();
    let mut ser = 1.000000000190015;
    for c in COEF {
        y += 1.0;
        ser += c / y;
    }
    -tmp + (2.5066282746310005 * ser / x).ln()
}

/// Upper tail of the chi-square distribution with `k` degrees of freedom.
pub fn chi_square_sf(x: f64, k: usize) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    (1.0 - gamma_p(k as f64 / 2.0, x / 2.0)).clamp(0.0, 1.0)
}

/// Chi-square test of uniformity on `[0,1)` with equal-width bins.
pub fn chi_square_uniform(values: &[f64], bins: usize, significance: f64) -> Result<StatTestResult> {
    if bins < 2 {
        return Err(Error::Parameter("need at least 2 bins".into()));
    }
    if values.len() < 5 * bins {
        return Err(Error::Parameter(
            "chi-square needs >= 5 expected counts per bin".into(),
        ));
    }
    let mut counts = vec![0u64; bins];
    for &v in values {
        if !(0.0..1.0).contains(&v) {
            return Err(Error::Parameter(format!("value {v} outside [0,1)")));
        }
        let b = ((v * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let probs = vec![1.0 / bins as f64; bins];
    let mut res = chi_square_counts(&counts, &probs, significance)?;
    res.name = "chi_square_uniform".into();
    Ok(res)
}

/// Chi-square goodness of fit for observed counts against expected
/// probabilities. Bins with expected count below 5 are pooled into their
/// neighbor to keep the asymptotic distribution valid.
pub fn chi_square_counts(
    observed: &[u64],
    probs: &[f64],
    significance: f64,
) -> Result<StatTestResult> {
    if observed.len() != probs.len() || observed.len() < 2 {
        return Err(Error::Parameter("counts/probs shape mismatch".into()));
    }
    let n: u64 = observed.iter().sum();
    let nf = n as f64;
    // pool small-expectation bins left to right
    let mut pooled: Vec<(f64, f64)> = Vec::new(); // (observed, expected)
    let mut acc_o = 0.0;
    let mut acc_e = 0.0;
    for (o, p) in observed.iter().zip(probs.iter()) {
        acc_o += *o as f64;
        acc_e += p * nf;
        if acc_e >= 5.0 {
            pooled.push((acc_o, acc_e));
            acc_o = 0.0;
            acc_e = 0.0;
        }
    }
    if acc_e > 0.0 {
        if let Some(last) = pooled.last_mut() {
            last.0 += acc_o;
            last.1 += acc_e;
        } else {
            return Err(Error::Parameter("all bins below minimum expectation".into()));
        }
    }
    if pooled.len() < 2 {
        return Err(Error::Parameter("too few usable bins".into()));
    }
    let total_e: f64 = pooled.iter().map(|(_, e)| *e).sum();
    let stat: f64 = pooled
        .iter()
        .map(|(o, e)| {
            // renormalize expectations to the observed total
            let e = e * nf / total_e;
            (o - e) * (o - e) / e
        })
        .sum();
    let dof = pooled.len() - 1;
    let p = chi_square_sf(stat, dof);
    Ok(StatTestResult::new(
        "chi_square",
        stat,
        p,
        n as usize,
        significance,
    ))
}

/// 95%-style Wilson score interval for a binomial proportion at the given
/// normal quantile `z` (1.96 for 95%, 2.576 for 99%).
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Advantage estimate for a distinguisher run on labeled trials, with
/// Wilson intervals on both acceptance rates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdvantageReport {
    pub trials_pos: u64,
    pub trials_null: u64,
    pub yes_pos: u64,
    pub yes_null: u64,
    pub rate_pos: f64,
    pub rate_null: f64,
    pub advantage: f64,
    pub ci_pos: (f64, f64),
    pub ci_null: (f64, f64),
    /// Conservative interval on the advantage from the two Wilson bounds.
    pub ci_advantage: (f64, f64),
}

/// Runs a YES/NO distinguisher over `trials` fresh batches from each
/// source; the trial index is handed to the closures so they can derive
/// independent seeds.
pub fn estimate_advantage(
    mut on_positive: impl FnMut(u64) -> bool,
    mut on_null: impl FnMut(u64) -> bool,
    trials: u64,
) -> Result<AdvantageReport> {
    if trials < 20 {
        return Err(Error::Parameter("advantage estimation needs >= 20 trials".into()));
    }
    let mut yes_pos = 0u64;
    let mut yes_null = 0u64;
    for t in 0..trials {
        if on_positive(t) {
            yes_pos += 1;
        }
        if on_null(t) {
            yes_null += 1;
        }
    }
    let rate_pos = yes_pos as f64 / trials as f64;
    let rate_null = yes_null as f64 / trials as f64;
    let z = 1.959963984540054; // 95%
    let ci_pos = wilson_interval(yes_pos, trials, z);
    let ci_null = wilson_interval(yes_null, trials, z);
    let advantage = (rate_pos - rate_null).abs();
    let lo = (ci_pos.0 - ci_null.1).max(ci_null.0 - ci_pos.1).max(0.0);
    let hi = (ci_pos.1 - ci_null.0).max(ci_null.1 - ci_pos.0).min(1.0);
    Ok(AdvantageReport {
        trials_pos: trials,
        trials_null: trials,
        yes_pos,
        yes_null,
        rate_pos,
        rate_null,
        advantage,
        ci_pos,
        ci_null,
        ci_advantage: (lo, hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn kolmogorov_sf_reference_values() {
        // frozen from an independent implementation of the series
        for (lam, q) in [
            (0.3, 0.999990694198665),
            (0.5, 0.963945243664875),
            (1.0, 0.269999671677355),
            (1.36, 0.0494858767553779),
            (1.5, 0.0222179626165251),
            (2.0, 0.000670925255779695),
        ] {
            assert!(
                (kolmogorov_sf(lam) - q).abs() < 1e-12,
                "Q({lam}) = {} want {q}",
                kolmogorov_sf(lam)
            );
        }
    }

    #[test]
    fn chi_square_sf_reference_values() {
        // frozen quantiles of the chi-square upper tail
        for (x, k, sf) in [
            (70.0, 63, 0.25436730515272),
            (120.0, 63, 2.0106938816501e-05),
            (10.0, 3, 0.0185661354630433),
            (3.0, 5, 0.699985835878628),
            (63.0, 63, 0.47630238333813),
        ] {
            assert!(
                (chi_square_sf(x, k) - sf).abs() < 1e-10 * sf.max(1e-6),
                "sf({x},{k}) = {} want {sf}",
                chi_square_sf(x, k)
            );
        }
    }

    #[test]
    fn ks_identical_lists() {
        let a: Vec<f64> = (0..200).map(|i| i as f64).collect();
        let r = ks_two_sample(&a, &a, 0.001).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ks_calibration_on_null() {
        // two standard-Gaussian batches: pass at 0.001 in >= 99/100 reps
        let mut pass = 0;
        for seed in 0..100 {
            let mut rng = ChaCha12Rng::seed_from_u64(1000 + seed);
            let a: Vec<f64> = (0..10_000).map(|_| rng.sample(StandardNormal)).collect();
            let b: Vec<f64> = (0..10_000).map(|_| rng.sample(StandardNormal)).collect();
            if ks_two_sample(&a, &b, 0.001).unwrap().pass {
                pass += 1;
            }
        }
        assert!(pass >= 99, "null calibration: {pass}/100");
    }

    #[test]
    fn ks_detects_shift() {
        let mut rng = ChaCha12Rng::seed_from_u64(4242);
        let a: Vec<f64> = (0..10_000).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let b: Vec<f64> = (0..10_000)
            .map(|_| rng.sample::<f64, _>(StandardNormal) + 0.5)
            .collect();
        let r = ks_two_sample(&a, &b, 0.001).unwrap();
        assert!(!r.pass);
        assert!(r.p_value < 1e-6);
    }

    #[test]
    fn ks_rejects_undersized() {
        let a = vec![0.0; 50];
        assert!(ks_two_sample(&a, &a, 0.01).is_err());
    }

    #[test]
    fn chi_square_exact_uniform_grid() {
        let vals: Vec<f64> = (0..6400).map(|i| (i as f64 + 0.5) / 6400.0).collect();
        let r = chi_square_uniform(&vals, 64, 0.001).unwrap();
        assert!(r.pass);
        assert!(r.statistic < 1e-9);
    }

    #[test]
    fn chi_square_uniform_rng_calibration() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let vals: Vec<f64> = (0..100_000).map(|_| rng.random()).collect();
        let r = chi_square_uniform(&vals, 64, 0.001).unwrap();
        assert!(r.pass, "p = {}", r.p_value);
    }

    #[test]
    fn chi_square_detects_layered_z() {
        // z from a gamma = 0.2 noiseless CLWE is far from uniform
        use crate::distributions::{sample_clwe, ClweParams, HiddenDirection};
        let params = ClweParams::new(2, 0.0, 0.2).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let w = HiddenDirection::random(2, &mut rng);
        let zs: Vec<f64> = (0..100_000)
            .map(|_| sample_clwe(&params, &w, &mut rng).z)
            .collect();
        let r = chi_square_uniform(&zs, 64, 0.001).unwrap();
        assert!(!r.pass, "layering must be visible, p = {}", r.p_value);
    }

    #[test]
    fn wilson_interval_basics() {
        let (lo, hi) = wilson_interval(50, 100, 1.96);
        assert!(lo < 0.5 && 0.5 < hi);
        assert!(lo > 0.39 && hi < 0.61);
        let (lo0, _) = wilson_interval(0, 100, 1.96);
        assert_eq!(lo0, 0.0);
    }

    #[test]
    fn advantage_constant_distinguisher() {
        let rep = estimate_advantage(|_| true, |_| true, 50).unwrap();
        assert_eq!(rep.advantage, 0.0);
        assert!(rep.ci_advantage.0 <= 0.0 + 1e-12);
    }

    #[test]
    fn advantage_perfect_oracle() {
        let rep = estimate_advantage(|_| true, |_| false, 50).unwrap();
        assert_eq!(rep.advantage, 1.0);
        assert!(rep.ci_advantage.1 >= 0.999);
    }

    #[test]
    fn advantage_needs_enough_trials() {
        assert!(estimate_advantage(|_| true, |_| false, 5).is_err());
    }
}
