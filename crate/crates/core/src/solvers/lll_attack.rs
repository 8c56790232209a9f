//! LLL-based solver for noiseless CLWE.
//!
//! Each equation is harvested from `n+1` samples: the columns `y_i` are
//! stacked with a final row `(0,...,0,delta)`, `delta = 2^(-3n^2)`, and
//! LLL-reduced. The shortest reduced column is an integer combination
//! `y = sum c_i y_i` short enough that `gamma*<y,w> = z` holds over the
//! reals (no mod-1 wrap), with `z` the centered representative of
//! `sum c_i z_i`. After `n` independent equations, a linear solve at
//! working precision recovers the hidden direction.

use crate::distributions::PreciseClweSample;
use crate::error::{Error, Result};
use crate::lattice::lll_reduce;
use crate::numerics::{Matrix, Real, Vector};

/// Outcome of a noiseless solve.
#[derive(Clone, Debug)]
pub struct NoiselessSolveReport {
    /// Recovered unit direction (sign is not identifiable).
    pub recovered_direction: Vec<f64>,
    /// The harvested equations `(y, z)` with `gamma*<y,w> = z`.
    pub equations_used: Vec<(Vec<f64>, f64)>,
    /// `max_i |gamma*<y_i, w_hat> - z_i|` over the used equations.
    pub residual: f64,
    /// Equation-harvest attempts consumed (including rejected ones).
    pub trials: usize,
    /// Norm of the pre-normalization solution; success requires it to be
    /// within 1e-6 of 1.
    pub norm_error: f64,
    pub success: bool,
}

/// Per-coordinate recovery tolerance (far below the layer spacing `1/gamma`
/// at desk scale).
pub const RECOVERY_TOL: f64 = 1e-6;

/// Solves a noiseless CLWE instance from solver-fidelity samples.
///
/// `samples` must hold at least `n*(n+1)` entries (more are consumed if
/// an equation harvest is rejected by its validity guards). `prec` should
/// be `solver_precision(n)`.
pub fn solve_noiseless_clwe(
    samples: &[PreciseClweSample],
    gamma: f64,
    n: usize,
    prec: u32,
) -> Result<NoiselessSolveReport> {
    if n == 0 || n > 10 {
        return Err(Error::Parameter("solver supports 1 <= n <= 10".into()));
    }
    if samples.len() < n * (n + 1) {
        return Err(Error::Parameter(format!(
            "need at least n*(n+1) = {} samples, got {}",
            n * (n + 1),
            samples.len()
        )));
    }
    let gamma_r = Real::from_f64(gamma, prec);
    let delta = crate::lattice::pow2(prec, -3 * (n as i64) * (n as i64));
    let norm_bound = (n as f64).sqrt() * 2f64.powf(-((n as f64) - 1.0) / 2.0);

    let mut equations: Vec<(Vector, Real)> = Vec::with_capacity(n);
    let mut eq_dump: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n);
    let mut group = 0usize;
    let mut trials = 0usize;
    let max_groups = samples.len() / (n + 1);
    while equations.len() < n {
        if group >= max_groups {
            return Err(Error::Parameter(format!(
                "sample budget exhausted after {trials} harvest attempts \
                 ({} equations found)",
                equations.len()
            )));
        }
        let chunk = &samples[group * (n + 1)..(group + 1) * (n + 1)];
        group += 1;
        trials += 1;
        let (y, z) = match harvest_equation(chunk, n, prec, &delta, norm_bound, gamma)? {
            Some(eq) => eq,
            None => continue,
        };
        // reject equations that would make the system singular
        let mut trial_rows = equations.clone();
        trial_rows.push((y.clone(), z.clone()));
        if system_is_singular(&trial_rows, n, prec) {
            continue;
        }
        eq_dump.push((y.to_f64s(), z.to_f64()));
        equations.push((y, z));
    }

    // solve gamma * Y w = z
    let y_mat = Matrix::from_fn(n, n, |i, j| equations[i].0.get(j).clone());
    let z_vec = Vector::from_reals(
        equations
            .iter()
            .map(|(_, z)| z / &gamma_r)
            .collect::<Vec<_>>(),
    );
    let w = y_mat.solve(&z_vec)?;
    let norm = w.norm();
    let norm_error = (norm.to_f64() - 1.0).abs();
    let w_hat = w.scaled(&norm.recip());

    let mut residual = 0.0f64;
    for (y, z) in &equations {
        let r = (&gamma_r * y.dot(&w_hat) - z).abs().to_f64();
        residual = residual.max(r);
    }
    // residual is measured against the unnormalized solution's equations;
    // with the normalized direction it only makes sense when the norm is 1
    let success = norm_error <= RECOVERY_TOL && residual <= RECOVERY_TOL;
    Ok(NoiselessSolveReport {
        recovered_direction: w_hat.to_f64s(),
        equations_used: eq_dump,
        residual,
        trials,
        norm_error,
        success,
    })
}

fn harvest_equation(
    chunk: &[PreciseClweSample],
    n: usize,
    prec: u32,
    delta: &Real,
    norm_bound: f64,
    gamma: f64,
) -> Result<Option<(Vector, Real)>> {
    // stack the n+1 sample vectors as columns with the delta row appended
    let m = n + 1;
    let basis = Matrix::from_fn(m, m, |i, j| {
        if i < n {
            chunk[j].y.get(i).with_prec(prec)
        } else if j == m - 1 {
            delta.clone()
        } else {
            Real::zero(prec)
        }
    });
    let (reduced, transform) = match lll_reduce(&basis, 0.75) {
        Ok(r) => r,
        Err(Error::Singular(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let b1 = reduced.col(0);
    // the combination y = sum c_i y_i is the first n coordinates of b1
    let y = Vector::from_reals((0..n).map(|i| b1.get(i).clone()).collect());
    let y_norm = y.norm().to_f64();
    if y_norm > norm_bound {
        return Err(Error::Precision(format!(
            "short vector misses the Minkowski/LLL bound: {y_norm:.3e} > {norm_bound:.3e}"
        )));
    }
    // validity guard: |gamma <y,w>| <= gamma*||y|| must stay below 1/2,
    // otherwise the centered representative may wrap
    if gamma * y_norm >= 0.5 {
        return Ok(None);
    }
    // degenerate combination (probability zero, but guard anyway)
    if y_norm == 0.0 {
        return Ok(None);
    }
    let coeffs = transform.col(0);
    let mut z = Real::zero(prec);
    for (c, s) in coeffs.iter().zip(chunk.iter()) {
        z += &(Real::from_integer(c, prec) * &s.z);
    }
    Ok(Some((y, z.centered_mod_one())))
}

fn system_is_singular(rows: &[(Vector, Real)], n: usize, prec: u32) -> bool {
    // Gram-Schmidt rank check on the harvested y rows
    let mut basis: Vec<Vector> = Vec::new();
    for (y, _) in rows {
        let mut resid = y.clone();
        for b in &basis {
            let c = resid.dot(b) / b.norm_sq();
            resid.axpy(&(-&c), b);
        }
        let rel = resid.norm_sq().to_f64() / y.norm_sq().to_f64().max(1e-300);
        if rel < 1e-24 {
            return true;
        }
        basis.push(resid);
        if basis.len() == n {
            break;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{sample_clwe_precise, ClweParams, HiddenDirection};
    use crate::numerics::solver_precision;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn planted_batch(
        n: usize,
        gamma: f64,
        w: &HiddenDirection,
        count: usize,
        seed: u64,
    ) -> Vec<PreciseClweSample> {
        let params = ClweParams::new(n, 0.0, gamma).unwrap();
        let prec = solver_precision(n);
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| sample_clwe_precise(&params, w, prec, &mut rng))
            .collect()
    }

    #[test]
    fn recovers_planted_direction_n2() {
        let w = HiddenDirection::new(vec![0.6, 0.8]).unwrap();
        let samples = planted_batch(2, 4.0, &w, 30, 70);
        let report = solve_noiseless_clwe(&samples, 4.0, 2, solver_precision(2)).unwrap();
        assert!(report.success, "norm_error = {}", report.norm_error);
        let aligned = align_sign(&report.recovered_direction, w.coords());
        for (a, b) in aligned.iter().zip(w.coords()) {
            assert!((a - b).abs() <= RECOVERY_TOL, "{a} vs {b}");
        }
    }

    #[test]
    fn duplicate_samples_raise_budget_error() {
        // identical samples in every group: every harvested equation is
        // parallel, so the system never completes
        let w = HiddenDirection::new(vec![1.0, 0.0]).unwrap();
        let mut samples = planted_batch(2, 4.0, &w, 3, 71);
        let first = samples[0].clone();
        samples = vec![first.clone(), first.clone(), first.clone()];
        for _ in 0..4 {
            samples.extend(samples.clone());
        }
        let r = solve_noiseless_clwe(&samples[..30], 4.0, 2, solver_precision(2));
        assert!(r.is_err());
    }

    pub(super) fn align_sign(got: &[f64], want: &[f64]) -> Vec<f64> {
        let dot: f64 = got.iter().zip(want).map(|(a, b)| a * b).sum();
        if dot < 0.0 {
            got.iter().map(|x| -x).collect()
        } else {
            got.to_vec()
        }
    }

    #[test]
    fn residual_states_integer_relation() {
        let w = HiddenDirection::new(vec![0.28, -0.96]).unwrap();
        let samples = planted_batch(2, 3.0, &w, 30, 72);
        let report = solve_noiseless_clwe(&samples, 3.0, 2, solver_precision(2)).unwrap();
        assert!(report.success);
        // every harvested equation satisfies gamma<y,w> - z in an integer
        // neighborhood within 1e-6
        for (y, z) in &report.equations_used {
            let ip: f64 = y
                .iter()
                .zip(report.recovered_direction.iter())
                .map(|(a, b)| a * b)
                .sum();
            let resid = 3.0 * ip - z;
            assert!((resid - resid.round()).abs() < 1e-6);
        }
    }
}
