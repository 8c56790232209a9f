//! Brute-force enumeration oracles: shortest vector, closest vector, and
//! successive minima over integer-coefficient boxes. These are first-class
//! operations so acceptance checks can cite them directly.

use super::Lattice;
use crate::error::{Error, Result};
use crate::numerics::{Real, Vector};

/// Largest coefficient box the brute-force oracles will enumerate.
pub const BOX_LIMIT: f64 = 1e7;

fn box_size(n: usize, radius: i64) -> f64 {
    (2.0 * radius as f64 + 1.0).powi(n as i32)
}

/// Visits every coefficient vector in `[-radius, radius]^n`.
fn for_each_coeff(n: usize, radius: i64, mut f: impl FnMut(&[i64])) {
    let mut c = vec![-radius; n];
    loop {
        f(&c);
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            c[i] += 1;
            if c[i] <= radius {
                break;
            }
            c[i] = -radius;
            i += 1;
        }
    }
}

/// Returns a nonzero lattice vector of minimal norm among all integer
/// combinations with coefficients in `[-coeff_radius, coeff_radius]^n`.
pub fn shortest_vector_bruteforce(l: &Lattice, coeff_radius: i64) -> Result<Vector> {
    let n = l.dim();
    if n > 4 {
        return Err(Error::Parameter(
            "brute-force SVP supports dimension <= 4".into(),
        ));
    }
    if box_size(n, coeff_radius) > BOX_LIMIT {
        return Err(Error::BoxTooLarge(format!(
            "(2*{coeff_radius}+1)^{n} exceeds {BOX_LIMIT:e}"
        )));
    }
    let mut best: Option<(Real, Vector)> = None;
    for_each_coeff(n, coeff_radius, |c| {
        if c.iter().all(|&x| x == 0) {
            return;
        }
        let v = l.point(c);
        let ns = v.norm_sq();
        if best.as_ref().map_or(true, |(b, _)| ns < *b) {
            best = Some((ns, v));
        }
    });
    Ok(best.expect("nonempty box").1)
}

/// Returns the lattice vector closest to `target` among integer
/// combinations within `coeff_radius` of the rounded real solution of
/// `B c = target`.
pub fn closest_vector_bruteforce(
    l: &Lattice,
    target: &Vector,
    coeff_radius: i64,
) -> Result<Vector> {
    let n = l.dim();
    if n > 4 {
        return Err(Error::Parameter(
            "brute-force CVP supports dimension <= 4".into(),
        ));
    }
    if box_size(n, coeff_radius) > BOX_LIMIT {
        return Err(Error::BoxTooLarge(format!(
            "(2*{coeff_radius}+1)^{n} exceeds {BOX_LIMIT:e}"
        )));
    }
    // center the box at the rounded real-valued solution
    let real_coeffs = l.basis().solve(target)?;
    let center: Vec<i64> = real_coeffs
        .iter()
        .map(|x| x.round().to_f64() as i64)
        .collect();
    let mut best: Option<(Real, Vector)> = None;
    for_each_coeff(n, coeff_radius, |c| {
        let shifted: Vec<i64> = c.iter().zip(center.iter()).map(|(a, b)| a + b).collect();
        let v = l.point(&shifted);
        let ns = v.sub(target).norm_sq();
        if best.as_ref().map_or(true, |(b, _)| ns < *b) {
            best = Some((ns, v));
        }
    });
    Ok(best.expect("nonempty box").1)
}

/// Successive minima `lambda_1..lambda_n` by exhaustive enumeration:
/// shortest vectors are collected in order of norm, keeping each one that
/// is linearly independent of those already chosen.
pub fn successive_minima(l: &Lattice, coeff_radius: i64) -> Result<Vec<Real>> {
    let n = l.dim();
    if n > 4 {
        return Err(Error::Parameter(
            "successive minima supports dimension <= 4".into(),
        ));
    }
    if box_size(n, coeff_radius) > BOX_LIMIT {
        return Err(Error::BoxTooLarge(format!(
            "(2*{coeff_radius}+1)^{n} exceeds {BOX_LIMIT:e}"
        )));
    }
    let mut points: Vec<(Real, Vector)> = Vec::new();
    for_each_coeff(n, coeff_radius, |c| {
        if c.iter().all(|&x| x == 0) {
            return;
        }
        points.push((l.point(c).norm_sq(), l.point(c)));
    });
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let prec = l.prec();
    let mut chosen: Vec<Vector> = Vec::new();
    let mut minima = Vec::new();
    for (ns, v) in points {
        // Gram-Schmidt residual against chosen vectors decides independence
        let mut resid = v.clone();
        for u in &chosen {
            let m = resid.dot(u) / u.norm_sq();
            resid.axpy(&(-&m), u);
        }
        let dep_threshold = super::pow2(prec, -((prec / 2) as i64)) * (Real::one(prec) + &ns);
        if resid.norm_sq() > dep_threshold {
            minima.push(ns.sqrt());
            chosen.push(v);
            if chosen.len() == l.dim() {
                break;
            }
        }
    }
    if minima.len() < l.dim() {
        return Err(Error::BoxTooLarge(
            "coefficient box too small to reach all successive minima".into(),
        ));
    }
    Ok(minima)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{Matrix, DEFAULT_PREC};

    #[test]
    fn integers_shortest_is_unit() {
        for n in 1..=3 {
            let l = Lattice::integers(n, DEFAULT_PREC);
            let v = shortest_vector_bruteforce(&l, 2).unwrap();
            assert!((v.norm().to_f64() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn scaled_line_shortest() {
        let l = Lattice::scaled_integers(0.5, 1, DEFAULT_PREC).unwrap();
        let v = shortest_vector_bruteforce(&l, 3).unwrap();
        assert!((v.norm().to_f64() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn box_guard_trips() {
        let l = Lattice::integers(4, DEFAULT_PREC);
        assert!(shortest_vector_bruteforce(&l, 40).is_err());
    }

    #[test]
    fn cvp_on_integers() {
        let l = Lattice::integers(2, DEFAULT_PREC);
        let t = Vector::from_f64s(&[0.3, -0.4], DEFAULT_PREC);
        let v = closest_vector_bruteforce(&l, &t, 2).unwrap();
        assert!(v.norm().to_f64() < 1e-14, "closest point should be origin");
        let t2 = Vector::from_f64s(&[2.7, -1.2], DEFAULT_PREC);
        let v2 = closest_vector_bruteforce(&l, &t2, 2).unwrap();
        assert!((v2.get(0).to_f64() - 3.0).abs() < 1e-14);
        assert!((v2.get(1).to_f64() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn minima_of_stretched_lattice() {
        let b = Matrix::from_rows_f64(&[vec![1.0, 0.0], vec![0.0, 3.0]], DEFAULT_PREC);
        let l = Lattice::from_basis(b).unwrap();
        let m = successive_minima(&l, 4).unwrap();
        assert!((m[0].to_f64() - 1.0).abs() < 1e-14);
        assert!((m[1].to_f64() - 3.0).abs() < 1e-14);
    }
}
