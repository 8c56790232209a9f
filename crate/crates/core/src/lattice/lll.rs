//! LLL basis reduction at working precision with unimodular transform
//! tracking.

use crate::error::{Error, Result};
use crate::numerics::{Matrix, Real, Vector};
use rug::Integer;

/// Column-major integer matrix used for the LLL transform.
#[derive(Clone, Debug)]
pub struct IntMatrix {
    cols: Vec<Vec<Integer>>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let cols = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| if i == j { Integer::from(1) } else { Integer::new() })
                    .collect()
            })
            .collect();
        IntMatrix { cols }
    }

    pub fn n(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, j: usize) -> &[Integer] {
        &self.cols[j]
    }

    fn col_submul(&mut self, k: usize, j: usize, r: &Integer) {
        let src = self.cols[j].clone();
        for (a, b) in self.cols[k].iter_mut().zip(src.iter()) {
            *a -= (r * b).complete();
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.cols.swap(a, b);
    }

    pub fn to_matrix(&self, prec: u32) -> Matrix {
        let n = self.n();
        Matrix::from_fn(n, n, |i, j| Real::from_integer(&self.cols[j][i], prec))
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Integer {
        let n = self.n();
        let mut a: Vec<Vec<Integer>> = (0..n)
            .map(|i| (0..n).map(|j| self.cols[j][i].clone()).collect())
            .collect();
        let mut sign = 1i32;
        let mut prev = Integer::from(1);
        for k in 0..n {
            if a[k][k] == 0 {
                let Some(p) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                    return Integer::new();
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in (k + 1)..n {
                for j in (k + 1)..n {
                    let num = (&a[i][j] * &a[k][k]).complete() - (&a[i][k] * &a[k][j]).complete();
                    let (q, r) = num.div_rem(prev.clone());
                    debug_assert!(r == 0, "Bareiss division must be exact");
                    a[i][j] = q;
                }
            }
            prev = a[k][k].clone();
        }
        let mut d = a[n - 1][n - 1].clone();
        if sign < 0 {
            d = -d;
        }
        d
    }

    pub fn is_unimodular(&self) -> bool {
        let d = self.det();
        d == 1 || d == -1
    }
}

use rug::Complete;

/// LLL-reduces the columns of `basis` with Lovasz parameter `delta`,
/// returning the reduced basis and the unimodular transform `U` with
/// `reduced = basis * U`.
///
/// The reduced basis satisfies size reduction (`|mu_ij| <= 1/2`) and the
/// Lovasz condition; for `delta = 3/4` the first vector is within a
/// `2^((n-1)/2)` factor of the shortest lattice vector.
pub fn lll_reduce(basis: &Matrix, delta: f64) -> Result<(Matrix, IntMatrix)> {
    if !(0.25 < delta && delta < 1.0) {
        return Err(Error::Parameter(format!(
            "LLL delta must lie in (1/4, 1), got {delta}"
        )));
    }
    if basis.rows() != basis.cols() || basis.rows() == 0 {
        return Err(Error::Parameter("LLL expects a square basis".into()));
    }
    let n = basis.cols();
    let prec = basis.prec();
    let delta_r = Real::from_f64(delta, prec);
    let half = Real::from_f64(0.5, prec);

    let mut b: Vec<Vector> = (0..n).map(|j| basis.col(j)).collect();
    let mut u = IntMatrix::identity(n);

    // Gram-Schmidt state: mu[i][j] for j < i, squared norms bb[i]
    let mut mu: Vec<Vec<Real>> = vec![vec![Real::zero(prec); n]; n];
    let mut bb: Vec<Real> = vec![Real::zero(prec); n];
    let mut star: Vec<Vector> = Vec::with_capacity(n);
    compute_gs(&b, &mut mu, &mut bb, &mut star, prec)?;

    let mut k = 1usize;
    let mut swaps = 0u64;
    let swap_budget = 10_000 + 4_000 * (n as u64) * (n as u64);
    while k < n {
        // size-reduce column k against k-1 .. 0
        for j in (0..k).rev() {
            if mu[k][j].abs() > half {
                let r = mu[k][j].round();
                let ri = r.to_integer();
                let rr = Real::from_integer(&ri, prec);
                let col_j = b[j].clone();
                b[k].axpy(&(-&rr), &col_j);
                u.col_submul(k, j, &ri);
                for l in 0..j {
                    let upd = &rr * &mu[j][l];
                    let new = &mu[k][l] - upd;
                    mu[k][l] = new;
                }
                let new = &mu[k][j] - rr;
                mu[k][j] = new;
            }
        }
        let lhs = bb[k].clone();
        let rhs = (&delta_r - mu[k][k - 1].square()) * &bb[k - 1];
        if lhs >= rhs {
            k += 1;
        } else {
            swaps += 1;
            if swaps > swap_budget {
                return Err(Error::Precision(
                    "LLL swap budget exhausted; basis may be numerically degenerate".into(),
                ));
            }
            let m = mu[k][k - 1].clone();
            let b_new = &bb[k] + m.square() * &bb[k - 1];
            if b_new.is_zero() {
                return Err(Error::Precision(
                    "Gram-Schmidt norm collapse during LLL swap".into(),
                ));
            }
            let mu_new = &m * &bb[k - 1] / &b_new;
            let bk_new = &bb[k - 1] * &bb[k] / &b_new;
            bb[k] = bk_new;
            bb[k - 1] = b_new;
            b.swap(k - 1, k);
            u.swap_cols(k - 1, k);
            for j in 0..(k - 1) {
                let t = mu[k - 1][j].clone();
                mu[k - 1][j] = mu[k][j].clone();
                mu[k][j] = t;
            }
            for i in (k + 1)..n {
                let p = mu[i][k - 1].clone();
                let q = mu[i][k].clone();
                let new_ik = &p - &m * &q;
                mu[i][k - 1] = &q + &mu_new * &new_ik;
                mu[i][k] = new_ik;
            }
            mu[k][k - 1] = mu_new;
            k = k.max(2) - 1;
        }
    }

    // recompute the reduced basis exactly from the transform
    let ur = u.to_matrix(prec);
    let reduced = basis.mul(&ur);
    Ok((reduced, u))
}

fn compute_gs(
    b: &[Vector],
    mu: &mut [Vec<Real>],
    bb: &mut [Real],
    star: &mut Vec<Vector>,
    prec: u32,
) -> Result<()> {
    star.clear();
    for (i, bi) in b.iter().enumerate() {
        let mut s = bi.clone();
        for j in 0..i {
            let m = bi.dot(&star[j]) / &bb[j];
            s.axpy(&(-&m), &star[j]);
            mu[i][j] = m;
        }
        let ns = s.norm_sq();
        let scale = Real::one(prec) + bi.norm_sq();
        if ns <= super::pow2(prec, -((prec / 2) as i64)) * scale {
            return Err(Error::Singular(format!(
                "rank deficiency at column {i} (Gram-Schmidt norm collapse)"
            )));
        }
        bb[i] = ns;
        star.push(s);
    }
    Ok(())
}
