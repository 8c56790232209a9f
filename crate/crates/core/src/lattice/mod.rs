//! Lattice data model and algorithms: duals, Gram-Schmidt data, LLL
//! reduction with transform tracking, Babai nearest-plane decoding,
//! brute-force SVP/CVP oracles, smoothing-parameter bounds, and discrete
//! Gaussian sampling over lattices and cosets.
//!
//! A [`Lattice`] is immutable after construction; the dual basis,
//! Gram-Schmidt orthogonalization, and determinant are computed eagerly.

mod babai;
mod enumerate;
mod lll;
pub mod sampler;
mod smoothing;

pub use babai::babai_nearest_plane;
pub use enumerate::{
    closest_vector_bruteforce, shortest_vector_bruteforce, successive_minima, BOX_LIMIT,
};
pub use lll::{lll_reduce, IntMatrix};
pub use sampler::{
    sample_discrete_gaussian, sample_z_shifted, DgMode, DiscreteGaussianSampler,
    DiscreteGaussianSpec,
};
pub use smoothing::{smooths_at, smoothing_bounds, SmoothingBounds};

use crate::error::{Error, Result};
use crate::numerics::{Matrix, Real, Vector};

/// Gram-Schmidt orthogonalization of a basis: orthogonal vectors `b*_i`,
/// their squared norms, and the coefficients `mu[i][j] = <b_i, b*_j> / ||b*_j||^2`.
#[derive(Clone, Debug)]
pub struct GramSchmidt {
    pub orth: Vec<Vector>,
    pub norm_sq: Vec<Real>,
    pub mu: Vec<Vec<Real>>,
}

impl GramSchmidt {
    /// Orthogonalizes the columns of `basis`.
    pub fn compute(basis: &Matrix) -> Result<Self> {
        let n = basis.cols();
        let prec = basis.prec();
        let mut orth: Vec<Vector> = Vec::with_capacity(n);
        let mut norm_sq: Vec<Real> = Vec::with_capacity(n);
        let mut mu: Vec<Vec<Real>> = vec![Vec::new(); n];
        for i in 0..n {
            let b = basis.col(i);
            let mut star = b.clone();
            let mut row = Vec::with_capacity(i);
            for j in 0..i {
                let m = b.dot(&orth[j]) / &norm_sq[j];
                star.axpy(&(-&m), &orth[j]);
                row.push(m);
            }
            let ns = star.norm_sq();
            // collapse of a Gram-Schmidt norm signals rank deficiency (or
            // exhausted precision on a nearly dependent basis)
            let scale = Real::one(prec) + b.norm_sq();
            let threshold = pow2(prec, -((prec / 2) as i64)) * scale;
            if ns <= threshold {
                return Err(Error::Singular(format!(
                    "Gram-Schmidt norm collapse at column {i}"
                )));
            }
            orth.push(star);
            norm_sq.push(ns);
            mu[i] = row;
        }
        Ok(GramSchmidt { orth, norm_sq, mu })
    }
}

/// 2^e at the given precision.
pub(crate) fn pow2(prec: u32, e: i64) -> Real {
    let two = Real::from_f64(2.0, prec);
    let half = Real::from_f64(0.5, prec);
    let mut r = Real::one(prec);
    if e >= 0 {
        for _ in 0..e {
            r *= &two;
        }
    } else {
        for _ in 0..-e {
            r *= &half;
        }
    }
    r
}

/// A full-rank lattice given by a basis matrix whose columns are the basis
/// vectors, with eagerly computed dual basis, Gram-Schmidt data, and
/// determinant.
#[derive(Clone, Debug)]
pub struct Lattice {
    basis: Matrix,
    dual_basis: Matrix,
    gs: GramSchmidt,
    det_abs: Real,
    lll_delta: Option<f64>,
}

impl Lattice {
    pub fn from_basis(basis: Matrix) -> Result<Self> {
        if basis.rows() != basis.cols() || basis.rows() == 0 {
            return Err(Error::Parameter(
                "lattice basis must be square and nonempty".into(),
            ));
        }
        let gs = GramSchmidt::compute(&basis)?;
        let dual_basis = basis.transpose().inverse()?;
        let det_abs = basis.det().abs();
        Ok(Lattice {
            basis,
            dual_basis,
            gs,
            det_abs,
            lll_delta: None,
        })
    }

    /// The integer lattice `Z^n`.
    pub fn integers(n: usize, prec: u32) -> Lattice {
        let mut l = Lattice::from_basis(Matrix::identity(n, prec)).expect("identity basis");
        l.lll_delta = Some(0.75);
        l
    }

    /// The scaled integer lattice `(c Z)^n`.
    pub fn scaled_integers(c: f64, n: usize, prec: u32) -> Result<Lattice> {
        if c == 0.0 {
            return Err(Error::Parameter("scale must be nonzero".into()));
        }
        let mut m = Matrix::zeros(n, n, prec);
        for i in 0..n {
            *m.at_mut(i, i) = Real::from_f64(c, prec);
        }
        Lattice::from_basis(m)
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn prec(&self) -> u32 {
        self.basis.prec()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn dual_basis(&self) -> &Matrix {
        &self.dual_basis
    }

    pub fn gs(&self) -> &GramSchmidt {
        &self.gs
    }

    pub fn det_abs(&self) -> &Real {
        &self.det_abs
    }

    /// Dual lattice, with basis `(B^T)^{-1}`.
    pub fn dual(&self) -> Result<Lattice> {
        Lattice::from_basis(self.dual_basis.clone())
    }

    /// The lattice point `B c`.
    pub fn point(&self, coeffs: &[i64]) -> Vector {
        assert_eq!(coeffs.len(), self.dim());
        let prec = self.prec();
        let mut v = Vector::zeros(self.dim(), prec);
        for (j, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                v.axpy(&Real::from_i64(c, prec), &self.basis.col(j));
            }
        }
        v
    }

    /// The scaled lattice `cL`.
    pub fn scale(&self, c: &Real) -> Result<Lattice> {
        let n = self.dim();
        let scaled = Matrix::from_fn(n, n, |i, j| self.basis.at(i, j) * c);
        Lattice::from_basis(scaled)
    }

    /// Whether this basis is known to be LLL-reduced, and with which delta.
    pub fn lll_delta(&self) -> Option<f64> {
        self.lll_delta
    }

    /// LLL-reduces the basis, returning the reduced lattice (flagged as
    /// reduced) and the unimodular transform with `reduced = basis * U`.
    pub fn lll(&self, delta: f64) -> Result<(Lattice, IntMatrix)> {
        let (reduced, transform) = lll_reduce(&self.basis, delta)?;
        let mut l = Lattice::from_basis(reduced)?;
        l.lll_delta = Some(delta);
        Ok((l, transform))
    }

    /// Serializes the basis as a JSON array of basis vectors, coordinates
    /// as decimal strings to preserve precision.
    pub fn to_json(&self) -> String {
        let vecs: Vec<Vec<String>> = (0..self.dim())
            .map(|j| {
                self.basis
                    .col(j)
                    .iter()
                    .map(|x| x.decimal())
                    .collect::<Vec<_>>()
            })
            .collect();
        serde_json::json!({ "basis": vecs }).to_string()
    }

    pub fn from_json(s: &str, prec: u32) -> Result<Lattice> {
        let v: serde_json::Value =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("lattice json: {e}")))?;
        let arr = v
            .get("basis")
            .and_then(|b| b.as_array())
            .ok_or_else(|| Error::Parse("lattice json: missing basis array".into()))?;
        let n = arr.len();
        let mut m = Matrix::zeros(n, n, prec);
        for (j, vecj) in arr.iter().enumerate() {
            let coords = vecj
                .as_array()
                .ok_or_else(|| Error::Parse("lattice json: basis vector not an array".into()))?;
            if coords.len() != n {
                return Err(Error::Parse("lattice json: not full rank / square".into()));
            }
            for (i, c) in coords.iter().enumerate() {
                let s = c
                    .as_str()
                    .ok_or_else(|| Error::Parse("lattice json: coordinate not a string".into()))?;
                *m.at_mut(i, j) = Real::parse(s, prec)?;
            }
        }
        Lattice::from_basis(m)
    }
}
