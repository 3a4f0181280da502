//! Exponentially windowed second-order statistics, the Cholesky factor used
//! by the cone programs and the complex-to-real embedding.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::linalg::{symmetrize, CMatrix, CVector};
use crate::{Error, Result};

/// `R̂(i) = μ R̂(i−1) + (weight)·x xᴴ` and, for the CCM designs,
/// `d̂(i) = μ d̂(i−1) + x y*`.
#[derive(Debug, Clone)]
pub struct WindowedEstimates {
    pub r_hat: CMatrix,
    pub d_hat: CVector,
    pub mu: f64,
    pub count: usize,
}

impl WindowedEstimates {
    /// `R̂(0) = init·I`, `d̂(0) = 0`.
    pub fn new(m: usize, init: f64, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::Domain(format!("forgetting factor {mu} outside (0, 1)")));
        }
        Ok(Self {
            r_hat: CMatrix::identity(m, m) * Complex64::new(init, 0.0),
            d_hat: CVector::zeros(m),
            mu,
            count: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.r_hat.nrows()
    }

    /// `R̂ₓₓ(i) = μ R̂ₓₓ(i−1) + x xᴴ`.
    pub fn update_rxx(&mut self, x: &CVector) {
        self.rank_one(x, 1.0);
        self.count += 1;
    }

    /// `R̂ₐ(i) = μ R̂ₐ(i−1) + |y|² x xᴴ` and `d̂(i) = μ d̂(i−1) + x y*`, where
    /// `y = wᴴ(i−1) x(i)` is supplied by the caller.
    pub fn update_ra_d(&mut self, x: &CVector, y: Complex64) {
        self.rank_one(x, y.norm_sqr());
        let mu = Complex64::new(self.mu, 0.0);
        self.d_hat.axpy(y.conj(), x, mu);
        self.count += 1;
    }

    fn rank_one(&mut self, x: &CVector, weight: f64) {
        let mu = Complex64::new(self.mu, 0.0);
        self.r_hat.gerc(Complex64::new(weight, 0.0), x, x, mu);
        symmetrize(&mut self.r_hat);
    }
}

/// Upper-triangular `U` with `Uᴴ U = R`.
///
/// A failed factorisation is retried once with `1e−10·tr(R)/M` added to the
/// diagonal; a second failure is reported.
pub fn cholesky_upper(r: &CMatrix) -> Result<CMatrix> {
    let m = r.nrows();
    if m == 0 || r.ncols() != m {
        return Err(Error::Domain("Cholesky needs a nonempty square matrix".into()));
    }
    if let Some(u) = upper_factor(r) {
        return Ok(u);
    }
    let trace: f64 = (0..m).map(|i| r[(i, i)].re).sum();
    let jitter = 1e-10 * trace.abs() / m as f64;
    let mut loaded = r.clone();
    for i in 0..m {
        loaded[(i, i)] += Complex64::new(jitter, 0.0);
    }
    upper_factor(&loaded).ok_or_else(|| Error::Numerical("Cholesky pivot is not positive".into()))
}

/// `U` with `UᴴU = R`, reading only the upper triangle of `R`.
fn upper_factor(r: &CMatrix) -> Option<CMatrix> {
    let m = r.nrows();
    let mut u = CMatrix::zeros(m, m);
    for i in 0..m {
        let mut pivot = r[(i, i)].re;
        for k in 0..i {
            pivot -= u[(k, i)].norm_sqr();
        }
        if !(pivot > 0.0) || !pivot.is_finite() {
            return None;
        }
        let d = pivot.sqrt();
        u[(i, i)] = Complex64::new(d, 0.0);
        for j in i + 1..m {
            let mut v = r[(i, j)];
            for k in 0..i {
                v -= u[(k, i)].conj() * u[(k, j)];
            }
            u[(i, j)] = v / d;
        }
    }
    Some(u)
}

/// `[Re w; Im w]`.
pub fn realify(w: &CVector) -> DVector<f64> {
    let m = w.len();
    DVector::from_fn(2 * m, |k, _| if k < m { w[k].re } else { w[k - m].im })
}

/// Inverse of [`realify`].
pub fn complexify(v: &[f64]) -> CVector {
    let m = v.len() / 2;
    CVector::from_fn(m, |k, _| Complex64::new(v[k], v[k + m]))
}

/// Real-valued form of a complex factor and vectors:
/// `R̆ = [Re R, −Im R; Im R, Re R]`, `d̆ = [Re d; Im d]`, `ă = [Re a; Im a]`
/// and `ā = [Im a; −Re a]`, so that `w̆ᵀă = Re{wᴴa}` and `w̆ᵀā = Im{wᴴa}`.
#[derive(Debug, Clone)]
pub struct RealEmbedding {
    pub r_acr: DMatrix<f64>,
    pub d_r: DVector<f64>,
    pub a_breve: DVector<f64>,
    pub a_bar: DVector<f64>,
}

pub fn embed_real(r_ac: &CMatrix, d: &CVector, a: &CVector) -> Result<RealEmbedding> {
    let m = a.len();
    if r_ac.nrows() != m || r_ac.ncols() != m || d.len() != m {
        return Err(Error::Domain("embedding dimensions disagree".into()));
    }
    let r_acr = DMatrix::from_fn(2 * m, 2 * m, |i, j| {
        let c = r_ac[(i % m, j % m)];
        match (i < m, j < m) {
            (true, true) | (false, false) => c.re,
            (true, false) => -c.im,
            (false, true) => c.im,
        }
    });
    let a_bar = DVector::from_fn(2 * m, |k, _| if k < m { a[k].im } else { -a[k - m].re });
    Ok(RealEmbedding {
        r_acr,
        d_r: realify(d),
        a_breve: realify(a),
        a_bar,
    })
}
