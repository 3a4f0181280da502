//! Small complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

/// `aᴴ b`.
pub fn inner(a: &CVector, b: &CVector) -> Complex64 {
    a.dotc(b)
}

/// Real part of `wᴴ R w` for Hermitian `R`.
pub fn quad_form(w: &CVector, r: &CMatrix) -> f64 {
    let rw = r * w;
    w.dotc(&rw).re
}

pub fn norm(v: &CVector) -> f64 {
    v.norm()
}

/// `v vᴴ`.
pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn identity(m: usize) -> CMatrix {
    CMatrix::identity(m, m)
}

/// Largest entrywise deviation from Hermitian symmetry.
pub fn hermitian_defect(r: &CMatrix) -> f64 {
    let n = r.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((r[(i, j)] - r[(j, i)].conj()).norm());
        }
    }
    worst
}

/// In-place `R ← (R + Rᴴ)/2`.
pub fn symmetrize(r: &mut CMatrix) {
    let n = r.nrows();
    for i in 0..n {
        r[(i, i)] = Complex64::new(r[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (r[(i, j)] + r[(j, i)].conj()) * 0.5;
            r[(i, j)] = avg;
            r[(j, i)] = avg.conj();
        }
    }
}

/// Solves `R x = b` for Hermitian positive-definite `R`.
pub fn solve_hpd(r: &CMatrix, b: &CVector) -> Result<CVector> {
    let chol = r
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numerical("matrix is not positive definite".into()))?;
    // the complex factorisation takes complex square roots of the pivots
    if chol.l_dirty().diagonal().iter().any(|d| !(d.re > 0.0) || d.im.abs() > 1e-12 * d.re) {
        return Err(Error::Numerical("matrix is not positive definite".into()));
    }
    Ok(chol.solve(b))
}

/// Solves a general square system by LU.
pub fn solve_lu(r: &CMatrix, b: &CVector) -> Result<CVector> {
    r.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Numerical("singular matrix".into()))
}
