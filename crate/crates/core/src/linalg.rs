//! Small dense complex linear-algebra helpers on top of `nalgebra`.
//!
//! Every factorization of a Hermitian matrix goes through [`hermitian_part`]
//! first so that rounding drift in the upper/lower triangles never reaches
//! the Cholesky or eigen solvers.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub use nalgebra::Complex;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// `(X + X^H) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Real Frobenius pairing `Re Tr(A^H B)`.
pub fn real_inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

pub fn real_trace(m: &CMat) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

fn cholesky(m: &CMat, context: &'static str) -> Result<Cholesky<C64, nalgebra::Dyn>> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite(context));
    }
    let h = hermitian_part(m);
    // The complex square root never fails, so a nonpositive pivot shows up
    // as a diagonal entry of L that is not real and positive.
    let factor = Cholesky::new(h.clone()).filter(|c| {
        let l = c.l_dirty();
        (0..l.nrows()).all(|i| {
            let d = l[(i, i)];
            d.re > 0.0 && d.re.is_finite() && d.im.abs() <= 1e-8 * d.re
        })
    });
    match factor {
        Some(c) => Ok(c),
        None => {
            let eig = eigh(&h);
            Err(Error::NotPositiveDefinite {
                context,
                min_eig: eig.values.iter().cloned().fold(f64::INFINITY, f64::min),
                max_eig: eig.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            })
        }
    }
}

/// Natural log-determinant of a Hermitian positive definite matrix.
pub fn logdet_hpd(m: &CMat, context: &'static str) -> Result<f64> {
    let c = cholesky(m, context)?;
    let l = c.l_dirty();
    Ok(2.0 * (0..m.nrows()).map(|i| l[(i, i)].re.ln()).sum::<f64>())
}

/// Inverse of a Hermitian positive definite matrix, returned Hermitian.
pub fn inv_hpd(m: &CMat, context: &'static str) -> Result<CMat> {
    let c = cholesky(m, context)?;
    Ok(hermitian_part(&c.inverse()))
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted in
/// descending order.
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

pub fn eigh(m: &CMat) -> Eigh {
    let n = m.nrows();
    let se = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[j].total_cmp(&se.eigenvalues[i]));
    let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    Eigh { values, vectors }
}

/// `U diag(values) U^H`, returned Hermitian.
pub fn from_eigen(vectors: &CMat, values: &[f64]) -> CMat {
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        scaled.column_mut(j).scale_mut(v);
    }
    hermitian_part(&(scaled * vectors.adjoint()))
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    eigh(m).values.last().copied().unwrap_or(0.0)
}

/// `diag(X)` of a square complex matrix, real parts only.
pub fn real_diagonal(m: &CMat) -> DVector<f64> {
    DVector::from_iterator(m.nrows(), m.diagonal().iter().map(|z| z.re))
}

pub fn diag_from_real(d: &DVector<f64>) -> CMat {
    CMat::from_diagonal(&d.map(|x| C64::new(x, 0.0)))
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Largest absolute entry of `X - X^H` relative to the largest absolute entry of `X`.
pub fn hermitian_defect(m: &CMat) -> f64 {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale
}
