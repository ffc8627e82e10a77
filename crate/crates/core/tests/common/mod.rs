//! Helpers shared by the integration tests: nalgebra conversions and small
//! reference computations that do not go through the library's linear
//! algebra.

#![allow(dead_code)]

use mpb_lab::linalg::{CMatrix, C64};
use nalgebra::{Complex, DMatrix, DVector};

pub type NMat = DMatrix<Complex<f64>>;

pub fn to_na(m: &CMatrix) -> NMat {
    DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| {
        let z = m[(r, c)];
        Complex::new(z.re, z.im)
    })
}

pub fn from_na(m: &NMat) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| C64::new(m[(r, c)].re, m[(r, c)].im))
}

pub fn vec_na(v: &[C64]) -> DVector<Complex<f64>> {
    DVector::from_iterator(v.len(), v.iter().map(|z| Complex::new(z.re, z.im)))
}

/// Dense inverse by LU.
pub fn dense_inverse(m: &CMatrix) -> CMatrix {
    from_na(&to_na(m).try_inverse().expect("invertible"))
}

/// Generalized eigenvalues of `(a, b)` in descending order, by Cholesky
/// whitening and nalgebra's Hermitian eigensolver.
pub fn gevd_values(a: &CMatrix, b: &CMatrix) -> Vec<f64> {
    let chol = to_na(b).cholesky().expect("positive definite");
    let l = chol.l();
    let l_inv = l.clone().try_inverse().expect("triangular inverse");
    let c = &l_inv * to_na(a) * l_inv.adjoint();
    let c = (&c + c.adjoint()) * Complex::new(0.5, 0.0);
    let mut vals: Vec<f64> = c.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|x, y| y.total_cmp(x));
    vals
}

/// `‖A v − λ B v‖ / (‖A‖_F ‖v‖)`.
pub fn gevd_residual(a: &CMatrix, b: &CMatrix, lambda: f64, v: &[C64]) -> f64 {
    let (a, b, v) = (to_na(a), to_na(b), vec_na(v));
    let r = &a * &v - (&b * &v) * Complex::new(lambda, 0.0);
    r.norm() / (a.norm() * v.norm())
}

/// Periodic correlation `Σ_n a[n] b[(n + shift) mod N]` of ±1 sequences.
pub fn periodic_correlation(a: &[i8], b: &[i8], shift: usize) -> i32 {
    let n = a.len();
    (0..n).map(|i| i32::from(a[i]) * i32::from(b[(i + shift) % n])).sum()
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
