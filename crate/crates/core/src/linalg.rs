//! Dense complex linear algebra for small Hermitian problems.
//!
//! Everything here works on row-major [`CMatrix`] values and plain
//! `[Complex64]` vectors. The design envelope is arrays of up to 64
//! elements, so the eigen-solver is a cyclic complex Jacobi sweep: slow
//! asymptotically, but accurate to a few ulps on the matrices we care about
//! and free of external LAPACK dependencies.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Largest accepted condition number for the right-hand matrix of a
/// generalized eigenproblem.
pub const MAX_CONDITION: f64 = 1e12;

/// Relative tolerance on Hermitian symmetry for matrices entering the solvers.
pub const HERMITIAN_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension { context: "row-major buffer", expected: rows * cols, actual: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::Dimension { context: "column length", expected: rows, actual: bad.len() });
        }
        Ok(Self::from_fn(rows, cols, |r, c| columns[c][r]))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `x yᴴ`.
    pub fn outer(x: &[C64], y: &[C64]) -> Self {
        Self::from_fn(x.len(), y.len(), |r, c| x[r] * y[c].conj())
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn set_column(&mut self, c: usize, values: &[C64]) {
        for (r, &v) in values.iter().enumerate() {
            self[(r, c)] = v;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: C64, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    /// `self += alpha * x yᴴ`.
    pub fn rank_one_update(&mut self, alpha: C64, x: &[C64], y: &[C64]) {
        debug_assert_eq!(x.len(), self.rows);
        debug_assert_eq!(y.len(), self.cols);
        for (r, &xr) in x.iter().enumerate() {
            let ax = alpha * xr;
            let row = &mut self.data[r * self.cols..(r + 1) * self.cols];
            for (dst, yc) in row.iter_mut().zip(y) {
                *dst += ax * yc.conj();
            }
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows).map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `‖A − Aᴴ‖_F / ‖A‖_F` (zero for the zero matrix).
    pub fn hermitian_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                acc += (self[(r, c)] - self[(c, r)].conj()).norm_sqr();
            }
        }
        acc.sqrt() / norm
    }

    /// Replaces the matrix by `(A + Aᴴ) / 2`.
    pub fn symmetrize(&mut self) {
        let n = self.rows;
        for r in 0..n {
            self[(r, r)] = C64::new(self[(r, r)].re, 0.0);
            for c in r + 1..n {
                let avg = (self[(r, c)] + self[(c, r)].conj()) * 0.5;
                self[(r, c)] = avg;
                self[(c, r)] = avg.conj();
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Relative Frobenius distance `‖A − B‖ / ‖B‖`.
    pub fn relative_error(&self, reference: &Self) -> f64 {
        let denom = reference.frobenius_norm();
        let diff = self.sub(reference).frobenius_norm();
        if denom == 0.0 {
            diff
        } else {
            diff / denom
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

/// `xᴴ y`.
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn scaled(x: &[C64], s: C64) -> Vec<C64> {
    x.iter().map(|&z| z * s).collect()
}

pub fn normalized(x: &[C64]) -> Option<Vec<C64>> {
    let n = norm(x);
    (n > 0.0 && n.is_finite()).then(|| scaled(x, C64::new(1.0 / n, 0.0)))
}

pub fn is_finite_vec(x: &[C64]) -> bool {
    x.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Principal angle between the complex lines spanned by `x` and `y`, in
/// radians. Insensitive to scaling and global phase.
pub fn angle_between(x: &[C64], y: &[C64]) -> f64 {
    let nx = norm(x);
    let ny = norm(y);
    if nx == 0.0 || ny == 0.0 {
        return std::f64::consts::FRAC_PI_2;
    }
    let proj = dot(x, y) / (nx * nx);
    // acos loses precision near 1; take the sine from the orthogonal residual.
    let sin = x.iter().zip(y).map(|(a, b)| (b - a * proj).norm_sqr()).sum::<f64>().sqrt() / ny;
    let cos = dot(x, y).norm() / (nx * ny);
    sin.atan2(cos)
}

/// Rotates `v` so that its first component with non-negligible magnitude is
/// real and positive.
pub fn fix_phase(v: &mut [C64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    if let Some(pivot) = v.iter().find(|z| z.norm() > 1e-12 * max) {
        let rot = pivot.conj() / pivot.norm();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}

fn check_square(m: &CMatrix, context: &'static str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Dimension { context, expected: m.nrows(), actual: m.ncols() });
    }
    Ok(())
}

fn check_hermitian(m: &CMatrix, name: &str) -> Result<()> {
    if !m.is_finite() {
        return Err(Error::argument(format!("{name} has non-finite entries")));
    }
    let err = m.hermitian_error();
    if err > HERMITIAN_TOL {
        return Err(Error::argument(format!("{name} is not Hermitian (relative asymmetry {err:e})")));
    }
    Ok(())
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// Returns eigenvalues in descending order with the unitary matrix whose
/// column `i` is the eigenvector paired with eigenvalue `i`.
pub fn hermitian_eig(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    check_square(m, "hermitian_eig square matrix")?;
    check_hermitian(m, "matrix")?;
    let n = m.nrows();
    let mut a = m.clone();
    a.symmetrize();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm();

    if scale > 0.0 {
        for _ in 0..JACOBI_MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
                .map(|(r, c)| a[(r, c)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

/// One complex Jacobi rotation annihilating `a[(p, q)]`; accumulates into `v`.
fn jacobi_rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Phase that makes the (p, q) entry real, then a real symmetric rotation.
    let phase = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 { 1.0 / (tau + (1.0 + tau * tau).sqrt()) } else { -1.0 / (-tau + (1.0 + tau * tau).sqrt()) };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let n = a.nrows();
    let pc = phase.conj();

    // Columns: G = [[c, s], [-s e^{-jφ}, c e^{-jφ}]] applied on the right.
    for r in 0..n {
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        a[(r, p)] = arp * c - arq * pc * s;
        a[(r, q)] = arp * s + arq * pc * c;
    }
    // Rows: Gᴴ applied on the left.
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp * c - vrq * pc * s;
        v[(r, q)] = vrp * s + vrq * pc * c;
    }
}

/// Cholesky factor `L` (lower triangular, real positive diagonal) with
/// `m = L Lᴴ`.
pub fn cholesky(m: &CMatrix) -> Result<CMatrix> {
    check_square(m, "cholesky square matrix")?;
    let n = m.nrows();
    let mut l = CMatrix::zeros(n, n);
    let largest = (0..n).map(|i| m[(i, i)].re).fold(0.0, f64::max);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Singular { eigenvalue: d, largest });
        }
        let djj = d.sqrt();
        l[(j, j)] = C64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Solves `L x = b` for lower-triangular `L`.
fn forward_substitute(l: &CMatrix, b: &[C64]) -> Vec<C64> {
    let n = l.nrows();
    let mut x = vec![ZERO; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Solves `Lᴴ x = b` for lower-triangular `L`.
fn backward_substitute_adjoint(l: &CMatrix, b: &[C64]) -> Vec<C64> {
    let n = l.nrows();
    let mut x = vec![ZERO; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[(k, i)].conj() * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Solves `m x = b` for Hermitian positive definite `m`.
pub fn solve_hpd(m: &CMatrix, b: &[C64]) -> Result<Vec<C64>> {
    if b.len() != m.nrows() {
        return Err(Error::Dimension { context: "right-hand side", expected: m.nrows(), actual: b.len() });
    }
    let l = cholesky(m)?;
    Ok(backward_substitute_adjoint(&l, &forward_substitute(&l, b)))
}

/// Inverse of a Hermitian positive definite matrix via Cholesky.
pub fn inverse_hpd(m: &CMatrix) -> Result<CMatrix> {
    let l = cholesky(m)?;
    let n = m.nrows();
    let mut inv = CMatrix::zeros(n, n);
    let mut e = vec![ZERO; n];
    for c in 0..n {
        e.fill(ZERO);
        e[c] = ONE;
        let col = backward_substitute_adjoint(&l, &forward_substitute(&l, &e));
        inv.set_column(c, &col);
    }
    inv.symmetrize();
    Ok(inv)
}

/// Solution of the Hermitian-definite pencil `A v = λ B v`.
#[derive(Debug, Clone)]
pub struct GevdResult {
    /// Generalized eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Column `i` pairs with `eigenvalues[i]`; columns are B-orthonormal.
    pub eigenvectors: CMatrix,
}

impl GevdResult {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn eigenvector(&self, i: usize) -> Vec<C64> {
        self.eigenvectors.column(i)
    }

    /// Eigenvector of the largest eigenvalue.
    pub fn dominant(&self) -> Vec<C64> {
        self.eigenvector(0)
    }
}

/// Generalized eigen-decomposition of a Hermitian pencil with positive
/// definite `b`, by Cholesky whitening: `b = L Lᴴ`, then the ordinary
/// Hermitian problem for `L⁻¹ a L⁻ᴴ`.
///
/// Eigenvectors are B-orthonormal and carry the phase convention of
/// [`fix_phase`] (applied to the B-normalised vector, so the normalisation
/// survives).
pub fn hermitian_gevd(a: &CMatrix, b: &CMatrix) -> Result<GevdResult> {
    check_square(a, "gevd left matrix")?;
    check_square(b, "gevd right matrix")?;
    if a.nrows() != b.nrows() {
        return Err(Error::Dimension { context: "gevd pencil", expected: a.nrows(), actual: b.nrows() });
    }
    check_hermitian(a, "left matrix")?;
    check_hermitian(b, "right matrix")?;

    let (b_vals, _) = hermitian_eig(b)?;
    let largest = b_vals.first().copied().unwrap_or(0.0);
    let smallest = b_vals.last().copied().unwrap_or(0.0);
    if !(largest > 0.0) || smallest <= largest / MAX_CONDITION {
        return Err(Error::Singular { eigenvalue: smallest, largest });
    }

    let n = a.nrows();
    let l = cholesky(b)?;
    // W = L⁻¹ A, then C = L⁻¹ Wᴴ = L⁻¹ A L⁻ᴴ (A Hermitian).
    let mut w = CMatrix::zeros(n, n);
    for c in 0..n {
        w.set_column(c, &forward_substitute(&l, &a.column(c)));
    }
    let wh = w.adjoint();
    let mut whitened = CMatrix::zeros(n, n);
    for c in 0..n {
        whitened.set_column(c, &forward_substitute(&l, &wh.column(c)));
    }
    whitened.symmetrize();

    let (values, u) = hermitian_eig(&whitened)?;
    let mut vectors = CMatrix::zeros(n, n);
    for c in 0..n {
        let mut v = backward_substitute_adjoint(&l, &u.column(c));
        fix_phase(&mut v);
        vectors.set_column(c, &v);
    }
    Ok(GevdResult { eigenvalues: values, eigenvectors: vectors })
}

/// One exponentially-weighted rank-one step of the matrix inversion lemma.
///
/// With `p = R⁻¹`, returns the gain vector
/// `c = μ⁻¹ P x / (1 + μ⁻¹ xᴴ P x)` and `(μ R + x xᴴ)⁻¹ = μ⁻¹ (I − c xᴴ) P`.
/// The update is evaluated in the Hermitian form `μ⁻¹ (P − c (P x)ᴴ)`.
pub fn rank_one_inverse_update(p: &CMatrix, x: &[C64], mu: f64) -> Result<(Vec<C64>, CMatrix)> {
    if x.len() != p.nrows() || !p.is_square() {
        return Err(Error::Dimension { context: "inverse update vector", expected: p.nrows(), actual: x.len() });
    }
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::argument(format!("forgetting factor {mu} outside (0, 1]")));
    }
    if !is_finite_vec(x) || !p.is_finite() {
        return Err(Error::argument("non-finite entries in inverse update"));
    }
    let px = p.matvec(x);
    let quad = dot(x, &px).re;
    let denom = mu + quad;
    let gain = scaled(&px, C64::new(1.0 / denom, 0.0));
    let mut next = p.clone();
    next.rank_one_update(C64::new(-1.0, 0.0), &gain, &px);
    let next = next.scale_real(1.0 / mu);
    Ok((gain, next))
}

/// One power-iteration step: `P R_S w / ‖w‖`.
pub fn power_iteration_step(p: &CMatrix, r_s: &CMatrix, w: &[C64]) -> Result<Vec<C64>> {
    if w.len() != p.nrows() || w.len() != r_s.nrows() {
        return Err(Error::Dimension { context: "power iteration vector", expected: p.nrows(), actual: w.len() });
    }
    let unit = normalized(w).ok_or_else(|| Error::argument("power iteration on a zero vector"))?;
    Ok(p.matvec(&r_s.matvec(&unit)))
}
