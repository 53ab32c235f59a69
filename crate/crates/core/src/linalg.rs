//! Dense complex matrices and the spectral routines the verification layer is built on.
//!
//! Everything here is deliberately small: row-major storage of `Complex64`, a cyclic
//! Jacobi eigensolver for Hermitian input, and a spectral norm that always goes through
//! the Gram matrix `A* A`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::polynomials::IntPolynomial;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Jacobi stops once every off-diagonal entry is below this fraction of `‖A‖_F`.
pub const JACOBI_OFF_DIAGONAL_TOL: f64 = 1e-13;
/// Hard cap on full Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Relative Hermitian tolerance; multiplied by `max(1, ‖A‖_F)`.
pub const HERM_TOL: f64 = 1e-10;
/// Tolerance for eigenpair residuals and unitarity of the eigenvector matrix.
pub const EIG_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: ‖A - A*‖_F = {residual:e} exceeds {tol:e}")]
    NotHermitian { residual: f64, tol: f64 },
    #[error("Jacobi failed to converge after {sweeps} sweeps (max off-diagonal {off_diagonal:e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
}

/// Dense complex matrix in row-major order.
///
/// Operators in this crate are square, but the off-diagonal block `V` of a
/// decomposition is rectangular, so the shape is `rows x cols`. Zero-sized
/// dimensions are allowed; they show up as empty blocks.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::zero(); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries. Panics if the length is wrong.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        Self { rows, cols, data }
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> Result<usize, LinalgError> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn check_finite(&self) -> Result<(), LinalgError> {
        match self.data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            None => Ok(()),
            Some(k) => Err(LinalgError::NonFinite {
                row: k / self.cols.max(1),
                col: k % self.cols.max(1),
            }),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
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

    /// Copies the `nrows x ncols` block starting at `(row0, col0)`.
    pub fn block(&self, row0: usize, col0: usize, nrows: usize, ncols: usize) -> Self {
        assert!(row0 + nrows <= self.rows && col0 + ncols <= self.cols, "block out of range");
        Self::from_fn(nrows, ncols, |i, j| self[(row0 + i, col0 + j)])
    }

    /// Writes `src` into `self` with its top-left corner at `(row0, col0)`.
    pub fn set_block(&mut self, row0: usize, col0: usize, src: &ComplexMatrix) {
        assert!(row0 + src.rows <= self.rows && col0 + src.cols <= self.cols, "block out of range");
        for i in 0..src.rows {
            for j in 0..src.cols {
                self[(row0 + i, col0 + j)] = src[(i, j)];
            }
        }
    }

    /// `‖A - A*‖_F`.
    pub fn hermitian_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Matrix product with a shape check.
    pub fn try_mul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(self.mismatch(rhs));
        }
        let (n, m, p) = (self.rows, self.cols, rhs.cols);
        let mut out = vec![C64::zero(); n * p];
        for i in 0..n {
            let row = &mut out[i * p..(i + 1) * p];
            for k in 0..m {
                let a = self.data[i * m + k];
                if a.is_zero() {
                    continue;
                }
                let rhs_row = &rhs.data[k * p..(k + 1) * p];
                for (o, b) in row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(ComplexMatrix::from_vec(n, p, out))
    }

    pub fn try_add(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(
        &self,
        rhs: &ComplexMatrix,
        f: impl Fn(C64, C64) -> C64,
    ) -> Result<ComplexMatrix, LinalgError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(self.mismatch(rhs));
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    fn mismatch(&self, rhs: &ComplexMatrix) -> LinalgError {
        LinalgError::DimensionMismatch {
            left_rows: self.rows,
            left_cols: self.cols,
            right_rows: rhs.rows,
            right_cols: rhs.cols,
        }
    }

    /// `A* A`, assembled from its upper triangle so the result is exactly Hermitian.
    pub fn gram(&self) -> ComplexMatrix {
        let (m, n) = (self.rows, self.cols);
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = C64::zero();
                for k in 0..m {
                    acc += self.data[k * n + i].conj() * self.data[k * n + j];
                }
                if i == j {
                    acc.im = 0.0;
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
        }
        out
    }

    /// `A^k` by repeated multiplication; `A^0 = I`.
    pub fn pow(&self, k: usize) -> Result<ComplexMatrix, LinalgError> {
        let n = self.dim()?;
        let mut acc = ComplexMatrix::identity(n);
        for _ in 0..k {
            acc = acc.try_mul(self)?;
        }
        Ok(acc)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// The operator impls panic on shape mismatch; use the `try_*` methods where
// shapes are not already guaranteed.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

/// Full eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Sorted in descending order.
    pub eigenvalues: Vec<f64>,
    /// Column `i` is the unit eigenvector for `eigenvalues[i]`.
    pub eigenvectors: ComplexMatrix,
    /// Number of Jacobi sweeps performed.
    pub sweeps: usize,
}

impl EigenDecomposition {
    /// `U diag(λ) U*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let u = &self.eigenvectors;
        let n = u.rows();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| u[(i, k)] * self.eigenvalues[k] * u[(j, k)].conj())
                .sum()
        })
    }
}

pub fn mat_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    a.try_mul(b)
}

pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Input must be Hermitian within `HERM_TOL * max(1, ‖A‖_F)`; the solver works on the
/// exactly Hermitian part `(A + A*)/2`. Output is deterministic for identical input.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<EigenDecomposition, LinalgError> {
    let n = a.dim()?;
    let fro = a.frobenius_norm();
    let herm_tol = HERM_TOL * fro.max(1.0);
    let residual = a.hermitian_residual();
    if !(residual <= herm_tol) {
        return Err(LinalgError::NotHermitian {
            residual,
            tol: herm_tol,
        });
    }

    let mut m = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(a[(i, i)].re, 0.0)
        } else {
            (a[(i, j)] + a[(j, i)].conj()) * 0.5
        }
    });
    let mut v = ComplexMatrix::identity(n);
    let stop = JACOBI_OFF_DIAGONAL_TOL * fro;
    let skip = 0.01 * stop;

    let mut sweeps = 0;
    loop {
        let off = max_off_diagonal(&m);
        if off <= stop {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(LinalgError::NoConvergence {
                sweeps,
                off_diagonal: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let abs = apq.norm();
                if abs <= skip {
                    continue;
                }
                rotate(&mut m, &mut v, p, q, apq, abs);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.total_cmp(&m[(i, i)].re));
    let eigenvalues = order.iter().map(|&k| m[(k, k)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
        sweeps,
    })
}

fn max_off_diagonal(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let mut off: f64 = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            off = off.max(m[(p, q)].norm());
        }
    }
    off
}

/// Applies `m <- U* m U`, `v <- v U` for the unitary `U` that annihilates `m[p][q]`.
///
/// `U = diag(1, conj(e)) R` on the `(p, q)` plane, where `e = apq / |apq|` strips the
/// phase of the pivot and `R = [[c, s], [-s, c]]` is the real Jacobi rotation.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, apq: C64, abs: f64) {
    let n = m.rows();
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let e = apq / abs;
    let theta = (aqq - app) / (2.0 * abs);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let ec = e.conj();
    // U = [[u00, u01], [u10, u11]]
    let u00 = C64::new(c, 0.0);
    let u01 = C64::new(s, 0.0);
    let u10 = -ec * s;
    let u11 = ec * c;

    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * u00 + akq * u10;
        m[(k, q)] = akp * u01 + akq * u11;
    }
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = u00.conj() * apk + u10.conj() * aqk;
        m[(q, k)] = u01.conj() * apk + u11.conj() * aqk;
    }
    m[(p, q)] = C64::zero();
    m[(q, p)] = C64::zero();
    m[(p, p)].im = 0.0;
    m[(q, q)].im = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u00 + vkq * u10;
        v[(k, q)] = vkp * u01 + vkq * u11;
    }
}

/// Operator 2-norm: the square root of the top eigenvalue of `A* A`.
///
/// Hermitian input takes the same route.
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64, LinalgError> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(0.0);
    }
    let eig = hermitian_eigen(&a.gram())?;
    Ok(eig.eigenvalues[0].max(0.0).sqrt())
}

/// `p(A) = Σ c_i A^i` by Horner's rule. The constant term contributes `c_0 I`.
pub fn mat_poly_eval(p: &IntPolynomial, a: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let n = a.dim()?;
    let coeffs = p.coefficients();
    let mut acc = ComplexMatrix::zeros(n, n);
    for c in coeffs.iter().rev() {
        acc = acc.try_mul(a)?;
        let c = c.to_f64().unwrap_or(f64::NAN);
        for i in 0..n {
            acc[(i, i)] += c;
        }
    }
    Ok(acc)
}
