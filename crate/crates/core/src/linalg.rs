//! Dense complex matrices and the hermitian eigensolver.
//!
//! Matrices are small (the whole crate works at n ≤ a few dozen), stored
//! row-major in a flat `Vec`. The eigensolver is a cyclic complex Jacobi
//! iteration.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Default tolerance for unitarity and spectral reconstruction checks.
pub const EPS_SPECTRAL: f64 = 1e-10;

/// Sweep cap for the Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&v| C64::new(v, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Builds a matrix from rows of equal length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let data = rows.iter().flatten().copied().collect();
        Self::new(rows.len(), cols, data)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| C64::new(v, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if self.cols != x.len() {
            return Err(Error::Dimension(format!(
                "cannot apply {}x{} matrix to a {}-vector",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    /// Largest entry modulus, `‖M‖_max`.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `x* M x` for an arbitrary square matrix.
    pub fn quadratic_form(&self, x: &[C64]) -> Result<C64> {
        let mx = self.mul_vec(x)?;
        Ok(x.iter().zip(&mx).map(|(a, b)| a.conj() * b).sum())
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    fn require_square(&self, what: &str) -> Result<()> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "{what} requires a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(())
    }

    /// Hermitian residual `‖M − M*‖_max`.
    pub fn hermitian_residual(&self) -> Result<f64> {
        self.require_square("hermiticity check")?;
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        Ok(worst)
    }

    pub fn is_hermitian(&self, tol: f64) -> Result<bool> {
        Ok(self.hermitian_residual()? <= tol)
    }

    /// Unitarity residual `‖M*M − I‖_max`.
    pub fn unitary_residual(&self) -> Result<f64> {
        self.require_square("unitarity check")?;
        let gram = self.adjoint().matmul(self)?;
        Ok(gram.sub(&Self::identity(self.rows))?.max_norm())
    }

    pub fn is_unitary(&self, tol: f64) -> Result<bool> {
        Ok(self.unitary_residual()? <= tol)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// `‖AB − BA‖_max`.
pub fn commutator_residual(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(Error::Dimension(format!(
            "commutator of {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(a.matmul(b)?.sub(&b.matmul(a)?)?.max_norm())
}

pub fn commute(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(commutator_residual(a, b)? <= tol)
}

/// `A = U Λ U*` with real eigenvalues in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
    pub sweeps: usize,
}

impl SpectralDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let u = &self.eigenvectors;
        let n = u.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            for i in 0..n {
                let ui = u[(i, k)] * lambda;
                for j in 0..n {
                    out[(i, j)] += ui * u[(j, k)].conj();
                }
            }
        }
        out
    }

    /// Applies `x ↦ Σ λ_i (x|U_i) U_i`.
    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        let u = &self.eigenvectors;
        if x.len() != u.rows() {
            return Err(Error::Dimension("vector length".into()));
        }
        let mut out = vec![ZERO; x.len()];
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let coeff: C64 = (0..x.len()).map(|i| u[(i, k)].conj() * x[i]).sum::<C64>() * lambda;
            for (i, o) in out.iter_mut().enumerate() {
                *o += coeff * u[(i, k)];
            }
        }
        Ok(out)
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Diagonalizes a hermitian matrix with cyclic complex Jacobi rotations.
///
/// Each rotation first removes the phase of the pivot `a_pq`, then applies
/// the real symmetric Jacobi rotation that annihilates it. Iteration stops
/// when the off-diagonal Frobenius mass drops below machine precision
/// relative to the whole matrix, or fails after [`MAX_SWEEPS`] sweeps.
pub fn spectral_decompose(a: &ComplexMatrix, tol: f64) -> Result<SpectralDecomposition> {
    let residual = a.hermitian_residual()?;
    if residual > tol {
        return Err(Error::Precondition(format!(
            "matrix is not hermitian (residual {residual:.3e} > {tol:.1e})"
        )));
    }
    let n = a.rows();
    // symmetrize exactly so rounding in the input cannot leak into the rotations
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let v = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();
    if !scale.is_finite() {
        return Err(Error::Numerical(format!("matrix norm is not finite ({scale})")));
    }

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&m);
        if !off.is_finite() {
            return Err(Error::Numerical("non-finite entries during Jacobi sweep".into()));
        }
        if off <= f64::EPSILON * scale * 0.5 || off == 0.0 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::Numerical(format!(
                "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps (off-diagonal {off:.3e})"
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    // stable: ties keep the original index order
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[(i, new_col)] = v[(i, old_col)];
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        sweeps,
    })
}

fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let modulus = apq.norm();
    if modulus == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let phase = apq / modulus;
    let theta = (aqq - app) / (2.0 * modulus);
    let t = if theta.is_infinite() {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = m.rows();

    // R = [[c, s], [-s·conj(e), c·conj(e)]] on the (p, q) plane; M ← R* M R, V ← V R.
    let pc = phase.conj();
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * c - mkq * pc * s;
        m[(k, q)] = mkp * s + mkq * pc * c;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * pc * s;
        v[(k, q)] = vkp * s + vkq * pc * c;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = mpk * c - mqk * phase * s;
        m[(q, k)] = mpk * s + mqk * phase * c;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
}
