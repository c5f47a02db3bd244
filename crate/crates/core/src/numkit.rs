//! Dense complex linear algebra shared by every other module.
//!
//! [`ComplexMatrix`] is a thin owned wrapper around a `faer` matrix. All
//! propagators go through the Hermitian eigendecomposition
//! `U(t) = V exp(-i Λ t) V†`, so one decomposition serves a whole time grid
//! (see [`Propagator`]).

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest dense dimension accepted by [`herm_eig`].
pub const MAX_DENSE_DIM: usize = 4096;

/// Relative Hermiticity tolerance: `‖H − H†‖_max ≤ HERMITICITY_TOL · ‖H‖_max`.
pub const HERMITICITY_TOL: f64 = 1e-9;

pub type C64 = Complex64;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    Complex64::new(re, im)
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: Mat<C64>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
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
        Self { inner: Mat::zeros(rows, cols) }
    }

    pub fn identity(n: usize) -> Self {
        Self { inner: Mat::identity(n, n) }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self { inner: Mat::from_fn(rows, cols, f) }
    }

    /// Square diagonal matrix with real entries.
    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { c64(diag[i], 0.0) } else { C64::default() })
    }

    /// Build from row-major nested rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn adjoint(&self) -> Self {
        Self { inner: self.inner.adjoint().to_owned() }
    }

    pub fn transpose(&self) -> Self {
        Self { inner: self.inner.transpose().to_owned() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_fn(self.rows(), self.cols(), |i, j| self[(i, j)] * s)
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols(), rhs.rows(), "matmul shape mismatch");
        Self { inner: &self.inner * &rhs.inner }
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols(), v.len(), "mul_vec shape mismatch");
        let mut out = vec![C64::default(); self.rows()];
        for (j, &vj) in v.iter().enumerate() {
            if vj == C64::default() {
                continue;
            }
            let col = self.inner.col(j);
            for (o, x) in out.iter_mut().zip(col.iter()) {
                *o += *x * vj;
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows().min(self.cols())).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows().min(self.cols())).map(|i| self[(i, i)]).collect()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.cols() {
            for x in self.inner.col(j).iter() {
                m = m.max(x.norm());
            }
        }
        m
    }

    /// `‖self − other‖_max`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows(), self.cols()), (other.rows(), other.cols()));
        let mut m = 0.0f64;
        for j in 0..self.cols() {
            for i in 0..self.rows() {
                m = m.max((self[(i, j)] - other[(i, j)]).norm());
            }
        }
        m
    }

    /// `‖H − H†‖_max`; `f64::INFINITY` for non-square input.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut m = 0.0f64;
        for i in 0..n {
            for j in i..n {
                m = m.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        (0..self.cols()).all(|j| self.inner.col(j).iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        (0..self.cols()).all(|j| self.inner.col(j).iter().all(|z| z.im == 0.0))
    }

    /// Commutator `[A, B] = AB − BA`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// Expectation `⟨ψ|A|ψ⟩` for a (not necessarily normalized) vector.
    pub fn expectation(&self, psi: &[C64]) -> C64 {
        let a_psi = self.mul_vec(psi);
        psi.iter().zip(&a_psi).map(|(p, q)| p.conj() * q).sum()
    }

    /// `Tr(self · rhs)` without forming the product.
    pub fn trace_product(&self, rhs: &Self) -> C64 {
        assert_eq!(self.cols(), rhs.rows());
        assert_eq!(self.rows(), rhs.cols());
        let mut acc = C64::default();
        for i in 0..self.rows() {
            for k in 0..self.cols() {
                acc += self[(i, k)] * rhs[(k, i)];
            }
        }
        acc
    }

    pub(crate) fn from_faer(inner: Mat<C64>) -> Self {
        Self { inner }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.inner[(i, j)]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.inner[(i, j)]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { inner: &self.inner + &rhs.inner }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { inner: &self.inner - &rhs.inner }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Eigendecomposition `H = V Λ V†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns.
    pub eigenvectors: ComplexMatrix,
}

impl HermEigen {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V f(Λ) V†` for a scalar function applied to the spectrum.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let scaled = ComplexMatrix::from_fn(n, n, |i, j| v[(i, j)] * f(self.eigenvalues[j]));
        scaled.matmul(&v.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_fn(|x| c64(x, 0.0))
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        (0..self.dim()).map(|i| self.eigenvectors[(i, k)]).collect()
    }
}

/// Hermitian eigendecomposition with eigenvalues in ascending order.
///
/// Inputs within the Hermiticity tolerance are symmetrized to `(H + H†)/2`
/// first. Exactly real input takes the real-symmetric path.
pub fn herm_eig(h: &ComplexMatrix) -> Result<HermEigen> {
    if !h.is_square() {
        return Err(Error::NotSquare { rows: h.rows(), cols: h.cols() });
    }
    let n = h.rows();
    if n > MAX_DENSE_DIM {
        return Err(Error::TooLarge(format!("dense dimension {n} exceeds {MAX_DENSE_DIM}")));
    }
    if !h.is_finite() {
        return Err(Error::NonFinite("herm_eig input"));
    }
    let scale = h.max_abs();
    let deviation = h.hermiticity_error();
    let tolerance = HERMITICITY_TOL * scale;
    if deviation > tolerance {
        return Err(Error::NotHermitian { deviation, tolerance });
    }
    if n == 0 {
        return Ok(HermEigen { eigenvalues: vec![], eigenvectors: ComplexMatrix::zeros(0, 0) });
    }

    // faer loses accuracy on matrices with entries far from unit size, so the
    // input is brought to O(1) by a power of two and the spectrum scaled back
    let pow2 = if scale > 0.0 { 2f64.powi(-(scale.log2().round() as i32)) } else { 1.0 };
    let sym = |i: usize, j: usize| (h[(i, j)] + h[(j, i)].conj()) * (0.5 * pow2);
    let (mut eigenvalues, eigenvectors) = if h.is_real() {
        let a = Mat::<f64>::from_fn(n, n, |i, j| sym(i, j).re);
        let evd = a.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence)?;
        let vals: Vec<f64> = evd.S().column_vector().iter().copied().collect();
        let u = evd.U();
        (vals, ComplexMatrix::from_fn(n, n, |i, j| c64(u[(i, j)], 0.0)))
    } else {
        let a = Mat::<C64>::from_fn(n, n, sym);
        let evd = a.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence)?;
        let vals: Vec<f64> = evd.S().column_vector().iter().map(|z| z.re).collect();
        (vals, ComplexMatrix::from_faer(evd.U().to_owned()))
    };
    for e in eigenvalues.iter_mut() {
        *e /= pow2;
    }
    if eigenvalues.iter().any(|x| !x.is_finite()) || !eigenvectors.is_finite() {
        return Err(Error::NonFinite("herm_eig"));
    }
    Ok(HermEigen { eigenvalues, eigenvectors })
}

/// Cached spectral decomposition of a fixed Hamiltonian, evaluated at many times.
#[derive(Debug, Clone)]
pub struct Propagator {
    eigen: HermEigen,
}

impl Propagator {
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        Ok(Self { eigen: herm_eig(h)? })
    }

    pub fn from_eigen(eigen: HermEigen) -> Self {
        Self { eigen }
    }

    pub fn eigen(&self) -> &HermEigen {
        &self.eigen
    }

    pub fn dim(&self) -> usize {
        self.eigen.dim()
    }

    /// `exp(−iHt)`.
    pub fn at(&self, t: f64) -> ComplexMatrix {
        self.eigen.apply_fn(|e| C64::from_polar(1.0, -e * t))
    }

    /// Coordinates `V†ψ` of a state in the eigenbasis.
    pub fn spectral_coefficients(&self, psi: &[C64]) -> Vec<C64> {
        let v = &self.eigen.eigenvectors;
        let n = self.dim();
        assert_eq!(psi.len(), n);
        (0..n).map(|k| (0..n).map(|i| v[(i, k)].conj() * psi[i]).sum()).collect()
    }

    /// `exp(−iHt)ψ` given precomputed [`Self::spectral_coefficients`].
    pub fn state_at(&self, coeffs: &[C64], t: f64) -> Vec<C64> {
        let phased: Vec<C64> =
            coeffs.iter().zip(&self.eigen.eigenvalues).map(|(c, e)| c * C64::from_polar(1.0, -e * t)).collect();
        self.eigen.eigenvectors.mul_vec(&phased)
    }

    pub fn evolve(&self, psi: &[C64], t: f64) -> Vec<C64> {
        self.state_at(&self.spectral_coefficients(psi), t)
    }
}

/// `exp(−iHt)` through the eigendecomposition route.
pub fn unitary_evolution(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    Ok(Propagator::new(h)?.at(t))
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Which tensor factor survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    A,
    B,
}

/// Partial trace of an operator on `H_A ⊗ H_B` with `dims = (dA, dB)`.
pub fn partial_trace(rho: &ComplexMatrix, dims: (usize, usize), keep: Keep) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    if !rho.is_square() || rho.rows() != da * db {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, expected {}x{} for dims ({da},{db})",
            rho.rows(),
            rho.cols(),
            da * db,
            da * db
        )));
    }
    Ok(match keep {
        Keep::A => ComplexMatrix::from_fn(da, da, |i, j| (0..db).map(|k| rho[(i * db + k, j * db + k)]).sum()),
        Keep::B => ComplexMatrix::from_fn(db, db, |i, j| (0..da).map(|k| rho[(k * db + i, k * db + j)]).sum()),
    })
}
