//! Dense complex matrix algebra with the normalized trace, plus the spectral
//! machinery (ordered Schur form, Riesz projectors, principal logarithm, polar
//! decomposition) used by the invariant computations.
//!
//! Matrices are square, row-major and immutable in spirit: every operation
//! returns a fresh value. The normalized trace `tr/dim` plays the role of the
//! tracial state, so the identity always has trace one.

mod decomp;
mod functions;

pub use decomp::{HermitianEigen, LuFactors, SchurForm};

use num_complex::Complex64;
use thiserror::Error;

/// Spectral gap threshold below which half-plane projections are refused.
pub const SPECTRAL_GAP_MIN: f64 = 1e-8;

/// Distance from the closed negative real axis below which the principal
/// logarithm is refused.
pub const BRANCH_CUT_MIN: f64 = 1e-12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MatrixError {
    #[error("eigenvalue within {distance:.3e} of the branch cut (-inf, 0]")]
    SpectrumOnBranchCut { distance: f64 },
    #[error("spectral gap {gap:.3e} at the line Re z = 1/2 is below {SPECTRAL_GAP_MIN:.0e}")]
    SpectralGapTooSmall { gap: f64 },
    #[error("matrix is numerically singular (smallest singular value {sigma_min:.3e})")]
    SingularInput { sigma_min: f64 },
    #[error("matrix entries must be finite")]
    NonFiniteEntry,
    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,
    #[error("entry list has length {got}, expected {expected}")]
    EntryCount { expected: usize, got: usize },
    #[error("QR iteration failed to converge after {iterations} steps")]
    ConvergenceFailed { iterations: usize },
}

/// Square complex matrix carrying the normalized trace `tr/dim` as its
/// tracial state.
#[derive(Clone, PartialEq)]
pub struct TracialMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl std::fmt::Debug for TracialMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "TracialMatrix(dim={})", self.dim)?;
        for i in 0..self.dim {
            write!(f, "  [")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for TracialMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for TracialMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl TracialMatrix {
    /// Builds a matrix from row-major entries, validating shape and finiteness.
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self, MatrixError> {
        if dim == 0 {
            return Err(MatrixError::EmptyMatrix);
        }
        if data.len() != dim * dim {
            return Err(MatrixError::EntryCount {
                expected: dim * dim,
                got: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(MatrixError::NonFiniteEntry);
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, z) in entries.iter().enumerate() {
            m[(i, i)] = *z;
        }
        m
    }

    pub fn scalar(dim: usize, z: Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Raw (unnormalized) trace.
    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// The tracial state `tr/dim`; the identity has normalized trace exactly 1.
    pub fn normalized_trace(&self) -> Complex64 {
        self.trace() / self.dim as f64
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|w| w * z).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in add");
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in sub");
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in mul");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum column sum norm.
    pub fn one_norm(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Distance to the identity in operator norm.
    pub fn distance_to_identity(&self) -> f64 {
        self.sub(&Self::identity(self.dim)).operator_norm()
    }

    /// Largest singular value, computed from the Hermitian eigenvalues of
    /// `m* m`.
    pub fn operator_norm(&self) -> f64 {
        let gram = self.adjoint().mul(self);
        let eig = decomp::hermitian_eigen(&gram);
        eig.values.last().copied().unwrap_or(0.0).max(0.0).sqrt()
    }

    /// Smallest singular value, from the same Gram matrix route.
    pub fn smallest_singular_value(&self) -> f64 {
        let gram = self.adjoint().mul(self);
        let eig = decomp::hermitian_eigen(&gram);
        eig.values.first().copied().unwrap_or(0.0).max(0.0).sqrt()
    }

    /// `‖m* m − 1‖`, the deviation from unitarity.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint()
            .mul(self)
            .sub(&Self::identity(self.dim))
            .operator_norm()
    }

    /// Solves `self · x = rhs` column-wise via LU with partial pivoting.
    pub fn solve(&self, rhs: &Self) -> Result<Self, MatrixError> {
        let lu = decomp::lu_factor(self)?;
        Ok(lu.solve_matrix(rhs))
    }

    pub fn inverse(&self) -> Result<Self, MatrixError> {
        self.solve(&Self::identity(self.dim))
    }

    /// Complex Schur decomposition `m = Q T Q*` with `T` upper triangular.
    pub fn schur(&self) -> Result<SchurForm, MatrixError> {
        decomp::schur(self)
    }

    /// Eigenvalues from the Schur diagonal, in no particular order.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>, MatrixError> {
        Ok(self.schur()?.eigenvalues())
    }

    /// Matrix exponential by scaling and squaring with a Taylor kernel.
    pub fn exp(&self) -> Self {
        functions::exp(self)
    }
}

/// Riesz idempotent onto the part of the spectrum with `Re z > 1/2`,
/// together with its source and the measured spectral gap.
#[derive(Clone, Debug)]
pub struct RieszProjector {
    pub source: TracialMatrix,
    pub projector: TracialMatrix,
    /// Distance of the spectrum of `source` to the line `Re z = 1/2`.
    pub gap: f64,
    /// Number of eigenvalues with `Re z > 1/2`; the rank of the projector.
    pub rank: usize,
}

/// Principal matrix logarithm via Schur form and inverse scaling-and-squaring
/// on the triangular factor. Eigenvalues of the result have imaginary part in
/// `(-pi, pi)`.
pub fn principal_log(m: &TracialMatrix) -> Result<TracialMatrix, MatrixError> {
    functions::principal_log(m)
}

/// Riesz spectral projector onto the invariant subspace for eigenvalues with
/// `Re z > 1/2`, computed from an eigenvalue-ordered Schur decomposition.
pub fn riesz_half_plane(m: &TracialMatrix) -> Result<RieszProjector, MatrixError> {
    functions::riesz_half_plane(m)
}

/// Unitary factor of the polar decomposition `m = U (m* m)^{1/2}`.
pub fn polar_unitary(m: &TracialMatrix) -> Result<TracialMatrix, MatrixError> {
    functions::polar_unitary(m)
}

/// `exp(S)` for skew-Hermitian `S`, through the Hermitian eigendecomposition
/// of `-iS`; the result is unitary to rounding error.
pub fn exp_skew_hermitian(s: &TracialMatrix) -> TracialMatrix {
    functions::exp_skew_hermitian(s)
}

/// Errors with [`MatrixError::SingularInput`] when the smallest singular
/// value does not exceed `floor`.
pub fn assert_invertible(m: &TracialMatrix, floor: f64) -> Result<(), MatrixError> {
    functions::assert_invertible(m, floor)
}
