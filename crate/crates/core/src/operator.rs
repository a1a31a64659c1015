//! Dense operators on quotient coordinates and optimal frame bounds.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{check_dim, FrameError, Result};
use crate::RANK_TOL;

pub type C64 = Complex<f64>;

/// A linear operator on the q-dimensional coordinate realization of `H_F`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorOnHF {
    entries: DMatrix<C64>,
}

impl OperatorOnHF {
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        check_dim(entries.nrows(), entries.ncols())?;
        Ok(Self { entries })
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: DMatrix::identity(dim, dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { entries: DMatrix::zeros(dim, dim) }
    }

    pub fn scaled_identity(dim: usize, scale: C64) -> Self {
        Self { entries: DMatrix::identity(dim, dim) * scale }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self { entries: DMatrix::from_diagonal(&DVector::from_column_slice(diag)) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self { entries: self.entries.adjoint() }
    }

    /// `(A + A*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let sym = (&self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0);
        Self { entries: sym }
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        max_abs(&(&self.entries - self.entries.adjoint()))
    }

    pub fn apply(&self, x: &DVector<C64>) -> Result<DVector<C64>> {
        check_dim(self.dim(), x.len())?;
        Ok(&self.entries * x)
    }

    pub fn compose(&self, rhs: &OperatorOnHF) -> Result<Self> {
        check_dim(self.dim(), rhs.dim())?;
        Ok(Self { entries: &self.entries * &rhs.entries })
    }

    pub fn add(&self, rhs: &OperatorOnHF) -> Result<Self> {
        check_dim(self.dim(), rhs.dim())?;
        Ok(Self { entries: &self.entries + &rhs.entries })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { entries: &self.entries * s }
    }

    /// Kronecker product; the row-major convention matches product-node ordering.
    pub fn kron(&self, rhs: &OperatorOnHF) -> Self {
        Self { entries: self.entries.kronecker(&rhs.entries) }
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        if self.dim() == 0 {
            return Vec::new();
        }
        let eig = self.hermitian_part().entries.symmetric_eigen();
        let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.dim() == 0 {
            return Vec::new();
        }
        let mut values: Vec<f64> = self.entries.singular_values().iter().copied().collect();
        values.sort_by(|a, b| b.total_cmp(a));
        values
    }

    pub fn spectral_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    /// Smallest over largest singular value (0 for the zero operator).
    pub fn condition_ratio(&self) -> f64 {
        let sv = self.singular_values();
        match (sv.first(), sv.last()) {
            (Some(&max), Some(&min)) if max > 0.0 => min / max,
            _ => 0.0,
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.condition_ratio() > RANK_TOL
    }

    pub fn inverse(&self) -> Result<Self> {
        let ratio = self.condition_ratio();
        if ratio <= RANK_TOL {
            return Err(FrameError::SingularOperator { ratio });
        }
        self.entries
            .clone()
            .try_inverse()
            .map(|entries| Self { entries })
            .ok_or(FrameError::SingularOperator { ratio })
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &OperatorOnHF) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_abs(&(&self.entries - &other.entries))
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Frame bounds `0 <= lower <= upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower >= 0.0 && upper >= lower && upper.is_finite()) {
            return Err(FrameError::InvalidInput(format!(
                "frame bounds must satisfy 0 <= A <= B < inf, got ({lower}, {upper})"
            )));
        }
        Ok(Self { lower, upper })
    }

    /// Optimal bounds from an ascending Hermitian spectrum. A slightly negative
    /// smallest eigenvalue (within `1e-12 * lambda_max`) is clamped to zero.
    pub fn from_spectrum(ascending: &[f64]) -> Self {
        let upper = ascending.last().copied().unwrap_or(0.0).max(0.0);
        let mut lower = ascending.first().copied().unwrap_or(0.0);
        if lower < 0.0 && lower >= -1e-12 * upper {
            lower = 0.0;
        }
        let lower = lower.max(0.0).min(upper);
        Self { lower, upper }
    }

    pub fn is_tight(&self, rel_tol: f64) -> bool {
        (self.upper - self.lower) <= rel_tol * self.upper
    }
}
