//! Gram-determinant n-inner products and the quotient Hilbert space `H_F`.
//!
//! The base inner product is the Hermitian dot product, linear in the first
//! argument: `<x, y> = sum_k x_k conj(y_k)`. For anchors `a_2, .., a_n` the
//! n-inner product `<x, y | a_2, .., a_n>` is the determinant of the n x n
//! matrix bordered by `x` (rows) and `y` (columns) around the anchor Gram
//! matrix.
//!
//! `H_F` is realized as the orthogonal complement of `span(anchors)` with
//! coordinates scaled by `sqrt(det Gram(anchors))`, so the standard dot
//! product of coordinates reproduces the n-inner product exactly.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, FrameError, Result};
use crate::operator::C64;
use crate::RANK_TOL;

/// Complex coordinate space of dimension `dim` carrying an n-inner product of order `order`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AmbientSpace {
    dim: usize,
    order: usize,
}

impl AmbientSpace {
    pub fn new(dim: usize, order: usize) -> Result<Self> {
        if order < 2 {
            return Err(FrameError::InvalidInput(format!("order n must be >= 2, got {order}")));
        }
        if dim < order {
            return Err(FrameError::InvalidInput(format!(
                "dimension {dim} must be at least the order {order}"
            )));
        }
        Ok(Self { dim, order })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Dimension of `H_F`: `d - (n - 1)`.
    pub fn quotient_dim(&self) -> usize {
        self.dim + 1 - self.order
    }
}

/// An element of the ambient space.
#[derive(Debug, Clone, PartialEq)]
pub struct NVector {
    coords: DVector<C64>,
}

impl NVector {
    pub fn new(coords: Vec<C64>) -> Self {
        Self { coords: DVector::from_vec(coords) }
    }

    pub fn from_real(coords: &[f64]) -> Self {
        Self::new(coords.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_dvector(coords: DVector<C64>) -> Self {
        Self { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { coords: DVector::zeros(dim) }
    }

    /// The `k`-th standard basis vector.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        Self { coords: v }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &DVector<C64> {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { coords: &self.coords * s }
    }

    pub fn add(&self, other: &NVector) -> Self {
        Self { coords: &self.coords + &other.coords }
    }

    pub fn sub(&self, other: &NVector) -> Self {
        Self { coords: &self.coords - &other.coords }
    }
}

/// Hermitian dot product, linear in `x`.
pub fn dot(x: &DVector<C64>, y: &DVector<C64>) -> C64 {
    // nalgebra's dotc conjugates the receiver
    y.dotc(x)
}

/// The fixed elements `a_2, .., a_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorTuple {
    space: AmbientSpace,
    vectors: Vec<NVector>,
}

impl AnchorTuple {
    pub fn new(space: AmbientSpace, vectors: Vec<NVector>) -> Result<Self> {
        check_dim(space.order() - 1, vectors.len())?;
        for v in &vectors {
            check_dim(space.dim(), v.dim())?;
        }
        let ratio = singular_ratio(&column_matrix(space.dim(), &vectors));
        if ratio < RANK_TOL {
            return Err(FrameError::DegenerateAnchors { ratio });
        }
        Ok(Self { space, vectors })
    }

    /// The last `n - 1` standard basis vectors.
    pub fn standard_tail(space: AmbientSpace) -> Self {
        let d = space.dim();
        let vectors = (d + 1 - space.order()..d).map(|k| NVector::basis(d, k)).collect();
        Self { space, vectors }
    }

    pub fn space(&self) -> AmbientSpace {
        self.space
    }

    pub fn vectors(&self) -> &[NVector] {
        &self.vectors
    }

    /// Same anchors in the order given by `perm` (a permutation of `0..n-1`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.vectors.len()];
        check_dim(self.vectors.len(), perm.len())?;
        for &p in perm {
            if p >= seen.len() || seen[p] {
                return Err(FrameError::InvalidInput("not a permutation".into()));
            }
            seen[p] = true;
        }
        Ok(Self { space: self.space, vectors: perm.iter().map(|&p| self.vectors[p].clone()).collect() })
    }

    /// Gram matrix `G_ij = <a_i, a_j>`.
    pub fn gram(&self) -> DMatrix<C64> {
        let k = self.vectors.len();
        DMatrix::from_fn(k, k, |i, j| dot(self.vectors[i].coords(), self.vectors[j].coords()))
    }

    fn matrix(&self) -> DMatrix<C64> {
        column_matrix(self.space.dim(), &self.vectors)
    }
}

fn column_matrix(rows: usize, vectors: &[NVector]) -> DMatrix<C64> {
    DMatrix::from_fn(rows, vectors.len(), |i, j| vectors[j].coords()[i])
}

fn singular_ratio(m: &DMatrix<C64>) -> f64 {
    if m.ncols() == 0 {
        return 1.0;
    }
    let sv = m.singular_values();
    let max = sv.max();
    if max > 0.0 {
        sv.min() / max
    } else {
        0.0
    }
}

/// `<x, y | a_2, .., a_n>` as a bordered Gram determinant.
pub fn n_inner(x: &NVector, y: &NVector, anchors: &AnchorTuple) -> Result<C64> {
    let d = anchors.space().dim();
    check_dim(d, x.dim())?;
    check_dim(d, y.dim())?;
    let a = anchors.vectors();
    let n = a.len() + 1;
    let m = DMatrix::from_fn(n, n, |i, j| {
        let row = if i == 0 { x.coords() } else { a[i - 1].coords() };
        let col = if j == 0 { y.coords() } else { a[j - 1].coords() };
        dot(row, col)
    });
    Ok(m.determinant())
}

/// `||x, a_2, .., a_n|| = sqrt(<x, x | a_2, .., a_n>)`.
pub fn n_norm(x: &NVector, anchors: &AnchorTuple) -> Result<f64> {
    Ok(n_inner(x, x, anchors)?.re.max(0.0).sqrt())
}

/// Natural magnitude of `<x, y | anchors>`, used to scale absolute tolerances.
pub fn n_inner_scale(x: &NVector, y: &NVector, anchors: &AnchorTuple) -> f64 {
    anchors.vectors().iter().fold(x.norm() * y.norm(), |acc, a| acc * a.norm() * a.norm())
}

/// Concrete realization of `H_F`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientFrameSpace {
    anchors: AnchorTuple,
    comp_basis: DMatrix<C64>,
    gram_factor: f64,
}

impl QuotientFrameSpace {
    pub fn anchors(&self) -> &AnchorTuple {
        &self.anchors
    }

    pub fn space(&self) -> AmbientSpace {
        self.anchors.space()
    }

    /// d x q matrix with orthonormal columns spanning `span(anchors)^perp`.
    pub fn comp_basis(&self) -> &DMatrix<C64> {
        &self.comp_basis
    }

    pub fn gram_factor(&self) -> f64 {
        self.gram_factor
    }

    pub fn dim(&self) -> usize {
        self.comp_basis.ncols()
    }

    /// Orthogonal projector onto the complement of the anchors.
    pub fn projector(&self) -> DMatrix<C64> {
        &self.comp_basis * self.comp_basis.adjoint()
    }

    pub fn to_coords(&self, x: &NVector) -> Result<DVector<C64>> {
        check_dim(self.space().dim(), x.dim())?;
        Ok(self.comp_basis.adjoint() * x.coords() * C64::new(self.gram_factor.sqrt(), 0.0))
    }

    pub fn from_coords(&self, c: &DVector<C64>) -> Result<NVector> {
        check_dim(self.dim(), c.len())?;
        Ok(NVector::from_dvector(&self.comp_basis * c / C64::new(self.gram_factor.sqrt(), 0.0)))
    }

    /// Columnwise `to_coords` for a d x M sample matrix.
    pub fn to_coords_matrix(&self, samples: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        check_dim(self.space().dim(), samples.nrows())?;
        Ok(self.comp_basis.adjoint() * samples * C64::new(self.gram_factor.sqrt(), 0.0))
    }

    /// Columnwise `from_coords` for a q x M coordinate matrix.
    pub fn from_coords_matrix(&self, coords: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        check_dim(self.dim(), coords.nrows())?;
        Ok(&self.comp_basis * coords / C64::new(self.gram_factor.sqrt(), 0.0))
    }
}

/// Builds `H_F` for the given anchors.
///
/// The complement basis is obtained by Gram-Schmidt (with one re-orthogonalization
/// pass) over the standard basis, always taking the candidate with the largest
/// residual and the lowest index on ties. When the anchors are themselves
/// standard basis vectors the complement basis is the remaining standard basis
/// in ascending order.
pub fn build_quotient(anchors: &AnchorTuple) -> Result<QuotientFrameSpace> {
    let space = anchors.space();
    let d = space.dim();
    let ratio = singular_ratio(&anchors.matrix());
    if ratio < RANK_TOL {
        return Err(FrameError::DegenerateAnchors { ratio });
    }

    let mut ortho: Vec<DVector<C64>> = Vec::with_capacity(d);
    for a in anchors.vectors() {
        let r = orthogonalize(a.coords(), &ortho);
        let norm = r.norm();
        if norm <= RANK_TOL * a.norm() {
            return Err(FrameError::DegenerateAnchors { ratio: norm / a.norm() });
        }
        ortho.push(r / C64::new(norm, 0.0));
    }
    let n_anchor = ortho.len();
    let q = space.quotient_dim();
    let mut used = vec![false; d];
    while ortho.len() < n_anchor + q {
        let mut best: Option<(usize, DVector<C64>, f64)> = None;
        for k in (0..d).filter(|&k| !used[k]) {
            let r = orthogonalize(NVector::basis(d, k).coords(), &ortho);
            let norm = r.norm();
            if best.as_ref().map_or(true, |(_, _, b)| norm > *b) {
                best = Some((k, r, norm));
            }
        }
        let (k, r, norm) = best.expect("complement has remaining dimensions");
        used[k] = true;
        ortho.push(r / C64::new(norm, 0.0));
    }

    let comp = &ortho[n_anchor..];
    let comp_basis = DMatrix::from_fn(d, q, |i, j| comp[j][i]);
    let gram_factor = anchors.gram().determinant().re;
    if !(gram_factor > 0.0) {
        return Err(FrameError::DegenerateAnchors { ratio });
    }
    Ok(QuotientFrameSpace { anchors: anchors.clone(), comp_basis, gram_factor })
}

fn orthogonalize(v: &DVector<C64>, basis: &[DVector<C64>]) -> DVector<C64> {
    let mut r = v.clone();
    for _ in 0..2 {
        for b in basis {
            let proj = b.dotc(&r);
            r -= b * proj;
        }
    }
    r
}

pub fn to_quotient_coords(x: &NVector, qs: &QuotientFrameSpace) -> Result<DVector<C64>> {
    qs.to_coords(x)
}

pub fn from_quotient_coords(c: &DVector<C64>, qs: &QuotientFrameSpace) -> Result<NVector> {
    qs.from_coords(c)
}
