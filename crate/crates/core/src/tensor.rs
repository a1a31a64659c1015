//! Tensor products of n-Hilbert spaces, frames, duals and multipliers.
//!
//! `H_F (x) H_G` is realized as the Kronecker product of the two coordinate
//! spaces. Product nodes are ordered row-major (left index outer), so the
//! coordinate columns of `F1 (x) F2` are exactly `kron(C1, C2)`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, FrameError, Result};
use crate::frames::{FrameFamily, FrameVerdict, SynthesisMatrix};
use crate::measure::{product_measure, same_measure, CoefficientFunction, MeasureSpace};
use crate::multiplier::{multiplier_operator, MultiplierSymbol};
use crate::nip::{n_inner, n_norm, NVector, QuotientFrameSpace};
use crate::operator::{FrameBounds, OperatorOnHF, C64};
use crate::DUAL_TOL;

#[derive(Debug, Clone, PartialEq)]
pub struct TensorQuotientSpace {
    left: Arc<QuotientFrameSpace>,
    right: Arc<QuotientFrameSpace>,
}

impl TensorQuotientSpace {
    pub fn new(left: Arc<QuotientFrameSpace>, right: Arc<QuotientFrameSpace>) -> Self {
        Self { left, right }
    }

    pub fn left(&self) -> &Arc<QuotientFrameSpace> {
        &self.left
    }

    pub fn right(&self) -> &Arc<QuotientFrameSpace> {
        &self.right
    }

    pub fn dim(&self) -> usize {
        self.left.dim() * self.right.dim()
    }

    /// Coordinates of `f (x) g`: `kron(coords(f), coords(g))`.
    pub fn simple_tensor_coords(&self, f: &NVector, g: &NVector) -> Result<DVector<C64>> {
        Ok(self.left.to_coords(f)?.kronecker(&self.right.to_coords(g)?))
    }
}

/// `<f (x) g, f' (x) g' | a (x) b> = <f, f' | a>_1 <g, g' | b>_2`.
pub fn tensor_n_inner(
    f: &NVector,
    g: &NVector,
    f_prime: &NVector,
    g_prime: &NVector,
    space: &TensorQuotientSpace,
) -> Result<C64> {
    Ok(n_inner(f, f_prime, space.left.anchors())? * n_inner(g, g_prime, space.right.anchors())?)
}

/// `||f, a_2, ..|| ||g, b_2, ..||`.
pub fn tensor_n_norm(f: &NVector, g: &NVector, space: &TensorQuotientSpace) -> Result<f64> {
    Ok(n_norm(f, space.left.anchors())? * n_norm(g, space.right.anchors())?)
}

pub fn kron_operator(q: &OperatorOnHF, t: &OperatorOnHF) -> OperatorOnHF {
    q.kron(t)
}

/// The family `F1(x1) (x) F2(x2)` over the product measure.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorFrameFamily {
    left: FrameFamily,
    right: FrameFamily,
    measure: Arc<MeasureSpace>,
    space: TensorQuotientSpace,
    coords: DMatrix<C64>,
}

pub fn tensor_frame(f1: &FrameFamily, f2: &FrameFamily) -> TensorFrameFamily {
    let measure = Arc::new(product_measure(f1.measure(), f2.measure()));
    let coords = f1.coords().kronecker(f2.coords());
    TensorFrameFamily {
        left: f1.clone(),
        right: f2.clone(),
        measure,
        space: TensorQuotientSpace::new(f1.quotient().clone(), f2.quotient().clone()),
        coords,
    }
}

impl TensorFrameFamily {
    pub fn left(&self) -> &FrameFamily {
        &self.left
    }

    pub fn right(&self) -> &FrameFamily {
        &self.right
    }

    pub fn measure(&self) -> &Arc<MeasureSpace> {
        &self.measure
    }

    pub fn space(&self) -> &TensorQuotientSpace {
        &self.space
    }

    /// (q1 q2) x (M1 M2) coordinate columns.
    pub fn coords(&self) -> &DMatrix<C64> {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.nrows()
    }

    fn check_compatible(&self, other: &TensorFrameFamily) -> Result<()> {
        self.left.check_compatible(&other.left)?;
        self.right.check_compatible(&other.right)
    }

    pub fn synthesis_matrix(&self) -> SynthesisMatrix {
        SynthesisMatrix { entries: self.coords.clone(), weights: self.measure.weights().to_vec() }
    }

    /// `S_F1 (x) S_F2`.
    pub fn frame_operator(&self) -> OperatorOnHF {
        kron_operator(&self.left.frame_operator(), &self.right.frame_operator())
    }

    /// `sum_x mu(x) c_x c_x*` accumulated node by node in ascending order.
    pub fn frame_operator_by_nodes(&self) -> OperatorOnHF {
        let dim = self.dim();
        let mut s = DMatrix::<C64>::zeros(dim, dim);
        for (k, w) in self.measure.weights().iter().enumerate() {
            let c = self.coords.column(k);
            s += c * c.adjoint() * C64::new(*w, 0.0);
        }
        OperatorOnHF::new(s).expect("square").hermitian_part()
    }

    /// Optimal bounds of the tensor family, from the spectrum of its frame operator.
    pub fn bounds(&self) -> FrameBounds {
        FrameBounds::from_spectrum(&self.frame_operator().hermitian_eigenvalues())
    }

    /// `(A1 A2, B1 B2)` from the factor bounds.
    pub fn factor_bound_products(&self) -> FrameBounds {
        let a = self.left.frame_bounds();
        let b = self.right.frame_bounds();
        FrameBounds { lower: a.lower * b.lower, upper: a.upper * b.upper }
    }

    pub fn is_frame(&self, tol: f64) -> FrameVerdict {
        let spectrum = self.frame_operator().hermitian_eigenvalues();
        let bounds = FrameBounds::from_spectrum(&spectrum);
        let lambda_min = spectrum.first().copied().unwrap_or(0.0);
        let is_frame = bounds.upper > 0.0 && lambda_min > tol * bounds.upper;
        let surjective = self.synthesis_matrix().rank(tol.sqrt()) == self.dim();
        FrameVerdict { is_frame, surjective, bounds }
    }

    /// Analysis of `f (x) g`: `<f (x) g, F(x_ij)>` on the product nodes.
    pub fn analysis_simple(&self, f: &NVector, g: &NVector) -> Result<CoefficientFunction> {
        let c = self.space.simple_tensor_coords(f, g)?;
        self.analysis_coords(&c)
    }

    pub fn analysis_coords(&self, c: &DVector<C64>) -> Result<CoefficientFunction> {
        check_dim(self.dim(), c.len())?;
        let phi = self.coords.adjoint() * c;
        CoefficientFunction::new(phi.iter().copied().collect(), self.measure.clone())
    }

    pub fn synthesis_coords(&self, phi: &CoefficientFunction) -> Result<DVector<C64>> {
        if !same_measure(&self.measure, phi.measure()) {
            return Err(FrameError::MeasureMismatch("coefficients are not on the product measure".into()));
        }
        let mut acc = DVector::zeros(self.dim());
        for (k, (w, v)) in self.measure.weights().iter().zip(phi.values()).enumerate() {
            acc += self.coords.column(k) * (v * *w);
        }
        Ok(acc)
    }

    /// `sum_x mu(x) <f (x) g, F(x)> G(x)` by flat summation over product nodes.
    pub fn reconstruct_simple(&self, dual: &TensorFrameFamily, f: &NVector, g: &NVector) -> Result<DVector<C64>> {
        self.check_compatible(dual)?;
        let phi = self.analysis_simple(f, g)?;
        let phi = CoefficientFunction::new(phi.values().to_vec(), dual.measure.clone())?;
        dual.synthesis_coords(&phi)
    }

    /// Same reconstruction computed factor by factor and tensored.
    pub fn reconstruct_simple_iterated(&self, dual: &TensorFrameFamily, f: &NVector, g: &NVector) -> Result<DVector<C64>> {
        let rf = self.left.reconstruct(&dual.left, f)?;
        let rg = self.right.reconstruct(&dual.right, g)?;
        self.space.simple_tensor_coords(&rf, &rg)
    }

    /// `C_G diag(mu) C_F*` on the tensor coordinates.
    pub fn cross_frame_operator(&self, dual: &TensorFrameFamily) -> Result<OperatorOnHF> {
        self.check_compatible(dual)?;
        OperatorOnHF::new(dual.synthesis_matrix().weighted() * self.coords.adjoint())
    }

    pub fn dual_residual(&self, dual: &TensorFrameFamily) -> Result<f64> {
        let cross = self.cross_frame_operator(dual)?;
        let id = OperatorOnHF::identity(cross.dim());
        Ok(cross.add(&id.scale(C64::new(-1.0, 0.0)))?.spectral_norm())
    }

    /// Multiplier over the product nodes with an arbitrary symbol on `X1 x X2`.
    pub fn multiplier(&self, m: &MultiplierSymbol, dual: &TensorFrameFamily) -> Result<OperatorOnHF> {
        self.check_compatible(dual)?;
        check_dim(self.measure.node_count(), m.values().len())?;
        let dim = self.dim();
        let mut acc = DMatrix::<C64>::zeros(dim, dim);
        for (k, w) in self.measure.weights().iter().enumerate() {
            acc += dual.coords.column(k) * self.coords.column(k).adjoint() * (m.values()[k] * *w);
        }
        OperatorOnHF::new(acc)
    }
}

/// Optimal bounds of an arbitrary family given by coordinate columns.
pub fn bounds_of_columns(coords: &DMatrix<C64>, weights: &[f64]) -> Result<FrameBounds> {
    check_dim(coords.ncols(), weights.len())?;
    let synth = SynthesisMatrix { entries: coords.clone(), weights: weights.to_vec() };
    let s = OperatorOnHF::new(synth.weighted() * coords.adjoint())?;
    Ok(FrameBounds::from_spectrum(&s.hermitian_part().hermitian_eigenvalues()))
}

/// A verified tensor dual `G1 (x) G2` of `F1 (x) F2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorDual {
    pub frame: TensorFrameFamily,
    pub dual: TensorFrameFamily,
    pub left_residual: f64,
    pub right_residual: f64,
    /// Worst relative residual of the tensor reconstruction identity.
    pub tensor_residual: f64,
}

fn require_dual(f: &FrameFamily, g: &FrameFamily) -> Result<f64> {
    let residual = f.dual_residual(g)?;
    if residual > DUAL_TOL {
        return Err(FrameError::NotADual { residual, tolerance: DUAL_TOL });
    }
    Ok(residual)
}

/// Checks that `G1` is dual to `F1` and `G2` to `F2`, then that `G1 (x) G2`
/// reproduces every tensor through `F1 (x) F2`.
pub fn tensor_dual(g1: &FrameFamily, g2: &FrameFamily, f1: &FrameFamily, f2: &FrameFamily) -> Result<TensorDual> {
    let left_residual = require_dual(f1, g1)?;
    let right_residual = require_dual(f2, g2)?;
    let frame = tensor_frame(f1, f2);
    let dual = tensor_frame(g1, g2);
    let tensor_residual = frame.dual_residual(&dual)?;
    if tensor_residual > DUAL_TOL {
        return Err(FrameError::NotADual { residual: tensor_residual, tolerance: DUAL_TOL });
    }
    Ok(TensorDual { frame, dual, left_residual, right_residual, tensor_residual })
}

/// Bounds certified for a tensor dual pair from the factor Bessel bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualPairCertificate {
    /// Optimal bounds of `F1 (x) F2`.
    pub frame_bounds: FrameBounds,
    /// Optimal bounds of `G1 (x) G2`.
    pub dual_bounds: FrameBounds,
    /// `[1 / (B2 D2), B1 D1]`, with `B1, B2` the Bessel bounds of `F1, G1` and `D1, D2` those of `F2, G2`.
    pub certified_frame: FrameBounds,
    /// `[1 / (B1 D1), B2 D2]`.
    pub certified_dual: FrameBounds,
}

impl DualPairCertificate {
    /// Computed bounds lie inside the certified intervals up to `rel_tol`.
    pub fn holds(&self, rel_tol: f64) -> bool {
        let inside = |got: &FrameBounds, cert: &FrameBounds| {
            got.lower >= cert.lower * (1.0 - rel_tol) && got.upper <= cert.upper * (1.0 + rel_tol)
        };
        inside(&self.frame_bounds, &self.certified_frame) && inside(&self.dual_bounds, &self.certified_dual)
    }
}

pub fn dual_pair_bessel_check(
    f1: &FrameFamily,
    g1: &FrameFamily,
    f2: &FrameFamily,
    g2: &FrameFamily,
) -> Result<DualPairCertificate> {
    require_dual(f1, g1)?;
    require_dual(f2, g2)?;
    let b1 = f1.frame_bounds().upper;
    let b2 = g1.frame_bounds().upper;
    let d1 = f2.frame_bounds().upper;
    let d2 = g2.frame_bounds().upper;
    Ok(DualPairCertificate {
        frame_bounds: tensor_frame(f1, f2).bounds(),
        dual_bounds: tensor_frame(g1, g2).bounds(),
        certified_frame: FrameBounds { lower: 1.0 / (b2 * d2), upper: b1 * d1 },
        certified_dual: FrameBounds { lower: 1.0 / (b1 * d1), upper: b2 * d2 },
    })
}

/// `M_{m1,F1,G1} (x) M_{m2,F2,G2}`.
pub fn tensor_multiplier(
    m1: &MultiplierSymbol,
    m2: &MultiplierSymbol,
    f1: &FrameFamily,
    g1: &FrameFamily,
    f2: &FrameFamily,
    g2: &FrameFamily,
) -> Result<OperatorOnHF> {
    let left = multiplier_operator(m1, f1, g1)?;
    let right = multiplier_operator(m2, f2, g2)?;
    Ok(kron_operator(&left, &right))
}
