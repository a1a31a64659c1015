//! Continuous frames associated to a fixed anchor tuple.
//!
//! A [`FrameFamily`] stores the sampled vectors `F(w_i)` both in the ambient
//! space and in `H_F` coordinates. Every operator below acts on coordinates;
//! ambient vectors are returned as their representatives in the orthogonal
//! complement of the anchors.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, FrameError, Result};
use crate::measure::{same_measure, CoefficientFunction, MeasureSpace};
use crate::nip::{NVector, QuotientFrameSpace};
use crate::operator::{FrameBounds, OperatorOnHF, C64};
use crate::{DEFAULT_FRAME_TOL, RANK_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct FrameFamily {
    samples: DMatrix<C64>,
    coords: DMatrix<C64>,
    measure: Arc<MeasureSpace>,
    quotient: Arc<QuotientFrameSpace>,
}

/// Outcome of the two frame tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameVerdict {
    /// `lambda_min(S) > tol * lambda_max(S)`.
    pub is_frame: bool,
    /// The synthesis operator has full rank `q` (SVD test).
    pub surjective: bool,
    pub bounds: FrameBounds,
}

impl FrameVerdict {
    pub fn agree(&self) -> bool {
        self.is_frame == self.surjective
    }
}

/// Synthesis operator `T_C` in matrix form: `T phi = C diag(mu) phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisMatrix {
    pub entries: DMatrix<C64>,
    pub weights: Vec<f64>,
}

impl SynthesisMatrix {
    /// `C diag(sqrt(mu))`: the synthesis operator composed with the isometry
    /// `C^M -> L^2(mu)`, so its singular values are those of `T_C`.
    pub fn isometric_form(&self) -> DMatrix<C64> {
        let mut w = self.entries.clone();
        for (j, mut col) in w.column_iter_mut().enumerate() {
            col *= C64::new(self.weights[j].sqrt(), 0.0);
        }
        w
    }

    /// `C diag(mu)`.
    pub fn weighted(&self) -> DMatrix<C64> {
        let mut w = self.entries.clone();
        for (j, mut col) in w.column_iter_mut().enumerate() {
            col *= C64::new(self.weights[j], 0.0);
        }
        w
    }

    pub fn operator_norm(&self) -> f64 {
        let w = self.isometric_form();
        if w.ncols() == 0 || w.nrows() == 0 {
            return 0.0;
        }
        w.singular_values().max()
    }

    /// Singular values of `T_C`, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self.isometric_form().singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Number of singular values above `rel_tol * sigma_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let sv = self.singular_values();
        let max = sv.first().copied().unwrap_or(0.0);
        if max <= 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > rel_tol * max).count()
    }
}

/// Right inverse of the synthesis operator, mapping coordinates to coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisPseudoInverse {
    matrix: DMatrix<C64>,
    measure: Arc<MeasureSpace>,
}

impl SynthesisPseudoInverse {
    /// M x q matrix.
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn apply(&self, coords: &DVector<C64>) -> Result<CoefficientFunction> {
        check_dim(self.matrix.ncols(), coords.len())?;
        let phi = &self.matrix * coords;
        CoefficientFunction::new(phi.iter().copied().collect(), self.measure.clone())
    }
}

impl FrameFamily {
    /// Samples are the columns of a d x M matrix.
    pub fn new(samples: DMatrix<C64>, measure: Arc<MeasureSpace>, quotient: Arc<QuotientFrameSpace>) -> Result<Self> {
        check_dim(quotient.space().dim(), samples.nrows())?;
        check_dim(measure.node_count(), samples.ncols())?;
        let coords = quotient.to_coords_matrix(&samples)?;
        Ok(Self { samples, coords, measure, quotient })
    }

    pub fn from_vectors(
        vectors: &[NVector],
        measure: Arc<MeasureSpace>,
        quotient: Arc<QuotientFrameSpace>,
    ) -> Result<Self> {
        let d = quotient.space().dim();
        for v in vectors {
            check_dim(d, v.dim())?;
        }
        let samples = DMatrix::from_fn(d, vectors.len(), |i, j| vectors[j].coords()[i]);
        Self::new(samples, measure, quotient)
    }

    /// Family whose samples are given directly in `H_F` coordinates (q x M).
    pub fn from_coords(coords: DMatrix<C64>, measure: Arc<MeasureSpace>, quotient: Arc<QuotientFrameSpace>) -> Result<Self> {
        check_dim(measure.node_count(), coords.ncols())?;
        let samples = quotient.from_coords_matrix(&coords)?;
        Ok(Self { samples, coords, measure, quotient })
    }

    pub fn samples(&self) -> &DMatrix<C64> {
        &self.samples
    }

    pub fn sample(&self, i: usize) -> NVector {
        NVector::from_dvector(self.samples.column(i).into_owned())
    }

    /// q x M matrix, column i = coordinates of `F(w_i)`.
    pub fn coords(&self) -> &DMatrix<C64> {
        &self.coords
    }

    pub fn measure(&self) -> &Arc<MeasureSpace> {
        &self.measure
    }

    pub fn quotient(&self) -> &Arc<QuotientFrameSpace> {
        &self.quotient
    }

    pub fn node_count(&self) -> usize {
        self.measure.node_count()
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self {
            samples: &self.samples * s,
            coords: &self.coords * s,
            measure: self.measure.clone(),
            quotient: self.quotient.clone(),
        }
    }

    pub(crate) fn check_compatible(&self, other: &FrameFamily) -> Result<()> {
        if !same_measure(&self.measure, &other.measure) {
            return Err(FrameError::MeasureMismatch("families are sampled on different measure spaces".into()));
        }
        if !(Arc::ptr_eq(&self.quotient, &other.quotient) || self.quotient == other.quotient) {
            return Err(FrameError::InvalidInput("families are associated to different anchors".into()));
        }
        Ok(())
    }

    pub fn synthesis_matrix(&self) -> SynthesisMatrix {
        SynthesisMatrix { entries: self.coords.clone(), weights: self.measure.weights().to_vec() }
    }

    /// `(T* f)(w_i) = <f, F(w_i) | anchors>`.
    pub fn analysis(&self, f: &NVector) -> Result<CoefficientFunction> {
        let cf = self.quotient.to_coords(f)?;
        let phi = self.coords.adjoint() * cf;
        CoefficientFunction::new(phi.iter().copied().collect(), self.measure.clone())
    }

    /// `T phi` in `H_F` coordinates.
    pub fn synthesis_coords(&self, phi: &CoefficientFunction) -> Result<DVector<C64>> {
        if !same_measure(&self.measure, phi.measure()) {
            return Err(FrameError::MeasureMismatch("coefficient function is not on the family's measure".into()));
        }
        let mut acc = DVector::zeros(self.coords.nrows());
        for (i, (w, v)) in self.measure.weights().iter().zip(phi.values()).enumerate() {
            acc += self.coords.column(i) * (v * *w);
        }
        Ok(acc)
    }

    /// `T phi`, returned as its representative in the complement of the anchors.
    pub fn synthesis(&self, phi: &CoefficientFunction) -> Result<NVector> {
        self.quotient.from_coords(&self.synthesis_coords(phi)?)
    }

    /// `S = C diag(mu) C*`, Hermitian-symmetrized.
    pub fn frame_operator(&self) -> OperatorOnHF {
        let s = self.synthesis_matrix().weighted() * self.coords.adjoint();
        OperatorOnHF::new(s).expect("square").hermitian_part()
    }

    /// Operator `f -> sum_i mu_i <f, F(w_i)> G(w_i)` on coordinates.
    pub fn cross_frame_operator(&self, dual: &FrameFamily) -> Result<OperatorOnHF> {
        self.check_compatible(dual)?;
        OperatorOnHF::new(dual.synthesis_matrix().weighted() * self.coords.adjoint())
    }

    /// Optimal bounds: extremal eigenvalues of `S`.
    pub fn frame_bounds(&self) -> FrameBounds {
        FrameBounds::from_spectrum(&self.frame_operator().hermitian_eigenvalues())
    }

    pub fn is_frame(&self, tol: f64) -> FrameVerdict {
        let spectrum = self.frame_operator().hermitian_eigenvalues();
        let bounds = FrameBounds::from_spectrum(&spectrum);
        let lambda_min = spectrum.first().copied().unwrap_or(0.0);
        let is_frame = bounds.upper > 0.0 && lambda_min > tol * bounds.upper;
        // sigma^2 = lambda, so the matching relative threshold is sqrt(tol)
        let surjective = self.synthesis_matrix().rank(tol.sqrt()) == self.coords.nrows();
        FrameVerdict { is_frame, surjective, bounds }
    }

    fn require_frame(&self, tol: f64) -> Result<OperatorOnHF> {
        let s = self.frame_operator();
        let spectrum = s.hermitian_eigenvalues();
        let lambda_min = spectrum.first().copied().unwrap_or(0.0);
        let lambda_max = spectrum.last().copied().unwrap_or(0.0);
        if !(lambda_max > 0.0 && lambda_min > tol * lambda_max) {
            return Err(FrameError::SingularFrame { lambda_min, lambda_max });
        }
        Ok(s)
    }

    /// Canonical dual `G(w) = S^{-1} F(w)`.
    pub fn canonical_dual(&self) -> Result<FrameFamily> {
        let s = self.require_frame(DEFAULT_FRAME_TOL)?;
        let s_inv = s.inverse()?;
        Self::from_coords(s_inv.matrix() * &self.coords, self.measure.clone(), self.quotient.clone())
    }

    /// `T_G T*_F f`.
    pub fn reconstruct(&self, dual: &FrameFamily, f: &NVector) -> Result<NVector> {
        self.check_compatible(dual)?;
        dual.synthesis(&self.analysis(f)?)
    }

    /// Spectral norm of `T_G T*_F - I`: the worst relative reconstruction error.
    pub fn dual_residual(&self, dual: &FrameFamily) -> Result<f64> {
        let cross = self.cross_frame_operator(dual)?;
        let id = OperatorOnHF::identity(cross.dim());
        Ok(cross.add(&id.scale(C64::new(-1.0, 0.0)))?.spectral_norm())
    }

    /// Image `U F` of the family under an invertible operator on `H_F`.
    pub fn transform(&self, u: &OperatorOnHF) -> Result<FrameFamily> {
        check_dim(self.coords.nrows(), u.dim())?;
        let ratio = u.condition_ratio();
        if ratio <= RANK_TOL {
            return Err(FrameError::SingularOperator { ratio });
        }
        Self::from_coords(u.matrix() * &self.coords, self.measure.clone(), self.quotient.clone())
    }

    /// Right inverse `T^dagger` with `T T^dagger = I`, via a thresholded SVD.
    pub fn synthesis_pseudo_inverse(&self) -> Result<SynthesisPseudoInverse> {
        self.require_frame(DEFAULT_FRAME_TOL)?;
        let synth = self.synthesis_matrix();
        let w = synth.isometric_form();
        let svd = w.svd(true, true);
        let u = svd.u.as_ref().expect("requested U");
        let v_t = svd.v_t.as_ref().expect("requested V^T");
        let sigma_max = svd.singular_values.max();
        let q = self.coords.nrows();
        let m = self.node_count();
        let mut pinv = DMatrix::<C64>::zeros(m, q);
        for (k, &s) in svd.singular_values.iter().enumerate() {
            if s > RANK_TOL * sigma_max {
                // v_k (u_k)^* / s
                let vk = v_t.row(k).adjoint();
                let uk = u.column(k);
                pinv += vk * uk.adjoint() * C64::new(1.0 / s, 0.0);
            }
        }
        // undo the sqrt(mu) isometry
        for (i, mut row) in pinv.row_iter_mut().enumerate() {
            row /= C64::new(synth.weights[i].sqrt(), 0.0);
        }
        Ok(SynthesisPseudoInverse { matrix: pinv, measure: self.measure.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nip::{build_quotient, n_inner, AmbientSpace, AnchorTuple};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn quotient() -> Arc<QuotientFrameSpace> {
        let space = AmbientSpace::new(3, 2).unwrap();
        Arc::new(build_quotient(&AnchorTuple::standard_tail(space)).unwrap())
    }

    fn family(vectors: &[[f64; 3]]) -> FrameFamily {
        let vs: Vec<NVector> = vectors.iter().map(|v| NVector::from_real(v)).collect();
        let measure = Arc::new(MeasureSpace::counting(vs.len()).unwrap());
        FrameFamily::from_vectors(&vs, measure, quotient()).unwrap()
    }

    fn instance_k() -> FrameFamily {
        family(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]])
    }

    fn re(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    fn assert_vec(got: &[C64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - C64::new(*w, 0.0)).norm() <= tol, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn analysis_examples() {
        let k = instance_k();
        let phi = k.analysis(&NVector::from_real(&[1.0, 0.0, 0.0])).unwrap();
        assert_vec(phi.values(), &[1.0, 0.0, FRAC_1_SQRT_2], 1e-15);
        let anchor = NVector::from_real(&[0.0, 0.0, 1.0]);
        assert_vec(k.analysis(&anchor).unwrap().values(), &[0.0; 3], 1e-15);
        assert_vec(k.analysis(&NVector::zeros(3)).unwrap().values(), &[0.0; 3], 0.0);
        // coordinate route agrees with the Gram determinant
        let f = NVector::new(vec![C64::new(0.3, -1.0), C64::new(2.0, 0.5), C64::new(-4.0, 1.0)]);
        let phi = k.analysis(&f).unwrap();
        for i in 0..3 {
            let det = n_inner(&f, &k.sample(i), k.quotient().anchors()).unwrap();
            assert!((phi.values()[i] - det).norm() < 1e-12);
        }
    }

    #[test]
    fn synthesis_examples() {
        let k = instance_k();
        let cf = |v: &[f64]| CoefficientFunction::new(re(v), k.measure().clone()).unwrap();
        assert_vec(k.synthesis(&cf(&[1.0, 0.0, 0.0])).unwrap().coords().as_slice(), &[1.0, 0.0, 0.0], 1e-15);
        assert_vec(k.synthesis(&cf(&[0.0, 0.0, 0.0])).unwrap().coords().as_slice(), &[0.0; 3], 0.0);
        assert_vec(k.synthesis(&cf(&[1.0, 1.0, 0.0])).unwrap().coords().as_slice(), &[1.0, 1.0, 0.0], 1e-15);
        let other = Arc::new(MeasureSpace::new(vec![1.0, 1.0, 2.0]).unwrap());
        let bad = CoefficientFunction::new(re(&[1.0, 0.0, 0.0]), other).unwrap();
        assert!(matches!(k.synthesis(&bad), Err(FrameError::MeasureMismatch(_))));
    }

    #[test]
    fn frame_operator_examples() {
        let k = instance_k();
        let s = k.frame_operator();
        let want = DMatrix::from_row_slice(2, 2, &re(&[1.5, 0.5, 0.5, 1.5]));
        assert!((s.matrix() - &want).norm() < 1e-14);
        let pair = family(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        assert!(pair.frame_operator().max_abs_diff(&OperatorOnHF::identity(2)) < 1e-15);
        let doubled = k.scaled(C64::new(2.0, 0.0)).frame_operator();
        assert!(doubled.max_abs_diff(&s.scale(C64::new(4.0, 0.0))) < 1e-14);
    }

    #[test]
    fn bounds_examples() {
        let b = instance_k().frame_bounds();
        assert!((b.lower - 1.0).abs() < 1e-14 && (b.upper - 2.0).abs() < 1e-14);
        let tight = family(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).frame_bounds();
        assert!((tight.lower - 1.0).abs() < 1e-15 && tight.is_tight(1e-12));
        let single = family(&[[1.0, 0.0, 0.0]]).frame_bounds();
        assert_eq!(single.lower, 0.0);
        assert!((single.upper - 1.0).abs() < 1e-15);
    }

    #[test]
    fn is_frame_examples() {
        let v = instance_k().is_frame(DEFAULT_FRAME_TOL);
        assert!(v.is_frame && v.surjective);
        assert!((v.bounds.lower - 1.0).abs() < 1e-14);
        let v = family(&[[1.0, 0.0, 0.0]]).is_frame(DEFAULT_FRAME_TOL);
        assert!(!v.is_frame && !v.surjective);
        assert!(MeasureSpace::counting(0).is_err());
    }

    #[test]
    fn canonical_dual_examples() {
        let k = instance_k();
        let g = k.canonical_dual().unwrap();
        let s_inv = DMatrix::from_row_slice(2, 2, &re(&[0.75, -0.25, -0.25, 0.75]));
        assert!((g.coords() - &s_inv * k.coords()).norm() < 1e-14);

        let tight = family(&[[2.0, 0.0, 0.0], [0.0, 2.0, 0.0]]);
        let a = tight.frame_bounds().lower;
        let gd = tight.canonical_dual().unwrap();
        assert!((gd.coords() - tight.coords() / C64::new(a, 0.0)).norm() < 1e-14);

        let err = family(&[[1.0, 0.0, 0.0]]).canonical_dual();
        assert!(matches!(err, Err(FrameError::SingularFrame { .. })));
    }

    #[test]
    fn reconstruct_examples() {
        let k = instance_k();
        let g = k.canonical_dual().unwrap();
        let r = k.reconstruct(&g, &NVector::from_real(&[1.0, 0.0, 0.0])).unwrap();
        assert_vec(r.coords().as_slice(), &[1.0, 0.0, 0.0], 1e-10);
        let r = k.reconstruct(&g, &NVector::from_real(&[0.0, 0.0, 1.0])).unwrap();
        assert!(r.norm() < 1e-14);
        let parseval = family(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let r = parseval.reconstruct(&parseval, &NVector::from_real(&[3.0, -2.0, 5.0])).unwrap();
        assert_vec(r.coords().as_slice(), &[3.0, -2.0, 0.0], 1e-14);
        assert!(k.dual_residual(&g).unwrap() < 1e-14);
    }

    #[test]
    fn transform_examples() {
        let k = instance_k();
        let s = k.frame_operator();
        let two = k.transform(&OperatorOnHF::scaled_identity(2, C64::new(2.0, 0.0))).unwrap();
        let b = two.frame_bounds();
        assert!((b.lower - 4.0).abs() < 1e-13 && (b.upper - 8.0).abs() < 1e-13);
        assert!(two.frame_operator().max_abs_diff(&s.scale(C64::new(4.0, 0.0))) < 1e-13);

        let same = k.transform(&OperatorOnHF::identity(2)).unwrap();
        assert!((same.coords() - k.coords()).norm() < 1e-15);

        let swap = OperatorOnHF::new(DMatrix::from_row_slice(2, 2, &re(&[0.0, 1.0, 1.0, 0.0]))).unwrap();
        let swapped = k.transform(&swap).unwrap();
        let b = swapped.frame_bounds();
        assert!((b.lower - 1.0).abs() < 1e-13 && (b.upper - 2.0).abs() < 1e-13);
        let conj = swap.compose(&s).unwrap().compose(&swap.adjoint()).unwrap();
        assert!(swapped.frame_operator().max_abs_diff(&conj) < 1e-14);

        let singular = OperatorOnHF::from_diagonal(&re(&[1.0, 0.0]));
        assert!(matches!(k.transform(&singular), Err(FrameError::SingularOperator { .. })));
    }

    #[test]
    fn pseudo_inverse_examples() {
        let k = instance_k();
        let pinv = k.synthesis_pseudo_inverse().unwrap();
        let t = k.synthesis_matrix().weighted();
        let prod = &t * pinv.matrix();
        assert!((prod - DMatrix::<C64>::identity(2, 2)).norm() < 1e-10);

        let parseval = family(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let p = parseval.synthesis_pseudo_inverse().unwrap();
        assert!((p.matrix() - parseval.coords().adjoint()).norm() < 1e-14);

        assert!(family(&[[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]).synthesis_pseudo_inverse().is_err());
    }
}
