mod common;

use common::*;
use nframes_core::random::ComplexGaussian;
use nframes_core::{
    l2_inner, multiplier_norm_bound, multiplier_operator, n_inner, n_norm, CoefficientFunction, MultiplierSymbol,
    OperatorOnHF, C64, DEFAULT_FRAME_TOL,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frame_inequality_and_sandwich(seed in any::<u64>()) {
        let mut rng = ComplexGaussian::new(seed);
        let space = random_space(&mut rng, 8, 3);
        let qs = random_quotient(&mut rng, space);
        let fam = random_frame(&mut rng, &qs, 16);
        let b = fam.frame_bounds();
        for ev in fam.frame_operator().hermitian_eigenvalues() {
            prop_assert!(ev >= b.lower - 1e-10 * b.upper && ev <= b.upper + 1e-10 * b.upper);
        }
        for _ in 0..20 {
            let f = random_vector(&mut rng, space.dim());
            let norm2 = n_norm(&f, qs.anchors()).unwrap().powi(2);
            let phi = fam.analysis(&f).unwrap();
            let energy = l2_inner(&phi, &phi).unwrap().re;
            prop_assert!(b.lower * norm2 <= energy * (1.0 + 1e-9));
            prop_assert!(energy <= b.upper * norm2 * (1.0 + 1e-9));
        }
    }

    #[test]
    fn analysis_is_gram_determinant_and_adjoint_of_synthesis(seed in any::<u64>()) {
        let mut rng = ComplexGaussian::new(seed);
        let space = random_space(&mut rng, 7, 3);
        let qs = random_quotient(&mut rng, space);
        let fam = random_frame(&mut rng, &qs, 12);
        let f = random_vector(&mut rng, space.dim());
        let phi = fam.analysis(&f).unwrap();
        for i in 0..fam.node_count() {
            let direct = n_inner(&f, &fam.sample(i), qs.anchors()).unwrap();
            let scale = nframes_core::nip::n_inner_scale(&f, &fam.sample(i), qs.anchors());
            prop_assert!((phi.values()[i] - direct).norm() <= 1e-10 * scale);
        }
        let psi = CoefficientFunction::new(rng.vector(fam.node_count()), fam.measure().clone()).unwrap();
        let t_psi = fam.synthesis(&psi).unwrap();
        let lhs = n_inner(&t_psi, &f, qs.anchors()).unwrap();
        let rhs = l2_inner(&psi, &phi).unwrap();
        let scale = psi.l2_norm() * phi.l2_norm().max(1.0) * fam.frame_bounds().upper.sqrt() + 1.0;
        prop_assert!((lhs - rhs).norm() <= 1e-10 * scale.max(rhs.norm()));
        // synthesis norm never exceeds sqrt(B), and the Bessel inequality uses it
        let t_norm = fam.synthesis_matrix().operator_norm();
        prop_assert!(t_norm <= fam.frame_bounds().upper.sqrt() + 1e-9);
        let norm2 = n_norm(&f, qs.anchors()).unwrap().powi(2);
        prop_assert!(phi.l2_norm().powi(2) <= t_norm * t_norm * norm2 * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn frame_test_agrees_with_surjectivity(seed in any::<u64>(), deficient in any::<bool>()) {
        let mut rng = ComplexGaussian::new(seed);
        let space = random_space(&mut rng, 8, 3);
        let qs = random_quotient(&mut rng, space);
        let fam = if deficient {
            deficient_family(&mut rng, &qs, 10)
        } else {
            random_frame(&mut rng, &qs, 10)
        };
        let v = fam.is_frame(DEFAULT_FRAME_TOL);
        prop_assert!(v.agree());
        prop_assert_eq!(v.is_frame, !deficient);
    }

    #[test]
    fn canonical_dual_reconstructs(seed in any::<u64>()) {
        let mut rng = ComplexGaussian::new(seed);
        let space = random_space(&mut rng, 8, 3);
        let qs = random_quotient(&mut rng, space);
        let fam = random_frame(&mut rng, &qs, 14);
        let dual = fam.canonical_dual().unwrap();
        let proj = qs.projector();
        for _ in 0..10 {
            let f = random_vector(&mut rng, space.dim());
            let rep = &proj * f.coords();
            let r = fam.reconstruct(&dual, &f).unwrap();
            prop_assert!((r.coords() - &rep).norm() <= 1e-8 * rep.norm());
        }
        // dual bounds are the reciprocals
        let (b, bd) = (fam.frame_bounds(), dual.frame_bounds());
        prop_assert!((bd.upper * b.lower - 1.0).abs() <= 1e-8);
        prop_assert!((bd.lower * b.upper - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn pseudo_inverse_is_right_inverse(seed in any::<u64>()) {
        let mut rng = ComplexGaussian::new(seed);
        let space = random_space(&mut rng, 8, 3);
        let qs = random_quotient(&mut rng, space);
        let fam = random_frame(&mut rng, &qs, 14);
        let pinv = fam.synthesis_pseudo_inverse().unwrap();
        let c = dvec(rng.vector(qs.dim()));
        let phi = pinv.apply(&c).unwrap();
        let back = fam.synthesis_coords(&phi).unwrap();
        prop_assert!((back - &c).norm() <= 1e-10 * c.norm());
    }

    #[test]
    fn image_under_invertible_operator(seed in any::<u64>()) {
        let mut rng = ComplexGaussian::new(seed);
        let space = random_space(&mut rng, 7, 3);
        let qs = random_quotient(&mut rng, space);
        let fam = random_frame(&mut rng, &qs, 12);
        let u = OperatorOnHF::new(rng.matrix(qs.dim(), qs.dim())).unwrap();
        prop_assume!(u.is_invertible());
        let img = fam.transform(&u).unwrap();
        let want = u.compose(&fam.frame_operator()).unwrap().compose(&u.adjoint()).unwrap();
        prop_assert!(img.frame_operator().max_abs_diff(&want) <= 1e-10 * want.spectral_norm());
        let b = fam.frame_bounds();
        let bi = img.frame_bounds();
        let u_norm = u.spectral_norm();
        let u_inv_norm = u.inverse().unwrap().spectral_norm();
        prop_assert!(bi.lower >= b.lower / (u_inv_norm * u_inv_norm) * (1.0 - 1e-9));
        prop_assert!(bi.upper <= b.upper * u_norm * u_norm * (1.0 + 1e-9));
    }

    #[test]
    fn multiplier_bound_linearity_and_adjoint(seed in any::<u64>()) {
        let mut rng = ComplexGaussian::new(seed);
        let space = random_space(&mut rng, 7, 3);
        let qs = random_quotient(&mut rng, space);
        let f = random_frame(&mut rng, &qs, 12);
        let g = nframes_core::FrameFamily::new(rng.matrix(space.dim(), f.node_count()), f.measure().clone(), qs.clone()).unwrap();
        let m = MultiplierSymbol::new(rng.vector(f.node_count()));
        let m2 = MultiplierSymbol::new(rng.vector(f.node_count()));
        let op = multiplier_operator(&m, &f, &g).unwrap();
        let bound = multiplier_norm_bound(&m, f.frame_bounds().upper, g.frame_bounds().upper).unwrap();
        prop_assert!(op.spectral_norm() <= bound + 1e-9 * bound.max(1.0));

        let sum = multiplier_operator(&m.add(&m2).unwrap(), &f, &g).unwrap();
        let parts = op.add(&multiplier_operator(&m2, &f, &g).unwrap()).unwrap();
        prop_assert!(sum.max_abs_diff(&parts) <= 1e-12 * sum.spectral_norm().max(1.0));

        let adj = multiplier_operator(&m.conj(), &g, &f).unwrap();
        prop_assert!(op.adjoint().max_abs_diff(&adj) <= 1e-12 * op.spectral_norm().max(1.0));

        let one = MultiplierSymbol::constant(C64::new(1.0, 0.0), f.node_count());
        let s = multiplier_operator(&one, &f, &f).unwrap();
        prop_assert!(s.max_abs_diff(&f.frame_operator()) <= 1e-12 * s.spectral_norm());
    }

    #[test]
    fn counting_measure_matches_discrete_sum(seed in any::<u64>()) {
        let mut rng = ComplexGaussian::new(seed);
        let space = random_space(&mut rng, 6, 3);
        let qs = random_quotient(&mut rng, space);
        let m = qs.dim() + 3;
        let samples = rng.matrix(space.dim(), m);
        let fam = nframes_core::FrameFamily::new(
            samples,
            std::sync::Arc::new(nframes_core::MeasureSpace::counting(m).unwrap()),
            qs.clone(),
        ).unwrap();
        let f = random_vector(&mut rng, space.dim());
        let discrete: f64 = (0..m).map(|i| n_inner(&f, &fam.sample(i), qs.anchors()).unwrap().norm_sqr()).sum();
        let phi = fam.analysis(&f).unwrap();
        let cont = l2_inner(&phi, &phi).unwrap().re;
        prop_assert!((discrete - cont).abs() <= 1e-9 * discrete.max(1.0));
    }
}
