mod common;

use common::*;
use nframes_core::random::ComplexGaussian;
use nframes_core::{build_quotient, n_inner, n_norm, AmbientSpace, C64};
use nframes_core::nip::n_inner_scale;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn gram_determinant_matches_brute_force(seed in any::<u64>()) {
        let mut rng = ComplexGaussian::new(seed);
        let space = random_space(&mut rng, 10, 4);
        let anchors = random_anchors(&mut rng, space);
        let x = random_vector(&mut rng, space.dim());
        let y = random_vector(&mut rng, space.dim());
        let a: Vec<Vec<C64>> = anchors.vectors().iter().map(as_vec).collect();
        let got = n_inner(&x, &y, &anchors).unwrap();
        let scale = n_inner_scale(&x, &y, &anchors);
        prop_assert!((got - gram_oracle(&as_vec(&x), &as_vec(&y), &a)).norm() <= 1e-11 * scale);
        prop_assert!((got - projection_oracle(&as_vec(&x), &as_vec(&y), &a)).norm() <= 1e-10 * scale);
    }

    #[test]
    fn quotient_invariants(seed in any::<u64>()) {
        let mut rng = ComplexGaussian::new(seed);
        let space = random_space(&mut rng, 12, 4);
        let anchors = random_anchors(&mut rng, space);
        let qs = build_quotient(&anchors).unwrap();
        let q = space.quotient_dim();
        prop_assert_eq!(qs.dim(), q);
        let b = qs.comp_basis();
        let gram = b.adjoint() * b;
        for i in 0..q {
            for j in 0..q {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((gram[(i, j)] - C64::new(want, 0.0)).norm() <= 1e-12);
            }
        }
        for a in anchors.vectors() {
            let overlap = b.adjoint() * a.coords();
            prop_assert!(overlap.norm() <= 1e-12 * a.norm());
        }
        prop_assert!(qs.gram_factor() > 0.0);

        let x = random_vector(&mut rng, space.dim());
        let y = random_vector(&mut rng, space.dim());
        let cx = qs.to_coords(&x).unwrap();
        let cy = qs.to_coords(&y).unwrap();
        let iso = cy.dotc(&cx);
        let scale = n_inner_scale(&x, &y, &anchors);
        prop_assert!((iso - n_inner(&x, &y, &anchors).unwrap()).norm() <= 1e-10 * scale);

        let c = dvec(rng.vector(q));
        let round = qs.to_coords(&qs.from_coords(&c).unwrap()).unwrap();
        prop_assert!((round - &c).norm() <= 1e-12 * c.norm().max(1.0));
    }

    #[test]
    fn n_norm_permutation_and_homogeneity(seed in any::<u64>()) {
        let mut rng = ComplexGaussian::new(seed);
        let space = AmbientSpace::new(rng.index(4, 9), 4).unwrap();
        let anchors = random_anchors(&mut rng, space);
        let x = random_vector(&mut rng, space.dim());
        let base = n_norm(&x, &anchors).unwrap();
        for perm in [[1, 0, 2], [2, 1, 0], [1, 2, 0]] {
            let p = anchors.permuted(&perm).unwrap();
            prop_assert!((n_norm(&x, &p).unwrap() - base).abs() <= 1e-10 * base.max(1e-300));
        }
        let alpha = rng.complex();
        let scaled = n_norm(&x.scale(alpha), &anchors).unwrap();
        prop_assert!((scaled - alpha.norm() * base).abs() <= 1e-10 * alpha.norm() * base);
        // an anchor itself (or any combination) has zero n-norm
        let dep = anchors.vectors()[0].scale(alpha).add(&anchors.vectors()[1]);
        let z = n_norm(&dep, &anchors).unwrap();
        prop_assert!(z <= 1e-6 * dep.norm() * anchors.vectors().iter().map(|a| a.norm()).product::<f64>());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn n_inner_product_axioms(seed in any::<u64>()) {
        let mut rng = ComplexGaussian::new(seed);
        let space = random_space(&mut rng, 16, 4);
        let anchors = random_anchors(&mut rng, space);
        let d = space.dim();
        let (x, y, z) = (random_vector(&mut rng, d), random_vector(&mut rng, d), random_vector(&mut rng, d));
        let alpha = rng.complex();
        let ip = |a: &nframes_core::NVector, b: &nframes_core::NVector| n_inner(a, b, &anchors).unwrap();
        let scale = n_inner_scale(&x, &y, &anchors).max(n_inner_scale(&z, &y, &anchors));

        let xx = ip(&x, &x);
        prop_assert!(xx.re >= -1e-12 * n_inner_scale(&x, &x, &anchors));
        prop_assert!((ip(&x, &y) - ip(&y, &x).conj()).norm() <= 1e-10 * scale);
        prop_assert!((ip(&x.scale(alpha), &y) - alpha * ip(&x, &y)).norm() <= 1e-10 * scale * alpha.norm());
        prop_assert!((ip(&x.add(&z), &y) - ip(&x, &y) - ip(&z, &y)).norm() <= 1e-10 * scale * 4.0);
        let k = space.order() - 1;
        let mut perm: Vec<usize> = (0..k).rev().collect();
        if k > 2 { perm.swap(0, 1); }
        let permuted = anchors.permuted(&perm).unwrap();
        prop_assert!((n_inner(&x, &y, &permuted).unwrap() - ip(&x, &y)).norm() <= 1e-10 * scale);
    }
}

#[test]
fn degenerate_anchor_is_rejected_by_quotient() {
    let space = AmbientSpace::new(4, 3).unwrap();
    let a = nframes_core::NVector::from_real(&[1.0, 2.0, 0.0, 0.0]);
    let res = nframes_core::AnchorTuple::new(space, vec![a.clone(), a.scale(C64::new(0.0, 3.0))]);
    assert!(res.is_err());
}
