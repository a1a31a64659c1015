#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use nframes_core::random::ComplexGaussian;
use nframes_core::{build_quotient, AmbientSpace, AnchorTuple, FrameFamily, MeasureSpace, NVector, QuotientFrameSpace, C64};

pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

/// Determinant by the Leibniz permutation expansion.
pub fn leibniz_det(m: &[Vec<C64>]) -> C64 {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = C64::new(0.0, 0.0);
    permute(&mut perm, 0, m, &mut total);
    total
}

fn permute(perm: &mut Vec<usize>, k: usize, m: &[Vec<C64>], total: &mut C64) {
    let n = perm.len();
    if k == n {
        let mut inversions = 0;
        for i in 0..n {
            for j in i + 1..n {
                if perm[i] > perm[j] {
                    inversions += 1;
                }
            }
        }
        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        let prod: C64 = (0..n).map(|i| m[i][perm[i]]).product();
        *total += prod * sign;
        return;
    }
    for i in k..n {
        perm.swap(k, i);
        permute(perm, k + 1, m, total);
        perm.swap(k, i);
    }
}

/// Bordered Gram determinant evaluated by brute force.
pub fn gram_oracle(x: &[C64], y: &[C64], anchors: &[Vec<C64>]) -> C64 {
    let n = anchors.len() + 1;
    let row = |i: usize| if i == 0 { x } else { &anchors[i - 1][..] };
    let col = |j: usize| if j == 0 { y } else { &anchors[j - 1][..] };
    let m: Vec<Vec<C64>> = (0..n).map(|i| (0..n).map(|j| dot(row(i), col(j))).collect()).collect();
    leibniz_det(&m)
}

/// `det(Gram(a)) <P x, P y>` with P the projector off span(a), via classical Gram-Schmidt.
pub fn projection_oracle(x: &[C64], y: &[C64], anchors: &[Vec<C64>]) -> C64 {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for a in anchors {
        let mut r = a.clone();
        for _ in 0..2 {
            for b in &basis {
                let p = dot(&r, b);
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= p * bi;
                }
            }
        }
        let norm = dot(&r, &r).re.sqrt();
        basis.push(r.iter().map(|v| v / norm).collect());
    }
    let project = |v: &[C64]| {
        let mut r = v.to_vec();
        for b in &basis {
            let p = dot(&r, b);
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri -= p * bi;
            }
        }
        r
    };
    let k = anchors.len();
    let g: Vec<Vec<C64>> = (0..k).map(|i| (0..k).map(|j| dot(&anchors[i], &anchors[j])).collect()).collect();
    leibniz_det(&g) * dot(&project(x), &project(y))
}

pub fn random_vector(rng: &mut ComplexGaussian, d: usize) -> NVector {
    NVector::new(rng.vector(d))
}

pub fn random_anchors(rng: &mut ComplexGaussian, space: AmbientSpace) -> AnchorTuple {
    let vs = (0..space.order() - 1).map(|_| random_vector(rng, space.dim())).collect();
    AnchorTuple::new(space, vs).expect("gaussian anchors are independent")
}

pub fn random_space(rng: &mut ComplexGaussian, max_d: usize, max_n: usize) -> AmbientSpace {
    let n = rng.index(2, max_n + 1);
    let d = rng.index(n, max_d + 1);
    AmbientSpace::new(d, n).unwrap()
}

pub fn random_quotient(rng: &mut ComplexGaussian, space: AmbientSpace) -> Arc<QuotientFrameSpace> {
    Arc::new(build_quotient(&random_anchors(rng, space)).unwrap())
}

pub fn random_measure(rng: &mut ComplexGaussian, count: usize) -> Arc<MeasureSpace> {
    Arc::new(MeasureSpace::new((0..count).map(|_| 0.1 + 2.0 * rng.uniform()).collect()).unwrap())
}

/// Random family with at least q nodes, so it is a frame almost surely.
pub fn random_frame(rng: &mut ComplexGaussian, qs: &Arc<QuotientFrameSpace>, max_nodes: usize) -> FrameFamily {
    let q = qs.dim();
    let m = rng.index(q, max_nodes.max(q) + 1);
    let measure = random_measure(rng, m);
    let samples = rng.matrix(qs.space().dim(), m);
    FrameFamily::new(samples, measure, qs.clone()).unwrap()
}

/// Family whose coordinates all lie in a proper subspace of `H_F`.
pub fn deficient_family(rng: &mut ComplexGaussian, qs: &Arc<QuotientFrameSpace>, m: usize) -> FrameFamily {
    let q = qs.dim();
    let rank = if q > 1 { rng.index(0, q) } else { 0 };
    let left = rng.matrix(q, rank);
    let right = rng.matrix(rank, m);
    let coords = if rank == 0 { DMatrix::zeros(q, m) } else { left * right };
    FrameFamily::from_coords(coords, random_measure(rng, m), qs.clone()).unwrap()
}

pub fn as_vec(v: &NVector) -> Vec<C64> {
    v.coords().iter().copied().collect()
}

pub fn dvec(v: Vec<C64>) -> DVector<C64> {
    DVector::from_vec(v)
}
