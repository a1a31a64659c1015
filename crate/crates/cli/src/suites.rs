//! Named randomized theorem suites behind `nframes verify`.
//!
//! Trial `t` of a suite draws everything from its own ChaCha8 stream seeded
//! with `seed + t`, so the outcome is independent of the thread count. Each
//! check contributes `residual / tolerance` to the suite's worst ratio; a trial
//! fails when any ratio exceeds one.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use nframes_core::nip::{dot, n_inner_scale};
use nframes_core::random::ComplexGaussian;
use nframes_core::{
    build_quotient, dual_pair_bessel_check, kron_operator, l2_inner, multiplier_norm_bound, multiplier_operator,
    n_inner, n_norm, tensor_dual, tensor_frame, tensor_multiplier, AmbientSpace, AnchorTuple, CoefficientFunction,
    FrameFamily, MeasureSpace, MultiplierSymbol, NVector, OperatorOnHF, QuotientFrameSpace, C64, DEFAULT_FRAME_TOL,
    DUAL_TOL,
};

pub const SUITE_NAMES: [&str; 13] = [
    "nip-oracle",
    "nip-axioms",
    "frame-inequality",
    "synthesis",
    "surjectivity",
    "image",
    "dual",
    "multiplier",
    "tensor-bounds",
    "tensor-operator",
    "operator-tensor",
    "tensor-dual",
    "tensor-multiplier",
];

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub failures: usize,
    pub worst_ratio: f64,
    /// First few failing checks as `trial:check`.
    pub failed_checks: Vec<String>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

/// Per-trial accumulator.
#[derive(Debug, Default)]
pub struct Probe {
    worst: f64,
    failed: Vec<String>,
}

impl Probe {
    pub fn within(&mut self, id: &str, residual: f64, tolerance: f64) {
        let ratio = if residual.is_nan() { f64::INFINITY } else { residual / tolerance };
        self.worst = self.worst.max(if residual <= 0.0 { 0.0 } else { ratio });
        if !(residual <= tolerance) {
            self.failed.push(id.to_string());
        }
    }

    pub fn flag(&mut self, id: &str, ok: bool) {
        if !ok {
            self.worst = f64::INFINITY;
            self.failed.push(id.to_string());
        }
    }
}

/// Default trial count of each suite.
pub fn default_trials(name: &str) -> Option<usize> {
    Some(match name {
        "nip-oracle" | "nip-axioms" => 500,
        "frame-inequality" => 50,
        "synthesis" | "surjectivity" | "multiplier" => 200,
        "image" | "operator-tensor" => 100,
        "dual" | "tensor-dual" => 20,
        "tensor-bounds" | "tensor-operator" | "tensor-multiplier" => 50,
        _ => return None,
    })
}

fn trial_fn(name: &str) -> Option<fn(usize, &mut ComplexGaussian, &mut Probe)> {
    Some(match name {
        "nip-oracle" => nip_oracle,
        "nip-axioms" => nip_axioms,
        "frame-inequality" => frame_inequality,
        "synthesis" => synthesis,
        "surjectivity" => surjectivity,
        "image" => image,
        "dual" => dual,
        "multiplier" => multiplier,
        "tensor-bounds" => tensor_bounds,
        "tensor-operator" => tensor_operator,
        "operator-tensor" => operator_tensor,
        "tensor-dual" => tensor_duality,
        "tensor-multiplier" => tensor_multiplier_suite,
        _ => return None,
    })
}

/// Runs `trials` trials of the named suite. `None` for an unknown name.
pub fn run_suite(name: &str, trials: usize, seed: u64) -> Option<SuiteReport> {
    let trial = trial_fn(name)?;
    let outcomes: Vec<Probe> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ComplexGaussian::new(seed.wrapping_add(t as u64));
            let mut probe = Probe::default();
            trial(t, &mut rng, &mut probe);
            probe
        })
        .collect();
    let mut report =
        SuiteReport { suite: name.to_string(), trials, failures: 0, worst_ratio: 0.0, failed_checks: Vec::new() };
    for (t, p) in outcomes.into_iter().enumerate() {
        report.worst_ratio = report.worst_ratio.max(p.worst);
        if !p.failed.is_empty() {
            report.failures += 1;
            for id in p.failed {
                if report.failed_checks.len() < 10 {
                    report.failed_checks.push(format!("{t}:{id}"));
                }
            }
        }
    }
    Some(report)
}

// ---- generators ----

pub fn random_space(rng: &mut ComplexGaussian, max_d: usize, max_n: usize) -> AmbientSpace {
    let n = rng.index(2, max_n + 1);
    let d = rng.index(n, max_d + 1);
    AmbientSpace::new(d, n).expect("n >= 2, d >= n")
}

pub fn random_anchors(rng: &mut ComplexGaussian, space: AmbientSpace) -> AnchorTuple {
    let vs = (0..space.order() - 1).map(|_| NVector::new(rng.vector(space.dim()))).collect();
    AnchorTuple::new(space, vs).expect("gaussian anchors are independent")
}

pub fn random_quotient(rng: &mut ComplexGaussian, space: AmbientSpace) -> Arc<QuotientFrameSpace> {
    Arc::new(build_quotient(&random_anchors(rng, space)).expect("independent anchors"))
}

/// Quotient of dimension at most `max_q`.
fn small_quotient(rng: &mut ComplexGaussian, max_q: usize) -> Arc<QuotientFrameSpace> {
    let n = rng.index(2, 4);
    let d = rng.index(n, n + max_q);
    random_quotient(rng, AmbientSpace::new(d, n).expect("valid"))
}

pub fn random_measure(rng: &mut ComplexGaussian, count: usize) -> Arc<MeasureSpace> {
    Arc::new(MeasureSpace::new((0..count).map(|_| 0.1 + 2.0 * rng.uniform()).collect()).expect("positive weights"))
}

/// At least `q` Gaussian nodes: a frame almost surely.
pub fn random_frame(rng: &mut ComplexGaussian, qs: &Arc<QuotientFrameSpace>, max_nodes: usize) -> FrameFamily {
    let q = qs.dim();
    let m = rng.index(q, max_nodes.max(q) + 1);
    let measure = random_measure(rng, m);
    FrameFamily::new(rng.matrix(qs.space().dim(), m), measure, qs.clone()).expect("shapes match")
}

/// Coordinates confined to a proper subspace of `H_F`.
pub fn deficient_family(rng: &mut ComplexGaussian, qs: &Arc<QuotientFrameSpace>, m: usize) -> FrameFamily {
    let q = qs.dim();
    let rank = if q > 1 { rng.index(0, q) } else { 0 };
    let coords = if rank == 0 { DMatrix::zeros(q, m) } else { rng.matrix(q, rank) * rng.matrix(rank, m) };
    FrameFamily::from_coords(coords, random_measure(rng, m), qs.clone()).expect("shapes match")
}

fn partner(rng: &mut ComplexGaussian, f: &FrameFamily) -> FrameFamily {
    FrameFamily::new(rng.matrix(f.quotient().space().dim(), f.node_count()), f.measure().clone(), f.quotient().clone())
        .expect("shapes match")
}

fn random_operator(rng: &mut ComplexGaussian, q: usize) -> OperatorOnHF {
    OperatorOnHF::new(rng.matrix(q, q)).expect("square")
}

fn vector(rng: &mut ComplexGaussian, d: usize) -> NVector {
    NVector::new(rng.vector(d))
}

// ---- oracles ----

/// Leibniz expansion; fine for the n <= 4 matrices used here.
pub fn leibniz_det(m: &DMatrix<C64>) -> C64 {
    fn go(m: &DMatrix<C64>, perm: &mut Vec<usize>, k: usize, sign: f64, total: &mut C64) {
        let n = perm.len();
        if k == n {
            *total += (0..n).map(|i| m[(i, perm[i])]).product::<C64>() * sign;
            return;
        }
        for i in k..n {
            perm.swap(k, i);
            go(m, perm, k + 1, if i == k { sign } else { -sign }, total);
            perm.swap(k, i);
        }
    }
    let mut total = C64::new(0.0, 0.0);
    go(m, &mut (0..m.nrows()).collect(), 0, 1.0, &mut total);
    total
}

/// `det Gram(a) <P x, P y>` with `P` projecting off span(a) by Gram-Schmidt.
pub fn projection_oracle(x: &NVector, y: &NVector, anchors: &AnchorTuple) -> C64 {
    let mut basis: Vec<DVector<C64>> = Vec::new();
    let project = |v: &DVector<C64>, basis: &[DVector<C64>]| {
        let mut r = v.clone();
        for _ in 0..2 {
            for b in basis {
                r -= b * dot(&r, b);
            }
        }
        r
    };
    for a in anchors.vectors() {
        let r = project(a.coords(), &basis);
        let norm = r.norm();
        basis.push(r / C64::new(norm, 0.0));
    }
    leibniz_det(&anchors.gram()) * dot(&project(x.coords(), &basis), &project(y.coords(), &basis))
}

fn bordered_oracle(x: &NVector, y: &NVector, anchors: &AnchorTuple) -> C64 {
    let n = anchors.vectors().len() + 1;
    let row = |i: usize| if i == 0 { x } else { &anchors.vectors()[i - 1] };
    let col = |j: usize| if j == 0 { y } else { &anchors.vectors()[j - 1] };
    leibniz_det(&DMatrix::from_fn(n, n, |i, j| dot(row(i).coords(), col(j).coords())))
}

// ---- suites ----

fn nip_oracle(_: usize, rng: &mut ComplexGaussian, p: &mut Probe) {
    let space = random_space(rng, 16, 4);
    let anchors = random_anchors(rng, space);
    let (x, y) = (vector(rng, space.dim()), vector(rng, space.dim()));
    let got = n_inner(&x, &y, &anchors).expect("dims");
    let scale = n_inner_scale(&x, &y, &anchors);
    p.within("gram_vs_projection", (got - projection_oracle(&x, &y, &anchors)).norm(), 1e-10 * scale);
    p.within("gram_vs_leibniz", (got - bordered_oracle(&x, &y, &anchors)).norm(), 1e-10 * scale);
}

fn nip_axioms(_: usize, rng: &mut ComplexGaussian, p: &mut Probe) {
    let space = random_space(rng, 16, 4);
    let anchors = random_anchors(rng, space);
    let d = space.dim();
    let (x, y, z) = (vector(rng, d), vector(rng, d), vector(rng, d));
    let alpha = rng.complex();
    let ni = |u: &NVector, v: &NVector, a: &AnchorTuple| n_inner(u, v, a).expect("dims");
    let sc = |u: &NVector, v: &NVector| n_inner_scale(u, v, &anchors);

    let xx = ni(&x, &x, &anchors);
    p.within("nonnegative", (-xx.re).max(0.0), 1e-12 * sc(&x, &x));
    p.within("real_on_diagonal", xx.im.abs(), 1e-10 * sc(&x, &x));
    // a vector in the anchor span has zero norm
    let in_span = anchors.vectors()[0].scale(alpha);
    p.within("vanishes_on_span", ni(&in_span, &in_span, &anchors).norm(), 1e-10 * sc(&in_span, &in_span));

    let mut perm: Vec<usize> = (0..anchors.vectors().len()).collect();
    for i in (1..perm.len()).rev() {
        perm.swap(i, rng.index(0, i + 1));
    }
    let permuted = anchors.permuted(&perm).expect("valid permutation");
    p.within("anchor_permutation", (ni(&x, &y, &permuted) - ni(&x, &y, &anchors)).norm(), 1e-10 * sc(&x, &y));
    p.within("conjugate_symmetry", (ni(&x, &y, &anchors) - ni(&y, &x, &anchors).conj()).norm(), 1e-10 * sc(&x, &y));
    p.within(
        "homogeneity",
        (ni(&x.scale(alpha), &y, &anchors) - alpha * ni(&x, &y, &anchors)).norm(),
        1e-10 * alpha.norm() * sc(&x, &y),
    );
    let additive = ni(&x.add(&z), &y, &anchors) - ni(&x, &y, &anchors) - ni(&z, &y, &anchors);
    p.within("additivity", additive.norm(), 1e-10 * (sc(&x, &y) + sc(&z, &y)));
}

/// The two-node-plus-diagonal instance with bounds (1, 2).
pub fn instance_k() -> FrameFamily {
    let space = AmbientSpace::new(3, 2).expect("valid");
    let qs = Arc::new(build_quotient(&AnchorTuple::standard_tail(space)).expect("valid"));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let vectors = [NVector::from_real(&[1.0, 0.0, 0.0]), NVector::from_real(&[0.0, 1.0, 0.0]), NVector::from_real(&[h, h, 0.0])];
    FrameFamily::from_vectors(&vectors, Arc::new(MeasureSpace::counting(3).expect("nonempty")), qs).expect("valid")
}

fn frame_inequality(t: usize, rng: &mut ComplexGaussian, p: &mut Probe) {
    if t == 0 {
        let b = instance_k().frame_bounds();
        p.within("instance_k_bounds", (b.lower - 1.0).abs().max((b.upper - 2.0).abs()), 1e-9);
    }
    let space = random_space(rng, 16, 4);
    let qs = random_quotient(rng, space);
    let fam = random_frame(rng, &qs, 64);
    let b = fam.frame_bounds();
    for ev in fam.frame_operator().hermitian_eigenvalues() {
        p.within("sandwich", (b.lower - ev).max(ev - b.upper).max(0.0), 1e-10 * b.upper);
    }
    for _ in 0..1000 {
        let f = vector(rng, space.dim());
        let norm2 = n_norm(&f, qs.anchors()).expect("dims").powi(2);
        let phi = fam.analysis(&f).expect("dims");
        let energy = l2_inner(&phi, &phi).expect("same measure").re;
        let slack = 1e-9 * b.upper * norm2;
        p.within("lower_frame_inequality", (b.lower * norm2 - energy).max(0.0), slack);
        p.within("upper_frame_inequality", (energy - b.upper * norm2).max(0.0), slack);
    }
}

fn synthesis(_: usize, rng: &mut ComplexGaussian, p: &mut Probe) {
    let space = random_space(rng, 16, 4);
    let qs = random_quotient(rng, space);
    let m = rng_nodes(rng);
    let fam = if rng.uniform() < 0.2 { deficient_family(rng, &qs, m) } else { random_frame(rng, &qs, 64) };
    let b = fam.frame_bounds();
    p.within("norm_bound", (fam.synthesis_matrix().operator_norm() - b.upper.sqrt()).max(0.0), 1e-9);
    let f = vector(rng, space.dim());
    let phi = CoefficientFunction::new(rng.vector(fam.node_count()), fam.measure().clone()).expect("length");
    let t_phi = fam.synthesis(&phi).expect("measure");
    let lhs = n_inner(&t_phi, &f, qs.anchors()).expect("dims");
    let analysis = fam.analysis(&f).expect("dims");
    let rhs = l2_inner(&phi, &analysis).expect("measure");
    let scale = phi.l2_norm() * b.upper.sqrt() * n_norm(&f, qs.anchors()).expect("dims");
    p.within("adjoint_identity", (lhs - rhs).norm(), 1e-10 * scale.max(f64::MIN_POSITIVE));
}

fn rng_nodes(rng: &mut ComplexGaussian) -> usize {
    rng.index(1, 65)
}

fn surjectivity(t: usize, rng: &mut ComplexGaussian, p: &mut Probe) {
    let space = random_space(rng, 16, 4);
    let qs = random_quotient(rng, space);
    let deficient = t % 4 == 0;
    let m = rng_nodes(rng);
    let fam = if deficient { deficient_family(rng, &qs, m) } else { random_frame(rng, &qs, 64) };
    let v = fam.is_frame(DEFAULT_FRAME_TOL);
    p.flag("verdicts_agree", v.agree());
    p.flag("expected_verdict", v.is_frame != deficient);
}

fn image(_: usize, rng: &mut ComplexGaussian, p: &mut Probe) {
    let space = random_space(rng, 16, 4);
    let qs = random_quotient(rng, space);
    let fam = random_frame(rng, &qs, 64);
    let u = random_operator(rng, qs.dim());
    let img = fam.transform(&u).expect("gaussian operators are invertible");
    let want = u.compose(&fam.frame_operator()).expect("dims").compose(&u.adjoint()).expect("dims");
    p.within("conjugation", img.frame_operator().max_abs_diff(&want), 1e-10 * want.spectral_norm());
    let (b, bi) = (fam.frame_bounds(), img.frame_bounds());
    let u_norm = u.spectral_norm();
    let u_inv = u.inverse().expect("invertible").spectral_norm();
    let (lo, hi) = (b.lower / (u_inv * u_inv), b.upper * u_norm * u_norm);
    p.within("lower_containment", (lo - bi.lower).max(0.0), 1e-9 * hi);
    p.within("upper_containment", (bi.upper - hi).max(0.0), 1e-9 * hi);
}

fn dual(_: usize, rng: &mut ComplexGaussian, p: &mut Probe) {
    let space = random_space(rng, 16, 4);
    let qs = random_quotient(rng, space);
    let fam = random_frame(rng, &qs, 64);
    let g = fam.canonical_dual().expect("frame");
    let proj = qs.projector();
    for _ in 0..100 {
        let f = vector(rng, space.dim());
        let target = &proj * f.coords();
        let r = fam.reconstruct(&g, &f).expect("compatible");
        p.within("reconstruction", (r.coords() - &target).norm() / target.norm(), DUAL_TOL);
    }
}

fn multiplier(_: usize, rng: &mut ComplexGaussian, p: &mut Probe) {
    let space = random_space(rng, 16, 4);
    let qs = random_quotient(rng, space);
    let f = random_frame(rng, &qs, 64);
    let g = partner(rng, &f);
    let m = MultiplierSymbol::new(rng.vector(f.node_count()));
    let op = multiplier_operator(&m, &f, &g).expect("compatible");
    let bound = multiplier_norm_bound(&m, f.frame_bounds().upper, g.frame_bounds().upper).expect("bounds");
    p.within("norm_bound", (op.spectral_norm() - bound).max(0.0), 1e-9 * bound.max(1.0));
    let one = MultiplierSymbol::constant(C64::new(1.0, 0.0), f.node_count());
    let s = f.frame_operator();
    let m_one = multiplier_operator(&one, &f, &f).expect("compatible");
    p.within("unit_symbol_is_frame_operator", m_one.max_abs_diff(&s), 1e-12 * s.spectral_norm().max(1.0));
}

fn tensor_pair(rng: &mut ComplexGaussian, deficient: bool) -> (FrameFamily, FrameFamily) {
    let (qa, qb) = (small_quotient(rng, 8), small_quotient(rng, 8));
    let f1 = random_frame(rng, &qa, 8);
    let m = rng.index(1, 9);
    let f2 = if deficient && qb.dim() > 1 { deficient_family(rng, &qb, m) } else { random_frame(rng, &qb, 8) };
    (f1, f2)
}

fn tensor_bounds(t: usize, rng: &mut ComplexGaussian, p: &mut Probe) {
    let deficient = t % 5 == 0;
    let (f1, f2) = tensor_pair(rng, deficient);
    let tf = tensor_frame(&f1, &f2);
    let b = tf.bounds();
    let prod = tf.factor_bound_products();
    p.within("lower_is_product", (b.lower - prod.lower).abs(), 1e-9 * prod.upper);
    p.within("upper_is_product", (b.upper - prod.upper).abs(), 1e-9 * prod.upper);
    let factor_frames = f1.is_frame(DEFAULT_FRAME_TOL).is_frame && f2.is_frame(DEFAULT_FRAME_TOL).is_frame;
    p.flag("frame_iff_factors", tf.is_frame(DEFAULT_FRAME_TOL).is_frame == factor_frames);
    if !f2.is_frame(DEFAULT_FRAME_TOL).is_frame {
        p.within("deficient_lower_is_zero", b.lower, 1e-9 * b.upper);
    }
}

fn tensor_operator(_: usize, rng: &mut ComplexGaussian, p: &mut Probe) {
    let (f1, f2) = tensor_pair(rng, false);
    let tf = tensor_frame(&f1, &f2);
    let kron = tf.frame_operator();
    p.within("kron_vs_nodes", kron.max_abs_diff(&tf.frame_operator_by_nodes()), 1e-10 * kron.spectral_norm());
}

fn operator_tensor(_: usize, rng: &mut ComplexGaussian, p: &mut Probe) {
    let (qa, qb) = (rng.index(1, 9), rng.index(1, 9));
    let (q, qp) = (random_operator(rng, qa), random_operator(rng, qa));
    let (t, tp) = (random_operator(rng, qb), random_operator(rng, qb));
    let k = kron_operator(&q, &t);
    let scale = q.spectral_norm() * t.spectral_norm();
    p.within("norm_multiplicative", (k.spectral_norm() - scale).abs(), 1e-10 * scale);
    p.within("adjoint", k.adjoint().max_abs_diff(&kron_operator(&q.adjoint(), &t.adjoint())), 1e-10 * scale);
    let lhs = k.compose(&kron_operator(&qp, &tp)).expect("dims");
    let rhs = kron_operator(&q.compose(&qp).expect("dims"), &t.compose(&tp).expect("dims"));
    p.within("composition", lhs.max_abs_diff(&rhs), 1e-10 * scale * qp.spectral_norm() * tp.spectral_norm());
    let (qi, ti) = (q.inverse().expect("invertible"), t.inverse().expect("invertible"));
    let want = kron_operator(&qi, &ti);
    p.within("inverse", k.inverse().expect("invertible").max_abs_diff(&want), 1e-10 * want.spectral_norm() * scale);
    let (x, y) = (DVector::from_vec(rng.vector(qa)), DVector::from_vec(rng.vector(qb)));
    let acted = k.apply(&x.kronecker(&y)).expect("dims");
    let split = q.apply(&x).expect("dims").kronecker(&t.apply(&y).expect("dims"));
    p.within("simple_tensor_action", (acted - split).norm(), 1e-10 * scale * x.norm() * y.norm());
}

fn tensor_duality(_: usize, rng: &mut ComplexGaussian, p: &mut Probe) {
    let (f1, f2) = tensor_pair(rng, false);
    let (g1, g2) = (f1.canonical_dual().expect("frame"), f2.canonical_dual().expect("frame"));
    let td = match tensor_dual(&g1, &g2, &f1, &f2) {
        Ok(td) => td,
        Err(_) => return p.flag("tensor_dual", false),
    };
    let (d1, d2) = (f1.quotient().space().dim(), f2.quotient().space().dim());
    for _ in 0..20 {
        let (f, g) = (vector(rng, d1), vector(rng, d2));
        let target = td.frame.space().simple_tensor_coords(&f, &g).expect("dims");
        let flat = td.frame.reconstruct_simple(&td.dual, &f, &g).expect("compatible");
        p.within("reconstruction", (&flat - &target).norm() / target.norm(), DUAL_TOL);
    }
    p.within("operator_residual", td.tensor_residual, DUAL_TOL);
    let cert = dual_pair_bessel_check(&f1, &g1, &f2, &g2).expect("bessel");
    let a = td.frame.bounds().lower;
    p.within("certified_lower_bound", (cert.certified_frame.lower - a).max(0.0), 1e-9 * a);
    p.flag("certificate", cert.holds(1e-9));
}

fn tensor_multiplier_suite(_: usize, rng: &mut ComplexGaussian, p: &mut Probe) {
    let (f1, f2) = tensor_pair(rng, false);
    let (g1, g2) = (partner(rng, &f1), partner(rng, &f2));
    let m1 = MultiplierSymbol::new(rng.vector(f1.node_count()));
    let m2 = MultiplierSymbol::new(rng.vector(f2.node_count()));
    let kron = tensor_multiplier(&m1, &m2, &f1, &g1, &f2, &g2).expect("compatible");
    let nodes = tensor_frame(&f1, &f2).multiplier(&m1.outer(&m2), &tensor_frame(&g1, &g2)).expect("compatible");
    p.within("factorization", kron.max_abs_diff(&nodes), 1e-10 * kron.spectral_norm());
}
