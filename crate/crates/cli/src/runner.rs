//! Executes the operations listed in a config and assembles the report.
//!
//! Probe vectors for operation `k` are drawn from a ChaCha8 stream seeded with
//! `seed + 1000 + k` (seed 0 when the config has none), so every report is a
//! pure function of the effective config.

use nalgebra::DVector;
use rayon::prelude::*;
use serde_json::{json, Value};

use nframes_core::random::ComplexGaussian;
use nframes_core::{
    dual_pair_bessel_check, multiplier_norm_bound, multiplier_operator, n_norm, tensor_dual, tensor_frame,
    FrameBounds, FrameError, FrameFamily, MultiplierSymbol, NVector, OperatorOnHF, TensorFrameFamily, C64,
};

use crate::config::{ExperimentConfig, Operation, Partner, SpectrumRequest, SymbolSpec};
use crate::error::CliError;
use crate::report::{sha256_hex, Check, Meta, OperationReport, Report};

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

/// Applies overrides and validates.
pub fn prepare(mut cfg: ExperimentConfig, overrides: Overrides) -> Result<ExperimentConfig, CliError> {
    if let Some(seed) = overrides.seed {
        cfg.seed = Some(seed);
    }
    if let Some(tol) = overrides.tol {
        cfg.tolerances.frame = tol;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn probe_rng(cfg: &ExperimentConfig, index: usize) -> ComplexGaussian {
    ComplexGaussian::new(cfg.seed.unwrap_or(0).wrapping_add(1000 + index as u64))
}

fn digest(value: &impl serde::Serialize) -> String {
    let bytes = serde_json::to_vec(value).expect("serializable");
    sha256_hex(&bytes)[..16].to_string()
}

fn bounds_json(b: &FrameBounds) -> Value {
    json!({ "lower": b.lower, "upper": b.upper })
}

fn error_report(name: &str, inputs_digest: String, err: &FrameError) -> OperationReport {
    let mut result = json!({ "error": err.to_string() });
    if let FrameError::SingularFrame { lambda_min, lambda_max } = err {
        result["lambda_min"] = json!(lambda_min);
        result["lambda_max"] = json!(lambda_max);
    }
    OperationReport { name: name.to_string(), inputs_digest, result, checks: vec![Check::flag("well_posed", false)] }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let family = cfg.build_family()?;
    let space = family.quotient().space();
    let meta = Meta {
        tool: "nframes".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: sha256_hex(&serde_json::to_vec(cfg).expect("serializable")),
        seed: cfg.seed,
        tolerances: cfg.tolerances,
        ambient_dim: space.dim(),
        order: space.order(),
        quotient_dim: space.quotient_dim(),
        node_count: family.node_count(),
    };
    let mut operations = Vec::with_capacity(cfg.operations.len());
    for (index, op) in cfg.operations.iter().enumerate() {
        let inputs_digest = digest(&(op, cfg.seed, index));
        let mut rng = probe_rng(cfg, index);
        let outcome = match op {
            Operation::Bounds => Ok(bounds_op(cfg, &family, &mut rng)),
            Operation::Dual => dual_op(cfg, &family, &mut rng),
            Operation::Multiplier { symbol, partner } => multiplier_op(&family, symbol, *partner, &mut rng),
            Operation::Transform { operator } => {
                let u = operator.build(family.quotient().dim(), &mut rng)?;
                transform_op(cfg, &family, &u)
            }
            Operation::Tensor { with } => {
                let mut w = (**with).clone();
                if w.seed.is_none() {
                    w.seed = cfg.seed.map(|s| s.wrapping_add(1));
                }
                let right = w.build()?;
                Ok(tensor_op(cfg, &family, &right, &mut rng))
            }
        };
        operations.push(match outcome {
            Ok((result, checks)) => OperationReport { name: op.name().into(), inputs_digest, result, checks },
            Err(e) => error_report(op.name(), inputs_digest, &e),
        });
    }
    Ok(Report { meta, operations })
}

fn random_vectors(rng: &mut ComplexGaussian, dim: usize, count: usize) -> Vec<NVector> {
    (0..count).map(|_| NVector::new(rng.vector(dim))).collect()
}

/// Largest relative violation of `A ||f||^2 <= sum mu |<f, F>|^2 <= B ||f||^2`.
fn frame_inequality_violation(family: &FrameFamily, bounds: &FrameBounds, probes: &[NVector]) -> f64 {
    let anchors = family.quotient().anchors();
    probes
        .par_iter()
        .map(|f| {
            let norm2 = n_norm(f, anchors).expect("dimension checked").powi(2);
            let energy = family.analysis(f).expect("dimension checked").l2_norm().powi(2);
            let scale = bounds.upper * norm2;
            if scale <= 0.0 {
                return 0.0;
            }
            (bounds.lower * norm2 - energy).max(energy - bounds.upper * norm2).max(0.0) / scale
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(0.0, f64::max)
}

fn sandwich_violation(spectrum: &[f64], bounds: &FrameBounds) -> f64 {
    if bounds.upper <= 0.0 {
        return 0.0;
    }
    spectrum
        .iter()
        .map(|&ev| (bounds.lower - ev).max(ev - bounds.upper).max(0.0) / bounds.upper)
        .fold(0.0, f64::max)
}

type OpOutcome = Result<(Value, Vec<Check>), FrameError>;

fn bounds_op(cfg: &ExperimentConfig, family: &FrameFamily, rng: &mut ComplexGaussian) -> (Value, Vec<Check>) {
    let verdict = family.is_frame(cfg.tolerances.frame);
    let spectrum = family.frame_operator().hermitian_eigenvalues();
    let bounds = verdict.bounds;
    let probes = random_vectors(rng, family.quotient().space().dim(), cfg.trials);
    let t_norm = family.synthesis_matrix().operator_norm();
    let result = json!({
        "lower": bounds.lower,
        "upper": bounds.upper,
        "spectrum": spectrum,
        "is_frame": verdict.is_frame,
        "surjective": verdict.surjective,
        "tight": bounds.is_tight(cfg.tolerances.check),
        "synthesis_norm": t_norm,
    });
    let checks = vec![
        Check::within("frame_inequality", frame_inequality_violation(family, &bounds, &probes), cfg.tolerances.check),
        Check::within("sandwich", sandwich_violation(&spectrum, &bounds), 1e-10),
        Check::within("synthesis_norm", (t_norm - bounds.upper.sqrt()).max(0.0), cfg.tolerances.check),
        Check::flag("frame_test_agreement", verdict.agree()),
    ];
    (result, checks)
}

fn max_reconstruction_residual(family: &FrameFamily, dual: &FrameFamily, probes: &[NVector]) -> f64 {
    let proj = family.quotient().projector();
    probes
        .par_iter()
        .map(|f| {
            let target: DVector<C64> = &proj * f.coords();
            let r = family.reconstruct(dual, f).expect("compatible");
            (r.coords() - &target).norm() / target.norm().max(f64::MIN_POSITIVE)
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(0.0, f64::max)
}

fn dual_op(cfg: &ExperimentConfig, family: &FrameFamily, rng: &mut ComplexGaussian) -> OpOutcome {
    let dual = family.canonical_dual()?;
    let probes = random_vectors(rng, family.quotient().space().dim(), cfg.trials);
    let probe_residual = max_reconstruction_residual(family, &dual, &probes);
    let operator_residual = family.dual_residual(&dual)?;
    let (b, bd) = (family.frame_bounds(), dual.frame_bounds());
    let reciprocity = (bd.upper * b.lower - 1.0).abs().max((bd.lower * b.upper - 1.0).abs());
    let result = json!({
        "dual_bounds": bounds_json(&bd),
        "operator_residual": operator_residual,
        "max_probe_residual": probe_residual,
        "dual_spectrum": dual.frame_operator().hermitian_eigenvalues(),
    });
    let checks = vec![
        Check::within("reconstruction", probe_residual, cfg.tolerances.dual),
        Check::within("operator_residual", operator_residual, cfg.tolerances.dual),
        Check::within("dual_bounds_reciprocal", reciprocity, cfg.tolerances.dual),
    ];
    Ok((result, checks))
}

fn partner_family(family: &FrameFamily, partner: Partner) -> Result<FrameFamily, FrameError> {
    match partner {
        Partner::SelfFamily => Ok(family.clone()),
        Partner::CanonicalDual => family.canonical_dual(),
    }
}

pub(crate) fn build_multiplier(
    family: &FrameFamily,
    symbol: &SymbolSpec,
    partner: Partner,
    rng: &mut ComplexGaussian,
) -> Result<(MultiplierSymbol, FrameFamily, OperatorOnHF), FrameError> {
    let m = MultiplierSymbol::new(symbol.build(family.node_count(), rng));
    let g = partner_family(family, partner)?;
    let op = multiplier_operator(&m, family, &g)?;
    Ok((m, g, op))
}

fn multiplier_op(family: &FrameFamily, symbol: &SymbolSpec, partner: Partner, rng: &mut ComplexGaussian) -> OpOutcome {
    let (m, g, op) = build_multiplier(family, symbol, partner, rng)?;
    let (bf, bg) = (family.frame_bounds().upper, g.frame_bounds().upper);
    let bound = multiplier_norm_bound(&m, bf, bg)?;
    let norm = op.spectral_norm();
    let scale = norm.max(1.0);
    let hermitian = op.hermitian_defect() <= 1e-12 * scale;
    let mut result = json!({
        "sup_norm": m.sup_norm(),
        "bessel_bounds": [bf, bg],
        "norm": norm,
        "norm_bound": bound,
        "hermitian": hermitian,
        "singular_values": op.singular_values(),
    });
    if hermitian {
        result["spectrum"] = json!(op.hermitian_eigenvalues());
    }
    let adjoint = multiplier_operator(&m.conj(), &g, family)?;
    let mut checks = vec![
        Check::within("norm_bound", (norm - bound).max(0.0), 1e-9 * bound.max(1.0)),
        Check::within("adjoint", op.adjoint().max_abs_diff(&adjoint), 1e-12 * scale),
    ];
    let is_one = m.values().iter().all(|v| *v == C64::new(1.0, 0.0));
    if is_one && partner == Partner::SelfFamily {
        let s = family.frame_operator();
        checks.push(Check::within("recovers_frame_operator", op.max_abs_diff(&s), 1e-12 * s.spectral_norm().max(1.0)));
    }
    Ok((result, checks))
}

fn transform_op(cfg: &ExperimentConfig, family: &FrameFamily, u: &OperatorOnHF) -> OpOutcome {
    let image = family.transform(u)?;
    let s = family.frame_operator();
    let want = u.compose(&s)?.compose(&u.adjoint())?;
    let got = image.frame_operator();
    let conj_residual = got.max_abs_diff(&want) / want.spectral_norm().max(f64::MIN_POSITIVE);
    let b = family.frame_bounds();
    let bi = image.frame_bounds();
    let u_norm = u.spectral_norm();
    let u_inv_norm = u.inverse()?.spectral_norm();
    let predicted = FrameBounds { lower: b.lower / (u_inv_norm * u_inv_norm), upper: b.upper * u_norm * u_norm };
    let containment = ((predicted.lower - bi.lower) / predicted.upper)
        .max((bi.upper - predicted.upper) / predicted.upper)
        .max(0.0);
    let result = json!({
        "bounds": bounds_json(&bi),
        "spectrum": got.hermitian_eigenvalues(),
        "operator_norm": u_norm,
        "inverse_norm": u_inv_norm,
        "predicted_bounds": bounds_json(&predicted),
    });
    let checks = vec![
        Check::within("frame_operator_conjugation", conj_residual, 1e-10),
        Check::within("bounds_containment", containment, cfg.tolerances.check),
    ];
    Ok((result, checks))
}

fn tensor_op(
    cfg: &ExperimentConfig,
    left: &FrameFamily,
    right: &FrameFamily,
    rng: &mut ComplexGaussian,
) -> (Value, Vec<Check>) {
    let t = tensor_frame(left, right);
    let kron = t.frame_operator();
    let nodes = t.frame_operator_by_nodes();
    let norm = kron.spectral_norm().max(f64::MIN_POSITIVE);
    let spectrum = kron.hermitian_eigenvalues();
    let bounds = FrameBounds::from_spectrum(&spectrum);
    let products = t.factor_bound_products();
    let verdict = t.is_frame(cfg.tolerances.frame);
    let factors_frames =
        left.is_frame(cfg.tolerances.frame).is_frame && right.is_frame(cfg.tolerances.frame).is_frame;
    let product_gap = ((bounds.lower - products.lower).abs()).max((bounds.upper - products.upper).abs())
        / products.upper.max(f64::MIN_POSITIVE);
    let mut result = json!({
        "dim": t.dim(),
        "node_count": t.measure().node_count(),
        "factor_bounds": [bounds_json(&left.frame_bounds()), bounds_json(&right.frame_bounds())],
        "bounds": bounds_json(&bounds),
        "factor_products": bounds_json(&products),
        "is_frame": verdict.is_frame,
        "spectrum": spectrum,
    });
    let mut checks = vec![
        Check::within("kron_vs_nodes", kron.max_abs_diff(&nodes) / norm, 1e-10),
        Check::within("bounds_are_products", product_gap, cfg.tolerances.check),
        Check::within("sandwich", sandwich_violation(&spectrum, &products), 1e-10),
        Check::flag("frame_iff_factors", verdict.is_frame == factors_frames),
    ];
    if factors_frames {
        match dual_checks(cfg, &t, rng) {
            Ok((value, mut extra)) => {
                result["dual"] = value;
                checks.append(&mut extra);
            }
            Err(e) => {
                result["dual"] = json!({ "error": e.to_string() });
                checks.push(Check::flag("canonical_dual_tensor", false));
            }
        }
    }
    (result, checks)
}

fn dual_checks(cfg: &ExperimentConfig, t: &TensorFrameFamily, rng: &mut ComplexGaussian) -> OpOutcome {
    let (f1, f2) = (t.left(), t.right());
    let (g1, g2) = (f1.canonical_dual()?, f2.canonical_dual()?);
    let td = tensor_dual(&g1, &g2, f1, f2)?;
    let cert = dual_pair_bessel_check(f1, &g1, f2, &g2)?;
    let d1 = f1.quotient().space().dim();
    let d2 = f2.quotient().space().dim();
    let probes: Vec<(NVector, NVector)> =
        (0..cfg.trials).map(|_| (NVector::new(rng.vector(d1)), NVector::new(rng.vector(d2)))).collect();
    let (recon, fubini) = probes
        .par_iter()
        .map(|(f, g)| {
            let target = td.frame.space().simple_tensor_coords(f, g).expect("dims");
            let flat = td.frame.reconstruct_simple(&td.dual, f, g).expect("compatible");
            let iterated = td.frame.reconstruct_simple_iterated(&td.dual, f, g).expect("compatible");
            let scale = target.norm().max(f64::MIN_POSITIVE);
            ((&flat - &target).norm() / scale, (&flat - &iterated).norm() / scale)
        })
        .collect::<Vec<(f64, f64)>>()
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (f64::max(a, x), f64::max(b, y)));
    let value = json!({
        "tensor_residual": td.tensor_residual,
        "max_probe_residual": recon,
        "certified_frame_bounds": bounds_json(&cert.certified_frame),
        "frame_bounds": bounds_json(&cert.frame_bounds),
    });
    let checks = vec![
        Check::within("canonical_dual_tensor", recon.max(td.tensor_residual), cfg.tolerances.dual),
        Check::within("fubini_reconstruction", fubini, 1e-10),
        Check::flag("dual_pair_certificate", cert.holds(cfg.tolerances.check)),
    ];
    Ok((value, checks))
}

/// Eigenvalues (ascending) of the operator named by the config's `spectrum` request.
pub fn spectrum(cfg: &ExperimentConfig) -> Result<Vec<f64>, CliError> {
    let request = cfg
        .spectrum
        .as_ref()
        .ok_or_else(|| CliError::Validation("config has no `spectrum` request".into()))?;
    let family = cfg.build_family()?;
    let runtime = |e: FrameError| CliError::Runtime(e.to_string());
    let op = match request {
        SpectrumRequest::Frame => family.frame_operator(),
        SpectrumRequest::DualFrame => family.canonical_dual().map_err(runtime)?.frame_operator(),
        SpectrumRequest::Identity => OperatorOnHF::identity(family.quotient().dim()),
        SpectrumRequest::Multiplier => {
            let (index, symbol, partner) = cfg
                .operations
                .iter()
                .enumerate()
                .find_map(|(i, o)| match o {
                    Operation::Multiplier { symbol, partner } => Some((i, symbol, *partner)),
                    _ => None,
                })
                .expect("validated");
            let mut rng = probe_rng(cfg, index);
            let (_, _, op) = build_multiplier(&family, symbol, partner, &mut rng).map_err(runtime)?;
            if op.hermitian_defect() > 1e-12 * op.spectral_norm().max(1.0) {
                return Err(CliError::Runtime("multiplier is not Hermitian; its spectrum is not real".into()));
            }
            op
        }
        SpectrumRequest::TensorFrame => {
            let with = cfg
                .operations
                .iter()
                .find_map(|o| match o {
                    Operation::Tensor { with } => Some(with),
                    _ => None,
                })
                .expect("validated");
            let mut w = (**with).clone();
            if w.seed.is_none() {
                w.seed = cfg.seed.map(|s| s.wrapping_add(1));
            }
            tensor_frame(&family, &w.build()?).frame_operator()
        }
    };
    Ok(op.hermitian_eigenvalues())
}

/// `index,eigenvalue` rows with 17 significant digits.
pub fn spectrum_csv(eigenvalues: &[f64]) -> String {
    let mut out = String::from("index,eigenvalue\n");
    for (i, ev) in eigenvalues.iter().enumerate() {
        out.push_str(&format!("{i},{ev:.16e}\n"));
    }
    out
}
