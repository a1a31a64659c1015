//! Experiment configuration (JSON) and its translation into frame families.
//!
//! Complex numbers are written as `[re, im]`. Random draws come from one
//! ChaCha8 stream seeded with `seed`: random anchors first, then random
//! family samples.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use nframes_core::random::ComplexGaussian;
use nframes_core::{
    build_quotient, AmbientSpace, AnchorTuple, FrameFamily, MeasureSpace, NVector, OperatorOnHF, C64,
    DEFAULT_FRAME_TOL, DUAL_TOL,
};

use crate::error::CliError;

pub type ComplexPair = [f64; 2];

pub fn to_c64(p: &ComplexPair) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub ambient: Ambient,
    pub anchors: AnchorSpec,
    pub measure: MeasureSpec,
    pub family: FamilySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Random probe vectors per check.
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub operations: Vec<Operation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumRequest>,
}

fn default_trials() -> usize {
    100
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ambient {
    pub dim: usize,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorSpec {
    Preset(AnchorPreset),
    Explicit(Vec<Vec<ComplexPair>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorPreset {
    /// The last `n - 1` standard basis vectors.
    StandardTail,
    /// Complex Gaussian anchors from the seeded stream.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureSpec {
    Weights(Vec<f64>),
    Uniform(UniformGrid),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformGrid {
    pub count: usize,
    #[serde(default = "one")]
    pub weight: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilySpec {
    /// One ambient vector per node.
    Explicit(Vec<Vec<ComplexPair>>),
    /// Independent complex Gaussian entries.
    RandomGaussian {},
    /// `F(w_k)_j = exp(2 pi i w_k j / d)` at grid positions `w_k`.
    Fourier {},
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative spectral gap for the frame test.
    #[serde(default = "default_frame_tol")]
    pub frame: f64,
    /// Slack for inequality and identity checks.
    #[serde(default = "default_check_tol")]
    pub check: f64,
    /// Reconstruction residual for dual pairs.
    #[serde(default = "default_dual_tol")]
    pub dual: f64,
}

fn default_frame_tol() -> f64 {
    DEFAULT_FRAME_TOL
}

fn default_check_tol() -> f64 {
    1e-9
}

fn default_dual_tol() -> f64 {
    DUAL_TOL
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { frame: default_frame_tol(), check: default_check_tol(), dual: default_dual_tol() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Operation {
    Bounds,
    Dual,
    Multiplier {
        symbol: SymbolSpec,
        #[serde(default)]
        partner: Partner,
    },
    Transform {
        operator: OperatorSpec,
    },
    Tensor {
        with: Box<FactorConfig>,
    },
}

impl Operation {
    pub fn name(&self) -> &'static str {
        match self {
            Operation::Bounds => "bounds",
            Operation::Dual => "dual",
            Operation::Multiplier { .. } => "multiplier",
            Operation::Transform { .. } => "transform",
            Operation::Tensor { .. } => "tensor",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolSpec {
    Constant(ComplexPair),
    Values(Vec<ComplexPair>),
    Random {},
}

/// Second family `G` of a multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Partner {
    #[default]
    #[serde(rename = "self")]
    SelfFamily,
    CanonicalDual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorSpec {
    Identity {},
    ScaledIdentity(ComplexPair),
    /// Row-major q x q entries.
    Explicit(Vec<Vec<ComplexPair>>),
    Random {},
}

/// Second factor of a tensor experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorConfig {
    pub ambient: Ambient,
    pub anchors: AnchorSpec,
    pub measure: MeasureSpec,
    pub family: FamilySpec,
    /// Defaults to the parent seed plus one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "operator", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectrumRequest {
    Frame,
    DualFrame,
    Identity,
    /// Multiplier of the first `multiplier` operation.
    Multiplier,
    /// Frame operator of the first `tensor` operation.
    TensorFrame,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn factor(&self) -> FactorConfig {
        FactorConfig {
            ambient: self.ambient,
            anchors: self.anchors.clone(),
            measure: self.measure.clone(),
            family: self.family.clone(),
            seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.factor().validate("config")?;
        let t = self.tolerances;
        for (name, v) in [("frame", t.frame), ("check", t.check), ("dual", t.dual)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Validation(format!("tolerance `{name}` must be positive, got {v}")));
            }
        }
        if self.trials == 0 {
            return Err(CliError::Validation("`trials` must be positive".into()));
        }
        let nodes = self.measure.node_count();
        for op in &self.operations {
            match op {
                Operation::Multiplier { symbol: SymbolSpec::Values(v), .. } if v.len() != nodes => {
                    return Err(CliError::Validation(format!(
                        "multiplier symbol has {} values for {nodes} nodes",
                        v.len()
                    )));
                }
                Operation::Multiplier { symbol: SymbolSpec::Random {}, .. } if self.seed.is_none() => {
                    return Err(CliError::Validation("random multiplier symbol requires `seed`".into()));
                }
                Operation::Transform { operator: OperatorSpec::Explicit(rows) } => {
                    let q = self.ambient.dim + 1 - self.ambient.n;
                    if rows.len() != q || rows.iter().any(|r| r.len() != q) {
                        return Err(CliError::Validation(format!("transform operator must be {q} x {q}")));
                    }
                }
                Operation::Transform { operator: OperatorSpec::Random {} } if self.seed.is_none() => {
                    return Err(CliError::Validation("random transform operator requires `seed`".into()));
                }
                Operation::Tensor { with } => {
                    let mut w = (**with).clone();
                    if w.seed.is_none() {
                        w.seed = self.seed.map(|s| s.wrapping_add(1));
                    }
                    w.validate("tensor.with")?;
                }
                _ => {}
            }
        }
        if let Some(req) = &self.spectrum {
            let has = |name: &str| self.operations.iter().any(|o| o.name() == name);
            match req {
                SpectrumRequest::Multiplier if !has("multiplier") => {
                    return Err(CliError::Validation("spectrum of `multiplier` needs a multiplier operation".into()));
                }
                SpectrumRequest::TensorFrame if !has("tensor") => {
                    return Err(CliError::Validation("spectrum of `tensor_frame` needs a tensor operation".into()));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

impl MeasureSpec {
    pub fn node_count(&self) -> usize {
        match self {
            MeasureSpec::Weights(w) => w.len(),
            MeasureSpec::Uniform(g) => g.count,
        }
    }

    pub fn build(&self) -> Result<MeasureSpace, CliError> {
        let m = match self {
            MeasureSpec::Weights(w) => MeasureSpace::new(w.clone()),
            MeasureSpec::Uniform(g) => MeasureSpace::uniform_grid(g.count, g.weight),
        };
        m.map_err(|e| CliError::Validation(e.to_string()))
    }
}

impl FactorConfig {
    fn is_random(&self) -> bool {
        matches!(self.anchors, AnchorSpec::Preset(AnchorPreset::Random))
            || matches!(self.family, FamilySpec::RandomGaussian {})
    }

    pub fn validate(&self, ctx: &str) -> Result<(), CliError> {
        let invalid = |msg: String| Err(CliError::Validation(format!("{ctx}: {msg}")));
        let Ambient { dim, n } = self.ambient;
        if let Err(e) = AmbientSpace::new(dim, n) {
            return invalid(e.to_string());
        }
        if self.is_random() && self.seed.is_none() {
            return invalid("`seed` is required for random anchors or families".into());
        }
        if let AnchorSpec::Explicit(a) = &self.anchors {
            if a.len() != n - 1 || a.iter().any(|v| v.len() != dim) {
                return invalid(format!("expected {} anchors of length {dim}", n - 1));
            }
        }
        let nodes = self.measure.node_count();
        if nodes == 0 {
            return invalid("measure needs at least one node".into());
        }
        if let MeasureSpec::Weights(w) = &self.measure {
            if w.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return invalid("weights must be positive".into());
            }
        }
        if let FamilySpec::Explicit(samples) = &self.family {
            if samples.len() != nodes || samples.iter().any(|v| v.len() != dim) {
                return invalid(format!("expected {nodes} samples of length {dim}"));
            }
        }
        Ok(())
    }

    /// Builds the family. Anchor errors (e.g. dependent anchors) are validation errors.
    pub fn build(&self) -> Result<FrameFamily, CliError> {
        let space = AmbientSpace::new(self.ambient.dim, self.ambient.n).map_err(|e| CliError::Validation(e.to_string()))?;
        let mut rng = ComplexGaussian::new(self.seed.unwrap_or(0));
        let anchors = match &self.anchors {
            AnchorSpec::Preset(AnchorPreset::StandardTail) => AnchorTuple::standard_tail(space),
            AnchorSpec::Preset(AnchorPreset::Random) => {
                let vs = (0..space.order() - 1).map(|_| NVector::new(rng.vector(space.dim()))).collect();
                AnchorTuple::new(space, vs).map_err(|e| CliError::Validation(e.to_string()))?
            }
            AnchorSpec::Explicit(rows) => {
                let vs = rows.iter().map(|r| NVector::new(r.iter().map(to_c64).collect())).collect();
                AnchorTuple::new(space, vs).map_err(|e| CliError::Validation(e.to_string()))?
            }
        };
        let quotient = Arc::new(build_quotient(&anchors).map_err(|e| CliError::Validation(e.to_string()))?);
        let measure = Arc::new(self.measure.build()?);
        let d = space.dim();
        let m = measure.node_count();
        let vectors: Vec<NVector> = match &self.family {
            FamilySpec::Explicit(rows) => rows.iter().map(|r| NVector::new(r.iter().map(to_c64).collect())).collect(),
            FamilySpec::RandomGaussian {} => (0..m).map(|_| NVector::new(rng.vector(d))).collect(),
            FamilySpec::Fourier {} => (0..m)
                .map(|k| {
                    let w = measure.position(k);
                    NVector::new(
                        (0..d)
                            .map(|j| C64::from_polar(1.0, std::f64::consts::TAU * w * j as f64 / d as f64))
                            .collect(),
                    )
                })
                .collect(),
        };
        FrameFamily::from_vectors(&vectors, measure, quotient).map_err(|e| CliError::Validation(e.to_string()))
    }
}

impl ExperimentConfig {
    pub fn build_family(&self) -> Result<FrameFamily, CliError> {
        self.factor().build()
    }
}

impl SymbolSpec {
    pub fn build(&self, nodes: usize, rng: &mut ComplexGaussian) -> Vec<C64> {
        match self {
            SymbolSpec::Constant(c) => vec![to_c64(c); nodes],
            SymbolSpec::Values(v) => v.iter().map(to_c64).collect(),
            SymbolSpec::Random {} => rng.vector(nodes),
        }
    }
}

impl OperatorSpec {
    pub fn build(&self, q: usize, rng: &mut ComplexGaussian) -> Result<OperatorOnHF, CliError> {
        Ok(match self {
            OperatorSpec::Identity {} => OperatorOnHF::identity(q),
            OperatorSpec::ScaledIdentity(s) => OperatorOnHF::scaled_identity(q, to_c64(s)),
            OperatorSpec::Explicit(rows) => {
                let entries = nalgebra::DMatrix::from_fn(q, q, |i, j| to_c64(&rows[i][j]));
                OperatorOnHF::new(entries).map_err(|e| CliError::Validation(e.to_string()))?
            }
            OperatorSpec::Random {} => OperatorOnHF::new(rng.matrix(q, q)).expect("square"),
        })
    }
}
