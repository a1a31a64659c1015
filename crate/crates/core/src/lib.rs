//! Continuous frames in n-Hilbert spaces and their tensor products.
//!
//! Everything is finite dimensional: the ambient space is `C^d`, the
//! n-inner product is the bordered Gram determinant, and measure spaces are
//! finite weighted node sets, so every integral is a weighted sum.

pub mod error;
pub mod frames;
pub mod measure;
pub mod multiplier;
pub mod nip;
pub mod operator;
pub mod random;
pub mod tensor;

pub use error::{FrameError, Result};
pub use frames::{FrameFamily, FrameVerdict, SynthesisMatrix, SynthesisPseudoInverse};
pub use measure::{l2_inner, product_measure, CoefficientFunction, MeasureSpace, NodeLabel};
pub use multiplier::{multiplier_norm_bound, multiplier_operator, MultiplierSymbol};
pub use nip::{
    build_quotient, from_quotient_coords, n_inner, n_norm, to_quotient_coords, AmbientSpace, AnchorTuple, NVector,
    QuotientFrameSpace,
};
pub use operator::{FrameBounds, OperatorOnHF, C64};
pub use tensor::{
    dual_pair_bessel_check, kron_operator, tensor_dual, tensor_frame, tensor_multiplier, tensor_n_inner,
    tensor_n_norm, DualPairCertificate, TensorDual, TensorFrameFamily, TensorQuotientSpace,
};

/// Relative singular-value threshold deciding linear independence.
pub const RANK_TOL: f64 = 1e-12;

/// Default relative spectral gap for the frame test.
pub const DEFAULT_FRAME_TOL: f64 = 1e-10;

/// Largest reconstruction residual accepted for a dual pair.
pub const DUAL_TOL: f64 = 1e-8;
