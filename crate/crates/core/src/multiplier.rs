//! Continuous Bessel multipliers `M_{m,F,G}` on `H_F`.

use crate::error::{check_dim, FrameError, Result};
use crate::frames::FrameFamily;
use crate::operator::{OperatorOnHF, C64};

/// Symbol `m: Omega -> C` sampled at the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierSymbol {
    values: Vec<C64>,
    sup_norm: f64,
}

impl MultiplierSymbol {
    pub fn new(values: Vec<C64>) -> Self {
        let sup_norm = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Self { values, sup_norm }
    }

    pub fn constant(value: C64, len: usize) -> Self {
        Self::new(vec![value; len])
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// `||m||_inf`.
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn conj(&self) -> Self {
        Self::new(self.values.iter().map(|v| v.conj()).collect())
    }

    pub fn add(&self, other: &MultiplierSymbol) -> Result<Self> {
        check_dim(self.values.len(), other.values.len())?;
        Ok(Self::new(self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect()))
    }

    /// Separable symbol `m(i, j) = m1_i m2_j` in row-major product order.
    pub fn outer(&self, other: &MultiplierSymbol) -> Self {
        let values = self
            .values
            .iter()
            .flat_map(|a| other.values.iter().map(move |b| a * b))
            .collect();
        Self::new(values)
    }
}

/// `M f = sum_i mu_i m_i <f, F(w_i)> G(w_i)`, assembled as `C_G diag(mu m) C_F*`.
pub fn multiplier_operator(m: &MultiplierSymbol, f: &FrameFamily, g: &FrameFamily) -> Result<OperatorOnHF> {
    f.check_compatible(g)?;
    check_dim(f.node_count(), m.values().len())?;
    let mut weighted = g.coords().clone();
    for (j, mut col) in weighted.column_iter_mut().enumerate() {
        col *= m.values()[j] * f.measure().weights()[j];
    }
    OperatorOnHF::new(weighted * f.coords().adjoint())
}

/// `||m||_inf sqrt(B1 B2)`.
pub fn multiplier_norm_bound(m: &MultiplierSymbol, b1: f64, b2: f64) -> Result<f64> {
    if !(b1 >= 0.0 && b2 >= 0.0) {
        return Err(FrameError::InvalidInput(format!("Bessel bounds must be nonnegative, got {b1}, {b2}")));
    }
    Ok(m.sup_norm() * (b1 * b2).sqrt())
}
