//! Finite weighted node sets standing in for `(Omega, mu)`, and the
//! coefficient space `L^2(Omega, mu)`.

use std::sync::Arc;

use crate::error::{check_dim, FrameError, Result};
use crate::operator::C64;

/// Descriptor attached to a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeLabel {
    /// A position on a one-dimensional grid.
    Point(f64),
    /// Indices of the parent nodes of a product node.
    Pair(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpace {
    weights: Vec<f64>,
    labels: Option<Vec<NodeLabel>>,
}

impl MeasureSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(FrameError::InvalidInput("measure space needs at least one node".into()));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
            return Err(FrameError::InvalidInput(format!("weight {i} must be positive and finite, got {w}")));
        }
        Ok(Self { weights, labels: None })
    }

    pub fn with_labels(weights: Vec<f64>, labels: Vec<NodeLabel>) -> Result<Self> {
        check_dim(weights.len(), labels.len())?;
        let mut m = Self::new(weights)?;
        m.labels = Some(labels);
        Ok(m)
    }

    /// Counting measure on `count` nodes.
    pub fn counting(count: usize) -> Result<Self> {
        Self::new(vec![1.0; count])
    }

    /// `count` grid points `0, 1, .., count-1`, each carrying `weight`.
    pub fn uniform_grid(count: usize, weight: f64) -> Result<Self> {
        let labels = (0..count).map(|k| NodeLabel::Point(k as f64)).collect();
        Self::with_labels(vec![weight; count], labels)
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> Option<&[NodeLabel]> {
        self.labels.as_deref()
    }

    /// Grid position of node `i`: its `Point` label, or the index itself.
    pub fn position(&self, i: usize) -> f64 {
        match self.labels.as_ref().map(|l| l[i]) {
            Some(NodeLabel::Point(x)) => x,
            _ => i as f64,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Weighted sum over nodes in ascending index order.
    pub fn integrate(&self, values: &[C64]) -> Result<C64> {
        check_dim(self.node_count(), values.len())?;
        Ok(self
            .weights
            .iter()
            .zip(values)
            .fold(C64::new(0.0, 0.0), |acc, (w, v)| acc + v * *w))
    }
}

/// Product measure, nodes in row-major order (left index outer).
pub fn product_measure(m1: &MeasureSpace, m2: &MeasureSpace) -> MeasureSpace {
    let mut weights = Vec::with_capacity(m1.node_count() * m2.node_count());
    let mut labels = Vec::with_capacity(weights.capacity());
    for (i, w1) in m1.weights.iter().enumerate() {
        for (j, w2) in m2.weights.iter().enumerate() {
            weights.push(w1 * w2);
            labels.push(NodeLabel::Pair(i, j));
        }
    }
    MeasureSpace { weights, labels: Some(labels) }
}

/// A function `phi: Omega -> C`, one value per node.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFunction {
    values: Vec<C64>,
    measure: Arc<MeasureSpace>,
}

impl CoefficientFunction {
    pub fn new(values: Vec<C64>, measure: Arc<MeasureSpace>) -> Result<Self> {
        check_dim(measure.node_count(), values.len())?;
        Ok(Self { values, measure })
    }

    pub fn zeros(measure: Arc<MeasureSpace>) -> Self {
        Self { values: vec![C64::new(0.0, 0.0); measure.node_count()], measure }
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn measure(&self) -> &Arc<MeasureSpace> {
        &self.measure
    }

    pub fn l2_norm(&self) -> f64 {
        self.values
            .iter()
            .zip(self.measure.weights())
            .map(|(v, w)| w * v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

pub(crate) fn same_measure(a: &Arc<MeasureSpace>, b: &Arc<MeasureSpace>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// `sum_i mu_i phi_i conj(psi_i)`.
pub fn l2_inner(phi: &CoefficientFunction, psi: &CoefficientFunction) -> Result<C64> {
    if !same_measure(&phi.measure, &psi.measure) {
        return Err(FrameError::MeasureMismatch("coefficient functions live on different measure spaces".into()));
    }
    let products: Vec<C64> = phi.values.iter().zip(&psi.values).map(|(a, b)| a * b.conj()).collect();
    phi.measure.integrate(&products)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(w: &[f64]) -> Arc<MeasureSpace> {
        Arc::new(MeasureSpace::new(w.to_vec()).unwrap())
    }

    fn cf(v: &[C64], ms: &Arc<MeasureSpace>) -> CoefficientFunction {
        CoefficientFunction::new(v.to_vec(), ms.clone()).unwrap()
    }

    const ONE: C64 = C64::new(1.0, 0.0);
    const ZERO: C64 = C64::new(0.0, 0.0);

    #[test]
    fn product_examples() {
        let ones = MeasureSpace::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(product_measure(&ones, &ones).weights(), &[1.0; 4]);
        let a = MeasureSpace::new(vec![2.0]).unwrap();
        let b = MeasureSpace::new(vec![3.0]).unwrap();
        assert_eq!(product_measure(&a, &b).weights(), &[6.0]);
        let a = MeasureSpace::new(vec![1.0, 2.0]).unwrap();
        let b = MeasureSpace::new(vec![3.0, 4.0]).unwrap();
        let p = product_measure(&a, &b);
        assert_eq!(p.weights(), &[3.0, 4.0, 6.0, 8.0]);
        assert_eq!(p.labels().unwrap()[1], NodeLabel::Pair(0, 1));
        assert_eq!(p.labels().unwrap()[2], NodeLabel::Pair(1, 0));
    }

    #[test]
    fn l2_examples() {
        let ms = m(&[1.0, 1.0]);
        assert_eq!(l2_inner(&cf(&[ONE, ONE], &ms), &cf(&[ONE, ONE], &ms)).unwrap(), C64::new(2.0, 0.0));
        let ms2 = m(&[0.3, 7.0]);
        assert_eq!(l2_inner(&cf(&[ONE, ZERO], &ms2), &cf(&[ZERO, ONE], &ms2)).unwrap(), ZERO);
        let ms3 = m(&[1.0, 3.0]);
        let got = l2_inner(&cf(&[ONE, C64::new(0.0, 2.0)], &ms3), &cf(&[ONE, ONE], &ms3)).unwrap();
        assert_eq!(got, C64::new(1.0, 6.0));
    }

    #[test]
    fn mismatched_measures_rejected() {
        let a = cf(&[ONE, ONE], &m(&[1.0, 1.0]));
        let b = cf(&[ONE, ONE], &m(&[1.0, 2.0]));
        assert!(matches!(l2_inner(&a, &b), Err(FrameError::MeasureMismatch(_))));
        assert!(CoefficientFunction::new(vec![ONE], m(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn invalid_weights_rejected() {
        assert!(MeasureSpace::new(vec![]).is_err());
        assert!(MeasureSpace::new(vec![1.0, 0.0]).is_err());
        assert!(MeasureSpace::new(vec![1.0, -2.0]).is_err());
        assert!(MeasureSpace::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn grid_positions() {
        let g = MeasureSpace::uniform_grid(4, 0.25).unwrap();
        assert_eq!(g.position(3), 3.0);
        assert!((g.total_mass() - 1.0).abs() < 1e-15);
    }
}
