//! Report layout: `{ meta, operations: [{ name, inputs_digest, result, checks }] }`.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub meta: Meta,
    pub operations: Vec<OperationReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub tolerances: Tolerances,
    pub ambient_dim: usize,
    pub order: usize,
    pub quotient_dim: usize,
    pub node_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperationReport {
    pub name: String,
    pub inputs_digest: String,
    pub result: Value,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub pass: bool,
    pub residual: f64,
}

impl Check {
    /// Passes when `residual <= tolerance`.
    pub fn within(id: &str, residual: f64, tolerance: f64) -> Self {
        // JSON has no NaN/inf; a non-finite residual is reported as f64::MAX
        let residual = if residual.is_finite() { residual } else { f64::MAX };
        Self { id: id.to_string(), pass: residual <= tolerance, residual }
    }

    pub fn flag(id: &str, pass: bool) -> Self {
        Self { id: id.to_string(), pass, residual: if pass { 0.0 } else { 1.0 } }
    }
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.operations.iter().all(|op| op.checks.iter().all(|c| c.pass))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_threshold() {
        assert!(Check::within("a", 1e-12, 1e-10).pass);
        assert!(!Check::within("a", 1e-8, 1e-10).pass);
        assert!(!Check::within("a", f64::NAN, 1e-10).pass);
    }

    #[test]
    fn sha_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
