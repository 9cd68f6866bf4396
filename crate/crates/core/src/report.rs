use std::collections::BTreeMap;
use std::fmt::Display;

use serde::Serialize;

/// Outcome of one numerical identity check.
///
/// `passed` is derived from `residual < tolerance` at construction and never set directly;
/// a NaN residual fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    name: String,
    params: BTreeMap<String, String>,
    residual: f64,
    tolerance: f64,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_ms: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            params: BTreeMap::new(),
            residual,
            tolerance,
            passed: residual < tolerance,
            runtime_ms: None,
            warnings: Vec::new(),
        }
    }

    pub fn with_param(mut self, key: impl Into<String>, value: impl Display) -> Self {
        self.params.insert(key.into(), value.to_string());
        self
    }

    pub fn with_warning(mut self, warning: impl Into<String>) -> Self {
        self.warnings.push(warning.into());
        self
    }

    /// Replaces the tolerance and re-derives `passed`.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.passed = self.residual < tolerance;
        self
    }

    pub fn with_runtime_ms(mut self, ms: f64) -> Self {
        self.runtime_ms = Some(ms);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, String> {
        &self.params
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn passed(&self) -> bool {
        self.passed
    }

    pub fn runtime_ms(&self) -> Option<f64> {
        self.runtime_ms
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}
