//! Machine-checkable scenario reports: a list of named assertions with the
//! measured values and thresholds, plus data tables and figures for offline
//! inspection. Reports are deterministic given the scenario seed and
//! parameters (stable field order, stable float formatting).

use crate::Real;
use serde::{Deserialize, Serialize};

/// One named check with its measured value and the threshold it was held to.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Assertion {
    /// Stable check id, e.g. "dual-gap" or "cone-touching-entry".
    pub check: String,
    /// What was measured, in words.
    pub description: String,
    /// Measured value(s).
    pub measured: serde_json::Value,
    /// Threshold or expectation the measurement was compared against.
    pub threshold: serde_json::Value,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub parameters: serde_json::Value,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
}

impl ScenarioReport {
    pub fn new(scenario: &str, parameters: serde_json::Value) -> Self {
        ScenarioReport {
            scenario: scenario.to_string(),
            parameters,
            assertions: Vec::new(),
            passed: true,
        }
    }

    pub fn push(
        &mut self,
        check: &str,
        description: &str,
        measured: serde_json::Value,
        threshold: serde_json::Value,
        passed: bool,
    ) {
        self.assertions.push(Assertion {
            check: check.to_string(),
            description: description.to_string(),
            measured,
            threshold,
            passed,
        });
        self.passed &= passed;
    }

    /// Convenience: `value <= bound`.
    pub fn check_le(&mut self, check: &str, description: &str, value: Real, bound: Real) {
        self.push(
            check,
            description,
            serde_json::json!(value),
            serde_json::json!({"max": bound}),
            value <= bound,
        );
    }

    /// Convenience: `value >= bound`.
    pub fn check_ge(&mut self, check: &str, description: &str, value: Real, bound: Real) {
        self.push(
            check,
            description,
            serde_json::json!(value),
            serde_json::json!({"min": bound}),
            value >= bound,
        );
    }

    /// Convenience: boolean expectation.
    pub fn check_that(&mut self, check: &str, description: &str, got: bool) {
        self.push(
            check,
            description,
            serde_json::json!(got),
            serde_json::json!(true),
            got,
        );
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Scenario output: the report plus named CSV tables and SVG figures.
pub struct ScenarioOutput {
    pub report: ScenarioReport,
    pub tables: Vec<(String, String)>,
    pub figures: Vec<(String, String)>,
}

impl ScenarioOutput {
    pub fn new(report: ScenarioReport) -> Self {
        ScenarioOutput {
            report,
            tables: Vec::new(),
            figures: Vec::new(),
        }
    }
}
