//! Turn-key reproductions of the bundled counterexample geometries and
//! property batteries. Every scenario is deterministic given its seed and
//! parameters, runs assertions built entirely from operations of the other
//! modules, and emits a machine-checkable report plus plot data.

use crate::geometry::CostParams;
use crate::report::ScenarioOutput;
use crate::Real;
use serde::{Deserialize, Serialize};

mod battery;
mod compactness;
mod discontinuity;
mod interpolation;
mod lightcone;
mod unbounded;

pub use battery::run_strong_duality_battery;
pub use compactness::run_causal_compactness;
pub use discontinuity::run_example_discontinuity;
pub use interpolation::run_c11_interpolation;
pub use lightcone::run_example_lightcone_coupling;
pub use unbounded::run_example_unbounded_subdiff;

/// Runtime knobs shared by all scenarios. `None` fields fall back to each
/// scenario's documented default.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Cost exponent, strictly inside (0,1).
    pub p: Real,
    pub seed: u64,
    /// Support size for sampled measures.
    pub n: Option<usize>,
    /// Trial count for batteries.
    pub trials: Option<usize>,
    /// Duality-gap tolerance.
    pub tol_gap: Real,
    /// Emit SVG figures alongside the report.
    pub plots: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            p: 0.5,
            seed: 7,
            n: None,
            trials: None,
            tol_gap: 1e-9,
            plots: false,
        }
    }
}

impl ScenarioConfig {
    pub fn params(&self) -> CostParams {
        CostParams::new(self.p).expect("p validated at parse time")
    }
}

pub const SCENARIO_NAMES: [&str; 6] = [
    "discontinuity",
    "unbounded-subdiff",
    "lightcone-coupling",
    "causal-compactness",
    "duality-battery",
    "c11-interpolation",
];

/// Run a scenario by registry name; `None` for unknown names.
pub fn run(name: &str, config: &ScenarioConfig) -> Option<ScenarioOutput> {
    match name {
        "discontinuity" => Some(run_example_discontinuity(config)),
        "unbounded-subdiff" => Some(run_example_unbounded_subdiff(config)),
        "lightcone-coupling" => Some(run_example_lightcone_coupling(config)),
        "causal-compactness" => Some(run_causal_compactness(config)),
        "duality-battery" => Some(run_strong_duality_battery(config)),
        "c11-interpolation" => Some(run_c11_interpolation(config)),
        _ => None,
    }
}
