//! JSON plan documents, as written by `pses plan` and read by `pses simulate`.
//!
//! ```json
//! {
//!   "path": [{"id": "x0", "role": "user", "cost": 0.0}, ...],
//!   "layers": [[{"head": "x0", "parents": ["x1", "x2"], "tail": "x3"}, ...], ...],
//!   "strategy": "pses-layer-greedy",
//!   "cost_total": 145.0,
//!   "cost_per_layer": [100.0, 45.0],
//!   "wall_time_us": 12.5,
//!   "expansions": 12
//! }
//! ```
//!
//! Only `path` and `layers` are required when reading.

use serde::{Deserialize, Serialize};

use super::path::PathSpec;
use super::plan::{LayerSolution, SwapPlan};
use crate::error::ModelError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanDocument {
    pub path: PathSpec,
    pub layers: Vec<LayerSolution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_total: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_per_layer: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_us: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expansions: Option<u64>,
}

impl PlanDocument {
    pub fn from_plan(plan: &SwapPlan) -> Self {
        PlanDocument {
            path: plan.original_path.clone(),
            layers: plan.layers.clone(),
            strategy: None,
            cost_total: None,
            cost_per_layer: None,
            wall_time_us: None,
            expansions: None,
        }
    }

    /// Rebuild and validate the plan the document describes.
    pub fn to_plan(&self) -> Result<SwapPlan, ModelError> {
        SwapPlan::new(self.path.clone(), self.layers.clone())
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("plan documents always serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
