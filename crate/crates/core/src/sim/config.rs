use serde::{Deserialize, Serialize};

use super::SimError;

/// What the controller does when a node reports a failed attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RetransmissionPolicy {
    /// Re-prepare only the pairs of the failed node's segment and retry that segment.
    OnDemand,
    /// Re-prepare every pair of the original path and restart from the first layer.
    FullPath,
}

impl RetransmissionPolicy {
    pub const ALL: [RetransmissionPolicy; 2] = [RetransmissionPolicy::OnDemand, RetransmissionPolicy::FullPath];

    pub fn name(&self) -> &'static str {
        match self {
            RetransmissionPolicy::OnDemand => "on-demand",
            RetransmissionPolicy::FullPath => "full-path",
        }
    }
}

impl std::fmt::Display for RetransmissionPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for RetransmissionPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RetransmissionPolicy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown policy {s:?}, expected on-demand or full-path"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttemptModel {
    /// Each attempt succeeds with probability 1 / cost.
    Stochastic,
    /// Every swap succeeds and lasts exactly cost x attempt latency.
    Deterministic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Time units per swap attempt.
    pub attempt_latency: f64,
    /// Time units per controller, domain controller or node message.
    pub classical_latency: f64,
    /// Time units to prepare a batch of pairs; links prepare in parallel.
    pub prep_latency: f64,
    pub policy: RetransmissionPolicy,
    pub attempt_model: AttemptModel,
    pub seed: u64,
    /// Safety cutoff; the run is abandoned past this time.
    pub max_sim_time: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            attempt_latency: 1.0,
            classical_latency: 0.0,
            prep_latency: 1.0,
            policy: RetransmissionPolicy::OnDemand,
            attempt_model: AttemptModel::Stochastic,
            seed: 0,
            max_sim_time: 1e9,
        }
    }
}

impl SimConfig {
    /// Deterministic attempts with unit attempt latency and no other delays:
    /// completion time then equals the plan cost.
    pub fn cost_equivalent() -> Self {
        SimConfig {
            classical_latency: 0.0,
            prep_latency: 0.0,
            attempt_model: AttemptModel::Deterministic,
            ..SimConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (field, value) in [
            ("attempt_latency", self.attempt_latency),
            ("classical_latency", self.classical_latency),
            ("prep_latency", self.prep_latency),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(SimError::Config(format!("{field} must be finite and >= 0, got {value}")));
            }
        }
        if !(self.max_sim_time > 0.0) {
            return Err(SimError::Config(format!(
                "max_sim_time must be > 0, got {}",
                self.max_sim_time
            )));
        }
        Ok(())
    }
}
