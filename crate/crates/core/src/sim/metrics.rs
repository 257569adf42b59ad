use serde::{Deserialize, Serialize};

/// Name of the per-node generator, recorded with every run.
pub const RNG_NAME: &str = "ChaCha8Rng";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub completion_time: f64,
    /// Initial pairs plus every re-preparation.
    pub pairs_prepared: u64,
    pub attempts: u64,
    /// RETRY messages sent.
    pub retransmissions: u64,
    /// FAILED messages handled.
    pub failures: u64,
    /// Full-path restarts from the first layer.
    pub restarts: u64,
    /// Duration of each layer in the run that completed.
    pub per_layer_times: Vec<f64>,
    pub rng: String,
    pub seed: u64,
}

impl Metrics {
    pub(crate) fn new(seed: u64) -> Self {
        Metrics {
            completion_time: 0.0,
            pairs_prepared: 0,
            attempts: 0,
            retransmissions: 0,
            failures: 0,
            restarts: 0,
            per_layer_times: Vec::new(),
            rng: RNG_NAME.to_string(),
            seed,
        }
    }
}
