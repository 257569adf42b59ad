//! Seeded experiment pipelines producing flat CSV rows.
//!
//! | kind              | cells                   | simulated                  |
//! |-------------------|-------------------------|----------------------------|
//! | `hops-sweep`      | hops 6-10, std 0.1      | every strategy, on-demand  |
//! | `std-sweep`       | hops 6, std 0-0.5       | every strategy, on-demand  |
//! | `retrans-compare` | hops 5, std 0.1         | one strategy, both policies|
//! | `planner-bench`   | hops 4-12, std 0.1      | planning wall time only    |

mod analysis;
mod output;
mod pipelines;
mod sampling;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::planners::PlannerKind;
use crate::sim::{SimConfig, SimError};
use crate::ModelError;

pub use analysis::{bootstrap_mean_ci, instance_means, mean, median, metric_values};
pub use output::{write_csv, write_manifest, CSV_HEADER};
pub use pipelines::{run_experiment, run_hops_sweep, run_planner_bench, run_retrans_compare, run_std_sweep};
pub use sampling::{sample_node_costs, COST_GRID};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    HopsSweep,
    StdSweep,
    RetransCompare,
    PlannerBench,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 4] = [
        ExperimentKind::HopsSweep,
        ExperimentKind::StdSweep,
        ExperimentKind::RetransCompare,
        ExperimentKind::PlannerBench,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::HopsSweep => "hops-sweep",
            ExperimentKind::StdSweep => "std-sweep",
            ExperimentKind::RetransCompare => "retrans-compare",
            ExperimentKind::PlannerBench => "planner-bench",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                format!("unknown experiment kind {s:?}, expected hops-sweep, std-sweep, retrans-compare or planner-bench")
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    /// Hop counts swept; a path of `h` hops has `h - 1` repeaters.
    pub hops: Vec<usize>,
    pub cost_mean: f64,
    /// Standard deviations swept; a single value outside the std sweep.
    pub cost_std: Vec<f64>,
    pub instances: usize,
    pub trials_per_instance: usize,
    pub strategies: Vec<PlannerKind>,
    pub seed: u64,
    pub sim: SimConfig,
    /// Repeater bound for the exhaustive oracle.
    pub oracle_bound: usize,
    /// Instances per reported group in the retransmission comparison.
    pub groups: usize,
    pub bench_warmup: usize,
    pub bench_repeats: usize,
}

impl ExperimentSpec {
    pub fn defaults(kind: ExperimentKind) -> Self {
        let base = ExperimentSpec {
            kind,
            hops: (6..=10).collect(),
            cost_mean: 1.4,
            cost_std: vec![0.1],
            instances: 200,
            trials_per_instance: 25,
            strategies: PlannerKind::COMPARED.to_vec(),
            seed: 20240601,
            sim: SimConfig::default(),
            oracle_bound: crate::planners::DEFAULT_OPTIMAL_BOUND,
            groups: 5,
            bench_warmup: 5,
            bench_repeats: 11,
        };
        match kind {
            ExperimentKind::HopsSweep => base,
            ExperimentKind::StdSweep => ExperimentSpec {
                hops: vec![6],
                cost_std: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
                ..base
            },
            ExperimentKind::RetransCompare => ExperimentSpec {
                hops: vec![5],
                strategies: vec![PlannerKind::PSES_LAYER_GREEDY],
                ..base
            },
            ExperimentKind::PlannerBench => {
                let mut strategies = PlannerKind::COMPARED.to_vec();
                strategies.push(PlannerKind::OPTIMAL);
                ExperimentSpec {
                    hops: (4..=12).collect(),
                    instances: 20,
                    trials_per_instance: 1,
                    strategies,
                    ..base
                }
            }
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Spec(m));
        if self.instances == 0 {
            return bad("instances must be >= 1".into());
        }
        if self.trials_per_instance == 0 {
            return bad("trials_per_instance must be >= 1".into());
        }
        if !(self.cost_mean.is_finite() && self.cost_mean >= 1.0) {
            return bad(format!("cost_mean must be >= 1, got {}", self.cost_mean));
        }
        if self.cost_std.is_empty() || self.cost_std.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return bad(format!("cost_std must be a non-empty list of values >= 0, got {:?}", self.cost_std));
        }
        if self.hops.is_empty() || self.hops.iter().any(|h| !(2..=16).contains(h)) {
            return bad(format!("hops must be a non-empty list within 2..=16, got {:?}", self.hops));
        }
        if self.strategies.is_empty() {
            return bad("strategies must not be empty".into());
        }
        if self.groups == 0 {
            return bad("groups must be >= 1".into());
        }
        if self.bench_repeats == 0 {
            return bad("bench_repeats must be >= 1".into());
        }
        self.sim.validate()?;
        Ok(())
    }

    /// Apply the values present in `overrides` on top of this spec.
    pub fn with_overrides(mut self, o: &SpecOverrides) -> Self {
        if let Some(v) = &o.hops {
            self.hops = v.clone();
        }
        if let Some(v) = o.cost_mean {
            self.cost_mean = v;
        }
        if let Some(v) = &o.cost_std {
            self.cost_std = v.clone();
        }
        if let Some(v) = o.instances {
            self.instances = v;
        }
        if let Some(v) = o.trials_per_instance {
            self.trials_per_instance = v;
        }
        if let Some(v) = &o.strategies {
            self.strategies = v.clone();
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = &o.sim {
            self.sim = v.clone();
        }
        if let Some(v) = o.oracle_bound {
            self.oracle_bound = v;
        }
        if let Some(v) = o.groups {
            self.groups = v;
        }
        if let Some(v) = o.bench_warmup {
            self.bench_warmup = v;
        }
        if let Some(v) = o.bench_repeats {
            self.bench_repeats = v;
        }
        self
    }
}

/// Optional spec fields as read from a config file; unknown keys are errors.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecOverrides {
    pub hops: Option<Vec<usize>>,
    pub cost_mean: Option<f64>,
    pub cost_std: Option<Vec<f64>>,
    pub instances: Option<usize>,
    pub trials_per_instance: Option<usize>,
    pub strategies: Option<Vec<PlannerKind>>,
    pub seed: Option<u64>,
    pub sim: Option<SimConfig>,
    pub oracle_bound: Option<usize>,
    pub groups: Option<usize>,
    pub bench_warmup: Option<usize>,
    pub bench_repeats: Option<usize>,
}

/// One flat result row. Aggregate rows leave `instance` and `trial` empty;
/// group rows of the retransmission comparison put the group in `instance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub strategy: String,
    pub hops: usize,
    pub cost_std: f64,
    pub instance: Option<usize>,
    pub trial: Option<usize>,
    pub metric: String,
    pub value: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultSet {
    pub rows: Vec<ResultRow>,
    /// Human-readable notes on rows not produced, such as oracle refusals.
    pub skipped: Vec<String>,
    /// Trials that hit the simulation cutoff; their partial metrics are still reported.
    pub timeouts: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for kind in ExperimentKind::ALL {
            let spec = ExperimentSpec::defaults(kind);
            spec.validate().unwrap();
            assert_eq!(spec.kind.name().parse::<ExperimentKind>().unwrap(), kind);
        }
        assert_eq!(ExperimentSpec::defaults(ExperimentKind::StdSweep).hops, [6]);
        assert_eq!(ExperimentSpec::defaults(ExperimentKind::RetransCompare).hops, [5]);
        let bench = ExperimentSpec::defaults(ExperimentKind::PlannerBench);
        assert_eq!((bench.bench_warmup, bench.bench_repeats), (5, 11));
    }

    #[test]
    fn overrides_apply_and_reject_unknown_keys() {
        let o: SpecOverrides = toml::from_str("instances = 3\nseed = 9\n[sim]\npolicy = \"full-path\"\n").unwrap();
        let spec = ExperimentSpec::defaults(ExperimentKind::HopsSweep).with_overrides(&o);
        assert_eq!((spec.instances, spec.seed), (3, 9));
        assert_eq!(spec.sim.policy, crate::sim::RetransmissionPolicy::FullPath);
        assert_eq!(spec.trials_per_instance, 25);
        assert!(toml::from_str::<SpecOverrides>("instancs = 3").is_err());
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let base = ExperimentSpec::defaults(ExperimentKind::HopsSweep);
        for spec in [
            ExperimentSpec { instances: 0, ..base.clone() },
            ExperimentSpec { cost_mean: 0.5, ..base.clone() },
            ExperimentSpec { cost_std: vec![-1.0], ..base.clone() },
            ExperimentSpec { hops: vec![17], ..base.clone() },
            ExperimentSpec { hops: vec![1], ..base.clone() },
        ] {
            assert!(spec.validate().is_err(), "{spec:?}");
        }
    }
}
