//! Strategies that turn a path into a layered swapping plan.
//!
//! | name                  | algorithm       | composite parents |
//! |-----------------------|-----------------|-------------------|
//! | `sequential`          | one node/layer  | no                |
//! | `bbt`                 | balanced tree   | no                |
//! | `ibt-layer-greedy`    | layer greedy    | no                |
//! | `ibt-segment-greedy`  | segment greedy  | no                |
//! | `pses-layer-greedy`   | layer greedy    | yes               |
//! | `pses-segment-greedy` | segment greedy  | yes               |
//! | `optimal`             | exhaustive      | yes               |

mod bbt;
mod layer_greedy;
mod optimal;
mod segment_greedy;
mod sequential;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::model::{plan_cost, PathSpec, PlanCostBreakdown, PlanDocument, SwapPlan};
use crate::ModelError;

pub use bbt::plan_bbt;
pub use layer_greedy::{enumerate_layer_solutions, layer_saving, plan_layer_greedy};
pub use optimal::{plan_optimal, plan_optimal_with_bound, DEFAULT_OPTIMAL_BOUND};
pub use segment_greedy::{
    net_benefit_current, net_benefit_growth, plan_segment_greedy, SegmentGreedyState,
};
pub use sequential::plan_sequential;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlannerError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("exhaustive search refused: {repeaters} repeaters exceeds the bound of {bound}")]
    BoundExceeded { repeaters: usize, bound: usize },
    #[error("unknown strategy {0:?}")]
    UnknownStrategy(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Sequential,
    Bbt,
    LayerGreedy,
    SegmentGreedy,
    Optimal,
}

/// A planning strategy: an algorithm plus whether composite parents are allowed.
///
/// Only the greedy algorithms honor the flag; the constructor normalizes it for
/// the others (sequential and bbt never composite, optimal always explores them).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlannerKind {
    algorithm: Algorithm,
    composite_allowed: bool,
}

impl PlannerKind {
    pub const SEQUENTIAL: PlannerKind = PlannerKind::new(Algorithm::Sequential, false);
    pub const BBT: PlannerKind = PlannerKind::new(Algorithm::Bbt, false);
    pub const IBT_LAYER_GREEDY: PlannerKind = PlannerKind::new(Algorithm::LayerGreedy, false);
    pub const IBT_SEGMENT_GREEDY: PlannerKind = PlannerKind::new(Algorithm::SegmentGreedy, false);
    pub const PSES_LAYER_GREEDY: PlannerKind = PlannerKind::new(Algorithm::LayerGreedy, true);
    pub const PSES_SEGMENT_GREEDY: PlannerKind = PlannerKind::new(Algorithm::SegmentGreedy, true);
    pub const OPTIMAL: PlannerKind = PlannerKind::new(Algorithm::Optimal, true);

    /// The five strategies compared in the sweeps, best first.
    pub const COMPARED: [PlannerKind; 5] = [
        PlannerKind::PSES_LAYER_GREEDY,
        PlannerKind::IBT_LAYER_GREEDY,
        PlannerKind::PSES_SEGMENT_GREEDY,
        PlannerKind::IBT_SEGMENT_GREEDY,
        PlannerKind::BBT,
    ];

    pub const ALL: [PlannerKind; 7] = [
        PlannerKind::SEQUENTIAL,
        PlannerKind::BBT,
        PlannerKind::IBT_LAYER_GREEDY,
        PlannerKind::IBT_SEGMENT_GREEDY,
        PlannerKind::PSES_LAYER_GREEDY,
        PlannerKind::PSES_SEGMENT_GREEDY,
        PlannerKind::OPTIMAL,
    ];

    pub const fn new(algorithm: Algorithm, composite_allowed: bool) -> Self {
        let composite_allowed = match algorithm {
            Algorithm::Sequential | Algorithm::Bbt => false,
            Algorithm::Optimal => true,
            Algorithm::LayerGreedy | Algorithm::SegmentGreedy => composite_allowed,
        };
        PlannerKind {
            algorithm,
            composite_allowed,
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn composite_allowed(&self) -> bool {
        self.composite_allowed
    }

    pub fn name(&self) -> &'static str {
        match (self.algorithm, self.composite_allowed) {
            (Algorithm::Sequential, _) => "sequential",
            (Algorithm::Bbt, _) => "bbt",
            (Algorithm::LayerGreedy, false) => "ibt-layer-greedy",
            (Algorithm::LayerGreedy, true) => "pses-layer-greedy",
            (Algorithm::SegmentGreedy, false) => "ibt-segment-greedy",
            (Algorithm::SegmentGreedy, true) => "pses-segment-greedy",
            (Algorithm::Optimal, _) => "optimal",
        }
    }

    /// Run this strategy on `path`, timing the call.
    pub fn plan(&self, path: &PathSpec) -> Result<PlannerReport, PlannerError> {
        match self.algorithm {
            Algorithm::Sequential => plan_sequential(path),
            Algorithm::Bbt => plan_bbt(path),
            Algorithm::LayerGreedy => plan_layer_greedy(path, self.composite_allowed),
            Algorithm::SegmentGreedy => plan_segment_greedy(path, self.composite_allowed),
            Algorithm::Optimal => plan_optimal(path),
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlannerKind {
    type Err = PlannerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PlannerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| PlannerError::UnknownStrategy(s.to_string()))
    }
}

impl serde::Serialize for PlannerKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> serde::Deserialize<'de> for PlannerKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        name.parse().map_err(serde::de::Error::custom)
    }
}

/// A plan together with its cost and how much work it took to find.
#[derive(Debug, Clone)]
pub struct PlannerReport {
    pub kind: PlannerKind,
    pub plan: SwapPlan,
    pub cost: PlanCostBreakdown,
    pub wall_time: Duration,
    /// Candidate solutions examined.
    pub expansions: u64,
}

impl PlannerReport {
    pub(crate) fn finish(
        kind: PlannerKind,
        plan: SwapPlan,
        started: Instant,
        expansions: u64,
    ) -> Result<Self, PlannerError> {
        let wall_time = started.elapsed();
        let cost = plan_cost(&plan)?;
        Ok(PlannerReport {
            kind,
            plan,
            cost,
            wall_time,
            expansions,
        })
    }

    pub fn to_document(&self) -> PlanDocument {
        let mut doc = PlanDocument::from_plan(&self.plan);
        doc.strategy = Some(self.kind.name().to_string());
        doc.cost_total = Some(self.cost.total);
        doc.cost_per_layer = Some(self.cost.per_layer.clone());
        doc.wall_time_us = Some(self.wall_time.as_secs_f64() * 1e6);
        doc.expansions = Some(self.expansions);
        doc
    }
}

/// Relative tolerance under which two savings count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

pub(crate) fn definitely_greater(a: f64, b: f64) -> bool {
    a - b > TIE_TOLERANCE * a.abs().max(b.abs())
}
