use std::time::Instant;

use super::{PlannerError, PlannerKind, PlannerReport};
use crate::model::{apply_layer, LayerSolution, PathSpec, Segment, SwapPlan};

/// One repeater per layer, left to right. A path without repeaters yields the
/// empty plan.
pub fn plan_sequential(path: &PathSpec) -> Result<PlannerReport, PlannerError> {
    let started = Instant::now();
    let mut current = path.clone();
    let mut layers = Vec::with_capacity(path.repeater_count());
    while current.len() > 2 {
        let layer = LayerSolution::new(vec![Segment::spanning(&current, 1, 1)]);
        current = apply_layer(&current, &layer)?;
        layers.push(layer);
    }
    let expansions = layers.len() as u64;
    let plan = SwapPlan::new(path.clone(), layers)?;
    PlannerReport::finish(PlannerKind::SEQUENTIAL, plan, started, expansions)
}
