use std::time::Instant;

use super::{PlannerError, PlannerKind, PlannerReport};
use crate::model::{apply_layer, LayerSolution, PathSpec, Segment, SwapPlan};

/// Balanced binary tree, ignoring node costs.
///
/// Each repeater range `[lo, hi]` is rooted at `ceil((lo + hi) / 2)`; the
/// deepest repeaters swap first, one single-parent segment each.
pub fn plan_bbt(path: &PathSpec) -> Result<PlannerReport, PlannerError> {
    let started = Instant::now();
    let r = path.repeater_count();
    // depth[i] for repeater at original position i + 1
    let mut depth = vec![0usize; r];
    if r > 0 {
        assign_depths(1, r, 0, &mut depth);
    }
    let max_depth = depth.iter().copied().max().unwrap_or(0);

    let mut current = path.clone();
    let mut layers = Vec::new();
    if r > 0 {
        for d in (0..=max_depth).rev() {
            let ids: Vec<&str> = (0..r)
                .filter(|&i| depth[i] == d)
                .map(|i| path.nodes()[i + 1].id.as_str())
                .collect();
            let segments = ids
                .iter()
                .map(|id| {
                    let pos = current.position(id).expect("shallower repeaters are still present");
                    Segment::spanning(&current, pos, pos)
                })
                .collect();
            let layer = LayerSolution::new(segments);
            current = apply_layer(&current, &layer)?;
            layers.push(layer);
        }
    }
    let plan = SwapPlan::new(path.clone(), layers)?;
    PlannerReport::finish(PlannerKind::BBT, plan, started, r as u64)
}

fn assign_depths(lo: usize, hi: usize, d: usize, depth: &mut [usize]) {
    let mid = (lo + hi).div_ceil(2);
    depth[mid - 1] = d;
    if lo < mid {
        assign_depths(lo, mid - 1, d + 1, depth);
    }
    if mid < hi {
        assign_depths(mid + 1, hi, d + 1, depth);
    }
}
