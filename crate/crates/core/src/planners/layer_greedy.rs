//! Layer Greedy: every layer is the single-layer solution with the largest saving.

use std::cmp::Ordering;
use std::time::Instant;

use super::{definitely_greater, PlannerError, PlannerKind, PlannerReport};
use crate::model::{layer_cost, segment_cost, LayerSolution, PathSpec, Segment, SwapPlan};
use crate::ModelError;

/// Time a layer saves over swapping its parents one at a time:
/// the sum of segment costs minus the largest segment cost.
pub fn layer_saving(layer: &LayerSolution, path: &PathSpec) -> Result<f64, ModelError> {
    let max = layer_cost(layer, path)?;
    let sum = layer
        .segments
        .iter()
        .try_fold(0.0, |acc, s| Ok::<_, ModelError>(acc + segment_cost(s, path)?))?;
    Ok(sum - max)
}

/// One enumerated layer solution with its resulting path and saving.
struct Candidate {
    layer: LayerSolution,
    remaining: PathSpec,
    saving: f64,
    /// Chosen parents as a bitmask over the current repeaters, lowest bit leftmost.
    mask: u64,
}

/// Runs of consecutive set bits in `mask` over `width` bits, as inclusive
/// `(first, last)` bit indices.
fn runs(mask: u64, width: usize) -> impl Iterator<Item = (usize, usize)> {
    let mut i = 0;
    std::iter::from_fn(move || {
        while i < width && mask >> i & 1 == 0 {
            i += 1;
        }
        if i >= width {
            return None;
        }
        let first = i;
        while i + 1 < width && mask >> (i + 1) & 1 == 1 {
            i += 1;
        }
        let last = i;
        i += 1;
        Some((first, last))
    })
}

fn find_layer_solutions(path: &PathSpec, composite_allowed: bool) -> Vec<Candidate> {
    if path.len() <= 2 {
        return Vec::new();
    }
    let width = path.repeater_count();
    assert!(width < 64, "layer enumeration supports at most 63 repeaters");
    let max_segments = (path.len() - 2).div_ceil(2);
    let costs = path.repeater_costs();

    let mut by_count: Vec<Vec<Candidate>> = (0..max_segments).map(|_| Vec::new()).collect();
    for mask in 1..(1u64 << width) {
        if !composite_allowed && mask & (mask >> 1) != 0 {
            continue;
        }
        let mut segments = Vec::new();
        let mut sum = 0.0;
        let mut max = 0.0f64;
        for (first, last) in runs(mask, width) {
            let cost = costs[first..=last].iter().fold(0.0, |acc, c| acc + c);
            sum += cost;
            max = max.max(cost);
            segments.push(Segment::spanning(path, first + 1, last + 1));
        }
        let count = segments.len();
        let remaining = path.retain_positions(|pos| pos == 0 || pos > width || mask >> (pos - 1) & 1 == 0);
        by_count[count - 1].push(Candidate {
            layer: LayerSolution::new(segments),
            remaining,
            saving: sum - max,
            mask,
        });
    }
    by_count.into_iter().flatten().collect()
}

/// Every valid layer over `path`: one to `ceil((len - 2) / 2)` segments with
/// disjoint, non-adjacent parents. Without composites each segment has exactly
/// one parent. Paths of two nodes or fewer have none.
pub fn enumerate_layer_solutions(path: &PathSpec, composite_allowed: bool) -> Vec<LayerSolution> {
    find_layer_solutions(path, composite_allowed)
        .into_iter()
        .map(|c| c.layer)
        .collect()
}

/// Preference order among candidates: larger saving, then more parents removed,
/// then the lexicographically smallest list of parent positions.
fn compare(a: &Candidate, b: &Candidate) -> Ordering {
    if definitely_greater(a.saving, b.saving) {
        return Ordering::Less;
    }
    if definitely_greater(b.saving, a.saving) {
        return Ordering::Greater;
    }
    match b.mask.count_ones().cmp(&a.mask.count_ones()) {
        Ordering::Equal => {}
        other => return other,
    }
    let diff = a.mask ^ b.mask;
    if diff == 0 {
        Ordering::Equal
    } else if a.mask & diff & diff.wrapping_neg() != 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

pub fn plan_layer_greedy(path: &PathSpec, composite_allowed: bool) -> Result<PlannerReport, PlannerError> {
    let started = Instant::now();
    let kind = if composite_allowed {
        PlannerKind::PSES_LAYER_GREEDY
    } else {
        PlannerKind::IBT_LAYER_GREEDY
    };
    let mut current = path.clone();
    let mut layers = Vec::new();
    let mut expansions = 0u64;
    while current.len() > 2 {
        let candidates = find_layer_solutions(&current, composite_allowed);
        expansions += candidates.len() as u64;
        let best = candidates
            .into_iter()
            .min_by(compare)
            .expect("a path with a repeater has at least one layer solution");
        layers.push(best.layer);
        current = best.remaining;
    }
    let plan = SwapPlan::new(path.clone(), layers)?;
    PlannerReport::finish(kind, plan, started, expansions)
}
