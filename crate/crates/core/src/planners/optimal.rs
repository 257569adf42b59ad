//! Exhaustive oracle over every layered plan, memoized on the set of remaining repeaters.

use std::time::Instant;

use super::{PlannerError, PlannerKind, PlannerReport};
use crate::model::{apply_layer, LayerSolution, PathSpec, Segment, SwapPlan};

pub const DEFAULT_OPTIMAL_BOUND: usize = 8;

/// Hard ceiling: the memo table has one entry per subset of repeaters.
const MAX_BOUND: usize = 20;

pub fn plan_optimal(path: &PathSpec) -> Result<PlannerReport, PlannerError> {
    plan_optimal_with_bound(path, DEFAULT_OPTIMAL_BOUND)
}

/// Minimum-cost plan for paths with at most `bound` repeaters.
pub fn plan_optimal_with_bound(path: &PathSpec, bound: usize) -> Result<PlannerReport, PlannerError> {
    let started = Instant::now();
    let r = path.repeater_count();
    let bound = bound.min(MAX_BOUND);
    if r > bound {
        return Err(PlannerError::BoundExceeded { repeaters: r, bound });
    }
    let costs = path.repeater_costs();
    let full = (1usize << r) - 1;

    // best[s]: cheapest cost to finish when the repeaters in `s` remain;
    // choice[s]: parents of the first layer of that plan.
    let mut best = vec![0.0f64; 1 << r];
    let mut choice = vec![0usize; 1 << r];
    let mut expansions = 0u64;
    // every proper subset of s is numerically smaller than s
    for s in 1..=full {
        let mut best_cost = f64::INFINITY;
        let mut best_t = 0;
        let mut t = s;
        while t != 0 {
            expansions += 1;
            let cost = layer_cost_within(t, s, &costs) + best[s & !t];
            if cost < best_cost {
                best_cost = cost;
                best_t = t;
            }
            t = (t - 1) & s;
        }
        best[s] = best_cost;
        choice[s] = best_t;
    }

    let mut current = path.clone();
    let mut layers = Vec::new();
    let mut s = full;
    while s != 0 {
        let t = choice[s];
        let layer = layer_within(t, s, &current);
        current = apply_layer(&current, &layer)?;
        layers.push(layer);
        s &= !t;
    }
    let plan = SwapPlan::new(path.clone(), layers)?;
    PlannerReport::finish(PlannerKind::OPTIMAL, plan, started, expansions)
}

/// Runs of `t` along the order of `s`, as inclusive ranges of original repeater indices.
fn runs_within(t: usize, s: usize, width: usize) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut open: Option<(usize, usize)> = None;
    for i in (0..width).filter(|i| s >> i & 1 == 1) {
        if t >> i & 1 == 1 {
            open = Some(match open {
                Some((first, _)) => (first, i),
                None => (i, i),
            });
        } else if let Some(run) = open.take() {
            runs.push(run);
        }
    }
    runs.extend(open);
    runs
}

fn layer_cost_within(t: usize, s: usize, costs: &[f64]) -> f64 {
    runs_within(t, s, costs.len())
        .into_iter()
        .map(|(first, last)| {
            (first..=last)
                .filter(|i| s >> i & 1 == 1)
                .fold(0.0, |acc, i| acc + costs[i])
        })
        .fold(0.0, f64::max)
}

fn layer_within(t: usize, s: usize, current: &PathSpec) -> LayerSolution {
    // current holds exactly the repeaters of s, so the k-th member of s sits at position k + 1
    let width = usize::BITS as usize - s.leading_zeros() as usize;
    let rank = |i: usize| (s & ((1usize << i) - 1)).count_ones() as usize + 1;
    let segments = runs_within(t, s, width)
        .into_iter()
        .map(|(first, last)| Segment::spanning(current, rank(first), rank(last)))
        .collect();
    LayerSolution::new(segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_plan;

    #[test]
    fn worked_example_is_145() {
        let path = PathSpec::from_costs(&[50.0, 30.0, 45.0, 100.0]).unwrap();
        let r = plan_optimal(&path).unwrap();
        assert_eq!(r.cost.total, 145.0);
        assert!(validate_plan(&r.plan).is_valid());
    }

    #[test]
    fn refuses_above_bound() {
        let path = PathSpec::from_costs(&[2.0; 9]).unwrap();
        match plan_optimal(&path) {
            Err(PlannerError::BoundExceeded { repeaters: 9, bound: 8 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(plan_optimal_with_bound(&path, 9).is_ok());
        let err = plan_optimal(&path).unwrap_err().to_string();
        assert!(err.contains('8'), "{err}");
    }

    #[test]
    fn trivial_paths() {
        let r = plan_optimal(&PathSpec::from_costs(&[]).unwrap()).unwrap();
        assert_eq!(r.plan.layer_count(), 0);
        let r = plan_optimal(&PathSpec::from_costs(&[3.0]).unwrap()).unwrap();
        assert_eq!(r.cost.total, 3.0);
    }

    #[test]
    fn uniform_costs_use_a_composite_when_it_pays() {
        // [1,1,1]: {x1,x2} composite (2) then x3 (1) = 3; or {x1},{x3} (1) then x2 (1) = 2
        let r = plan_optimal(&PathSpec::from_costs(&[1.0, 1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(r.cost.total, 2.0);
    }

    #[test]
    fn runs_follow_remaining_order() {
        // s = {0, 2, 3}, t = {0, 3}: 0 and 3 are separated by 2
        assert_eq!(runs_within(0b1001, 0b1101, 4), vec![(0, 0), (3, 3)]);
        // s = {0, 3}, t = {0, 3}: adjacent in the remaining path, one composite run
        assert_eq!(runs_within(0b1001, 0b1001, 4), vec![(0, 3)]);
    }
}
