//! Segment Greedy: one left-to-right pass per layer, opening, growing or
//! closing segments by their net benefit against the costliest segment so far.

use std::time::Instant;

use super::{PlannerError, PlannerKind, PlannerReport};
use crate::model::{apply_layer, LayerSolution, PathSpec, Segment, SwapPlan};

/// Net benefit of opening a single-parent segment of cost `cn` when the
/// costliest segment of the layer so far costs `msc`.
pub fn net_benefit_current(cn: f64, msc: f64) -> f64 {
    cn.min(msc) - (cn - msc).max(0.0)
}

/// Net benefit of growing a segment of cost `ccs` by a node of cost `cn`,
/// and the growth relative to the current segment's benefit `nbcs`.
/// Returns `(nbfs, nbg)`.
pub fn net_benefit_growth(ccs: f64, cn: f64, msc: f64, nbcs: f64) -> (f64, f64) {
    let future = ccs + cn;
    let nbfs = future.min(msc) - (future - msc).max(0.0);
    (nbfs, nbfs - nbcs)
}

/// Scan state while one layer is being built.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentGreedyState {
    /// Largest closed segment cost in the layer so far.
    pub msc: f64,
    /// Cost of the open segment.
    pub ccs: f64,
    /// Net benefit recorded when the open segment was started; not recomputed as it grows.
    pub nbcs: f64,
    /// Parent positions `(first, last)` of the open segment on the current path.
    pub open: Option<(usize, usize)>,
    /// Position on the current path being examined.
    pub cursor: usize,
}

impl SegmentGreedyState {
    pub fn current_segment(&self, path: &PathSpec) -> Option<Segment> {
        self.open
            .map(|(first, last)| Segment::spanning(path, first, last))
    }
}

/// Build one layer over `path` (at least three nodes). Returns the layer and
/// the number of nodes examined.
fn build_layer(path: &PathSpec, composite_allowed: bool) -> (LayerSolution, u64) {
    let costs: Vec<f64> = path.nodes().iter().map(|n| n.cost).collect();
    let len = path.len();
    let mut closed = vec![(1usize, 1usize)];
    let mut state = SegmentGreedyState {
        msc: costs[1],
        ccs: 0.0,
        nbcs: 0.0,
        open: None,
        cursor: 3,
    };
    let mut examined = 1u64;

    // The cursor never reaches the last user. While a segment is open the
    // cursor sits on its tail.
    while state.cursor < len - 1 {
        examined += 1;
        let i = state.cursor;
        let cn = costs[i];
        match state.open {
            None => {
                let nbcs = net_benefit_current(cn, state.msc);
                if nbcs >= 0.0 {
                    state.open = Some((i, i));
                    state.ccs = cn;
                    state.nbcs = nbcs;
                }
            }
            Some((first, last)) => {
                let grow = composite_allowed && {
                    let (_, nbg) = net_benefit_growth(state.ccs, cn, state.msc, state.nbcs);
                    nbg >= 0.0
                };
                if grow {
                    debug_assert_eq!(last + 1, i);
                    state.open = Some((first, i));
                    state.ccs += cn;
                } else {
                    // The tail stays a leaf: the next candidate opener is past it.
                    closed.push((first, last));
                    state.msc = state.msc.max(state.ccs);
                    state.open = None;
                }
            }
        }
        state.cursor += 1;
    }
    if let Some(span) = state.open.take() {
        closed.push(span);
    }
    let segments = closed
        .into_iter()
        .map(|(first, last)| Segment::spanning(path, first, last))
        .collect();
    (LayerSolution::new(segments), examined)
}

pub fn plan_segment_greedy(path: &PathSpec, composite_allowed: bool) -> Result<PlannerReport, PlannerError> {
    let started = Instant::now();
    let kind = if composite_allowed {
        PlannerKind::PSES_SEGMENT_GREEDY
    } else {
        PlannerKind::IBT_SEGMENT_GREEDY
    };
    let mut current = path.clone();
    let mut layers = Vec::new();
    let mut expansions = 0;
    while current.len() > 2 {
        let (layer, examined) = build_layer(&current, composite_allowed);
        expansions += examined;
        current = apply_layer(&current, &layer)?;
        layers.push(layer);
    }
    let plan = SwapPlan::new(path.clone(), layers)?;
    PlannerReport::finish(kind, plan, started, expansions)
}
