use std::collections::{BTreeMap, BTreeSet};

use super::{MessageKind, TraceEvent, TraceKind};
use crate::model::SwapPlan;

/// Protocol violations found in an event trace.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProtocolReport {
    /// Attempts begun in a layer while an earlier layer still had unfinished parents.
    pub barrier_violations: usize,
    /// Attempts begun while another node of the same segment was mid-swap, or
    /// while the same node already had an attempt open.
    pub overlapping_attempts: usize,
    pub attempts_checked: usize,
}

impl ProtocolReport {
    pub fn is_clean(&self) -> bool {
        self.barrier_violations == 0 && self.overlapping_attempts == 0
    }
}

/// Replay `trace` against `plan` and count barrier and sequentiality violations.
pub fn check_protocol(plan: &SwapPlan, trace: &[TraceEvent]) -> ProtocolReport {
    let mut report = ProtocolReport::default();
    // per layer, parents whose latest report is ACK_DONE
    let mut done: Vec<BTreeSet<&str>> = vec![BTreeSet::new(); plan.layer_count()];
    // (layer, segment) -> node with an open attempt
    let mut open: BTreeMap<(usize, usize), String> = BTreeMap::new();
    for e in trace {
        let node = e.node.as_deref().unwrap_or("");
        match e.kind {
            TraceKind::Restart => {
                done.iter_mut().for_each(BTreeSet::clear);
                open.clear();
            }
            TraceKind::AttemptBegin => {
                report.attempts_checked += 1;
                let earlier_unfinished = plan.layers[..e.layer - 1]
                    .iter()
                    .zip(&done)
                    .any(|(layer, finished)| layer.parents().any(|p| !finished.contains(p)));
                if earlier_unfinished {
                    report.barrier_violations += 1;
                }
                if open.contains_key(&(e.layer, e.segment)) || open.values().any(|n| n == node) {
                    report.overlapping_attempts += 1;
                }
                open.insert((e.layer, e.segment), node.to_string());
            }
            TraceKind::AttemptEnd => {
                open.remove(&(e.layer, e.segment));
            }
            TraceKind::Message(MessageKind::AckDone) => {
                if let Some(p) = plan.layers[e.layer - 1].parents().find(|p| *p == node) {
                    done[e.layer - 1].insert(p);
                }
            }
            TraceKind::Message(MessageKind::Failed) => {
                // on-demand resets the whole segment; under full-path a restart follows
                let seg = &plan.layers[e.layer - 1].segments[e.segment - 1];
                for p in &seg.parents {
                    done[e.layer - 1].remove(p.as_str());
                }
            }
            _ => {}
        }
    }
    report
}
