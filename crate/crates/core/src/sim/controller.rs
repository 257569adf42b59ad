use std::collections::BTreeSet;

use super::{Endpoint, Message, MessageKind, RetransmissionPolicy, SimError};
use crate::model::SwapPlan;

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerState {
    /// 1-based layer in progress; 0 before the first dispatch.
    pub current_layer: usize,
    /// Parents of the current layer that have not yet reported ACK_DONE.
    pub pending_parents: BTreeSet<String>,
    /// Per segment, the index of the parent currently swapping.
    pub segment_cursors: Vec<usize>,
    pub policy: RetransmissionPolicy,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dispatch {
    /// START_ES for the first parent of every segment of `layer`.
    Layer { layer: usize, messages: Vec<Message> },
    Complete,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AckOutcome {
    /// START_ES for the next parent of the same segment.
    NextParent(Message),
    SegmentDone,
    /// Every parent of the layer has finished.
    BarrierClear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FailureResponse {
    /// RETRY for the domain controller owning the failed node.
    pub retry: Message,
    /// Pairs the domain controller must re-prepare.
    pub pairs: usize,
    /// Who receives ENT_READY once the pairs are ready: the segment's first
    /// parent, or the controller itself when the whole plan restarts.
    pub ready_target: Endpoint,
    pub restart: bool,
}

/// Central controller: barrier synchronization between layers and sequential
/// dispatch inside composite parents.
#[derive(Debug, Clone)]
pub struct Controller<'a> {
    plan: &'a SwapPlan,
    state: ControllerState,
}

impl<'a> Controller<'a> {
    pub fn new(plan: &'a SwapPlan, policy: RetransmissionPolicy) -> Self {
        Controller {
            plan,
            state: ControllerState {
                current_layer: 0,
                pending_parents: BTreeSet::new(),
                segment_cursors: Vec::new(),
                policy,
            },
        }
    }

    pub fn state(&self) -> &ControllerState {
        &self.state
    }

    fn start(&self, layer: usize, segment: usize) -> Message {
        let seg = &self.plan.layers[layer - 1].segments[segment];
        let node = seg.parents[self.state.segment_cursors[segment]].clone();
        Message {
            kind: MessageKind::StartEs,
            src: Endpoint::Controller,
            dst: Endpoint::Node(node.clone()),
            layer,
            segment: segment + 1,
            node: Some(node),
        }
    }

    /// Open the next layer, or report completion after the last one.
    pub fn barrier_advance(&mut self) -> Result<Dispatch, SimError> {
        if !self.state.pending_parents.is_empty() {
            return Err(SimError::Protocol(format!(
                "barrier advanced in layer {} with {} parents pending",
                self.state.current_layer,
                self.state.pending_parents.len()
            )));
        }
        if self.state.current_layer == self.plan.layer_count() {
            return Ok(Dispatch::Complete);
        }
        self.state.current_layer += 1;
        let layer = self.state.current_layer;
        let solution = &self.plan.layers[layer - 1];
        self.state.pending_parents = solution.parents().map(str::to_string).collect();
        self.state.segment_cursors = vec![0; solution.segments.len()];
        let messages = (0..solution.segments.len()).map(|s| self.start(layer, s)).collect();
        Ok(Dispatch::Layer { layer, messages })
    }

    /// Segment index whose active parent is `node`.
    fn active_segment(&self, node: &str, layer: usize) -> Result<usize, SimError> {
        if layer == 0 || layer != self.state.current_layer {
            return Err(SimError::Protocol(format!(
                "report from {node} for layer {layer} while layer {} is active",
                self.state.current_layer
            )));
        }
        self.plan.layers[layer - 1]
            .segments
            .iter()
            .zip(&self.state.segment_cursors)
            .position(|(seg, &c)| seg.parents.get(c).is_some_and(|p| p == node))
            .ok_or_else(|| SimError::Protocol(format!("{node} is not swapping in layer {layer}")))
    }

    pub fn ack_done(&mut self, node: &str, layer: usize) -> Result<AckOutcome, SimError> {
        let s = self.active_segment(node, layer)?;
        self.state.pending_parents.remove(node);
        self.state.segment_cursors[s] += 1;
        let seg = &self.plan.layers[layer - 1].segments[s];
        if self.state.segment_cursors[s] < seg.parents.len() {
            Ok(AckOutcome::NextParent(self.start(layer, s)))
        } else if self.state.pending_parents.is_empty() {
            Ok(AckOutcome::BarrierClear)
        } else {
            Ok(AckOutcome::SegmentDone)
        }
    }

    /// React to FAILED from `node` in `layer` under the configured policy.
    pub fn handle_failure(&mut self, node: &str, layer: usize) -> Result<FailureResponse, SimError> {
        let s = self.active_segment(node, layer)?;
        let seg = &self.plan.layers[layer - 1].segments[s];
        let position = self
            .plan
            .original_path
            .position(node)
            .ok_or_else(|| SimError::Protocol(format!("unknown node {node}")))?;
        let retry = Message {
            kind: MessageKind::Retry,
            src: Endpoint::Controller,
            dst: Endpoint::domain_of(position),
            layer,
            segment: s + 1,
            node: Some(node.to_string()),
        };
        match self.state.policy {
            RetransmissionPolicy::OnDemand => {
                // the whole composite parent swaps again from its first member
                self.state.segment_cursors[s] = 0;
                self.state
                    .pending_parents
                    .extend(seg.parents.iter().cloned());
                Ok(FailureResponse {
                    retry,
                    pairs: seg.pair_count(),
                    ready_target: Endpoint::Node(seg.parents[0].clone()),
                    restart: false,
                })
            }
            RetransmissionPolicy::FullPath => {
                self.state.current_layer = 0;
                self.state.pending_parents.clear();
                self.state.segment_cursors.clear();
                Ok(FailureResponse {
                    retry,
                    pairs: self.plan.original_path.hops(),
                    ready_target: Endpoint::Controller,
                    restart: true,
                })
            }
        }
    }
}
