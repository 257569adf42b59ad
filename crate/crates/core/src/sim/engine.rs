use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::controller::{AckOutcome, Controller, Dispatch};
use super::{
    AttemptModel, Endpoint, Message, MessageKind, Metrics, SimConfig, SimError, TraceEvent, TraceKind,
};
use crate::model::SwapPlan;

#[derive(Debug, Clone)]
enum Action {
    Deliver(Message),
    AttemptEnd { node: String, layer: usize, segment: usize },
}

#[derive(Debug)]
struct Scheduled {
    time: f64,
    layer: usize,
    segment: usize,
    node: usize,
    rank: u8,
    seq: u64,
    epoch: u64,
    action: Action,
}

impl Scheduled {
    fn key(&self) -> (usize, usize, usize, u8, u64) {
        (self.layer, self.segment, self.node, self.rank, self.seq)
    }
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Scheduled {}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scheduled {
    // reversed: BinaryHeap pops the earliest event
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.key().cmp(&self.key()))
    }
}

struct Engine<'a> {
    plan: &'a SwapPlan,
    config: &'a SimConfig,
    controller: Controller<'a>,
    heap: BinaryHeap<Scheduled>,
    seq: u64,
    /// Bumped on every full-path restart; older events are discarded.
    epoch: u64,
    /// Event times inside a layer are `layer_start + offsets[segment]`, so
    /// with zero message and preparation delays a layer ends exactly at
    /// `layer_start + layer cost`.
    layer_start: f64,
    offsets: Vec<f64>,
    /// Node id -> (original position, cost).
    nodes: HashMap<&'a str, (usize, f64)>,
    /// One stream per original position, shared by every plan over the path.
    rngs: Vec<ChaCha8Rng>,
    metrics: Metrics,
    trace: Option<Vec<TraceEvent>>,
    done: bool,
}

impl<'a> Engine<'a> {
    fn new(plan: &'a SwapPlan, config: &'a SimConfig, traced: bool) -> Self {
        let path = &plan.original_path;
        let nodes = path
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), (i, n.cost)))
            .collect();
        let rngs = (0..path.len())
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(i as u64);
                rng
            })
            .collect();
        Engine {
            plan,
            config,
            controller: Controller::new(plan, config.policy),
            heap: BinaryHeap::new(),
            seq: 0,
            epoch: 0,
            layer_start: 0.0,
            offsets: Vec::new(),
            nodes,
            rngs,
            metrics: Metrics::new(config.seed),
            trace: traced.then(Vec::new),
            done: false,
        }
    }

    fn position(&self, node: &str) -> Result<usize, SimError> {
        self.nodes
            .get(node)
            .map(|&(p, _)| p)
            .ok_or_else(|| SimError::Protocol(format!("unknown node {node}")))
    }

    fn push(&mut self, time: f64, layer: usize, segment: usize, node: usize, rank: u8, action: Action) {
        self.seq += 1;
        self.heap.push(Scheduled {
            time,
            layer,
            segment,
            node,
            rank,
            seq: self.seq,
            epoch: self.epoch,
            action,
        });
    }

    /// Schedule `message` `delay` after the segment's clock, advancing that clock.
    fn send_in_segment(&mut self, message: Message, delay: f64) -> Result<(), SimError> {
        let s = message.segment - 1;
        self.offsets[s] += delay;
        let time = self.layer_start + self.offsets[s];
        self.send_at(message, time)
    }

    fn send_at(&mut self, message: Message, time: f64) -> Result<(), SimError> {
        let node = match &message.node {
            Some(id) => self.position(id)?,
            None => 0,
        };
        let (layer, segment, rank) = (message.layer, message.segment, message.kind as u8);
        self.push(time, layer, segment, node, rank, Action::Deliver(message));
        Ok(())
    }

    fn record(&mut self, time: f64, kind: TraceKind, src: Endpoint, dst: Endpoint, layer: usize, segment: usize, node: Option<&str>) {
        if let Some(trace) = &mut self.trace {
            trace.push(TraceEvent {
                time,
                kind,
                src,
                dst,
                layer,
                segment,
                node: node.map(str::to_string),
            });
        }
    }

    fn record_message(&mut self, time: f64, m: &Message) {
        if let Some(trace) = &mut self.trace {
            trace.push(TraceEvent {
                time,
                kind: TraceKind::Message(m.kind),
                src: m.src.clone(),
                dst: m.dst.clone(),
                layer: m.layer,
                segment: m.segment,
                node: m.node.clone(),
            });
        }
    }

    fn advance(&mut self, now: f64) -> Result<(), SimError> {
        match self.controller.barrier_advance()? {
            Dispatch::Layer { messages, .. } => {
                self.layer_start = now;
                self.offsets = vec![0.0; messages.len()];
                for m in messages {
                    self.send_in_segment(m, self.config.classical_latency)?;
                }
            }
            Dispatch::Complete => {
                self.metrics.completion_time = now;
                self.record(now, TraceKind::Complete, Endpoint::Controller, Endpoint::Controller, 0, 0, None);
                self.done = true;
            }
        }
        Ok(())
    }

    fn begin_attempt(&mut self, now: f64, node: &str, layer: usize, segment: usize) -> Result<(), SimError> {
        let (pos, cost) = *self
            .nodes
            .get(node)
            .ok_or_else(|| SimError::Protocol(format!("unknown node {node}")))?;
        self.record(now, TraceKind::AttemptBegin, Endpoint::Node(node.into()), Endpoint::Node(node.into()), layer, segment, Some(node));
        let duration = match self.config.attempt_model {
            AttemptModel::Stochastic => self.config.attempt_latency,
            AttemptModel::Deterministic => cost * self.config.attempt_latency,
        };
        self.offsets[segment - 1] += duration;
        let time = self.layer_start + self.offsets[segment - 1];
        let action = Action::AttemptEnd {
            node: node.to_string(),
            layer,
            segment,
        };
        self.push(time, layer, segment, pos, u8::MAX, action);
        Ok(())
    }

    fn end_attempt(&mut self, now: f64, node: String, layer: usize, segment: usize) -> Result<(), SimError> {
        let (pos, cost) = self.nodes[node.as_str()];
        self.metrics.attempts += 1;
        self.record(now, TraceKind::AttemptEnd, Endpoint::Node(node.clone()), Endpoint::Node(node.clone()), layer, segment, Some(&node));
        let success = match self.config.attempt_model {
            AttemptModel::Deterministic => true,
            AttemptModel::Stochastic => self.rngs[pos].random_bool(1.0 / cost),
        };
        let kind = if success { MessageKind::AckDone } else { MessageKind::Failed };
        let reply = Message {
            kind,
            src: Endpoint::Node(node.clone()),
            dst: Endpoint::Controller,
            layer,
            segment,
            node: Some(node),
        };
        self.send_in_segment(reply, self.config.classical_latency)
    }

    fn deliver(&mut self, now: f64, m: Message) -> Result<(), SimError> {
        self.record_message(now, &m);
        let cl = self.config.classical_latency;
        let node = m.node.clone().unwrap_or_default();
        match m.kind {
            MessageKind::StartEs => {
                let ack = Message {
                    kind: MessageKind::AckStarted,
                    src: m.dst.clone(),
                    dst: Endpoint::Controller,
                    ..m.clone()
                };
                self.send_at(ack, now + cl)?;
                self.begin_attempt(now, &node, m.layer, m.segment)
            }
            MessageKind::AckStarted => Ok(()),
            MessageKind::AckDone => match self.controller.ack_done(&node, m.layer)? {
                AckOutcome::NextParent(next) => self.send_in_segment(next, cl),
                AckOutcome::SegmentDone => Ok(()),
                AckOutcome::BarrierClear => {
                    let duration = self.offsets.iter().copied().fold(0.0, f64::max);
                    self.metrics.per_layer_times.push(duration);
                    self.advance(now)
                }
            },
            MessageKind::Failed => {
                self.metrics.failures += 1;
                let response = self.controller.handle_failure(&node, m.layer)?;
                let mut retry = response.retry;
                if response.restart {
                    self.epoch += 1;
                    retry.segment = 0;
                    self.send_at(retry, now + cl)
                } else {
                    self.send_in_segment(retry, cl)
                }
            }
            MessageKind::Retry => {
                self.metrics.retransmissions += 1;
                let (pairs, target) = if m.segment == 0 {
                    (self.plan.original_path.hops(), Endpoint::Controller)
                } else {
                    let seg = &self.plan.layers[m.layer - 1].segments[m.segment - 1];
                    (seg.pair_count(), Endpoint::Node(seg.parents[0].clone()))
                };
                self.metrics.pairs_prepared += pairs as u64;
                let ready = Message {
                    kind: MessageKind::EntReady,
                    src: m.dst.clone(),
                    node: match &target {
                        Endpoint::Node(id) => Some(id.clone()),
                        _ => m.node.clone(),
                    },
                    dst: target,
                    ..m
                };
                if ready.segment == 0 {
                    self.send_at(ready, now + self.config.prep_latency + cl)
                } else {
                    self.send_in_segment(ready, self.config.prep_latency + cl)
                }
            }
            MessageKind::EntReady => match m.dst {
                Endpoint::Controller => {
                    self.metrics.restarts += 1;
                    self.metrics.per_layer_times.clear();
                    self.record(now, TraceKind::Restart, Endpoint::Controller, Endpoint::Controller, 1, 0, None);
                    self.advance(now)
                }
                _ => self.begin_attempt(now, &node, m.layer, m.segment),
            },
        }
    }

    fn run(&mut self) -> Result<(), SimError> {
        // every link starts with one pair
        self.metrics.pairs_prepared = self.plan.original_path.hops() as u64;
        let start = 0.0 + self.config.prep_latency;
        self.advance(start)?;
        while !self.done {
            let Some(event) = self.heap.pop() else {
                return Err(SimError::Protocol("event queue drained before completion".into()));
            };
            if event.epoch != self.epoch {
                continue;
            }
            if event.time > self.config.max_sim_time {
                self.metrics.completion_time = self.config.max_sim_time;
                return Err(SimError::TimedOut(Box::new(self.metrics.clone())));
            }
            match event.action {
                Action::Deliver(m) => self.deliver(event.time, m)?,
                Action::AttemptEnd { node, layer, segment } => self.end_attempt(event.time, node, layer, segment)?,
            }
        }
        Ok(())
    }
}

/// Execute `plan` under the central-controller protocol.
pub fn run_simulation(plan: &SwapPlan, config: &SimConfig) -> Result<Metrics, SimError> {
    run(plan, config, false).map(|(m, _)| m)
}

/// As [`run_simulation`], also returning every event in processing order.
pub fn run_simulation_traced(plan: &SwapPlan, config: &SimConfig) -> Result<(Metrics, Vec<TraceEvent>), SimError> {
    run(plan, config, true).map(|(m, t)| (m, t.unwrap_or_default()))
}

fn run(plan: &SwapPlan, config: &SimConfig, traced: bool) -> Result<(Metrics, Option<Vec<TraceEvent>>), SimError> {
    config.validate()?;
    plan.check()?;
    let mut engine = Engine::new(plan, config, traced);
    engine.run()?;
    Ok((engine.metrics, engine.trace))
}
