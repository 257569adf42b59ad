use std::fmt;

use serde::{Deserialize, Serialize};

/// Message endpoints. Domain controllers are numbered by repeater position:
/// repeaters 1-3 belong to domain 0, 4-6 to domain 1, and so on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Endpoint {
    Controller,
    Domain(usize),
    Node(String),
}

impl Endpoint {
    pub fn domain_of(position: usize) -> Endpoint {
        Endpoint::Domain(position.saturating_sub(1) / 3)
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Controller => f.write_str("controller"),
            Endpoint::Domain(k) => write!(f, "ldc{k}"),
            Endpoint::Node(id) => f.write_str(id),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MessageKind {
    StartEs,
    AckStarted,
    AckDone,
    Failed,
    Retry,
    EntReady,
}

impl MessageKind {
    pub fn name(&self) -> &'static str {
        match self {
            MessageKind::StartEs => "START_ES",
            MessageKind::AckStarted => "ACK_STARTED",
            MessageKind::AckDone => "ACK_DONE",
            MessageKind::Failed => "FAILED",
            MessageKind::Retry => "RETRY",
            MessageKind::EntReady => "ENT_READY",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub kind: MessageKind,
    pub src: Endpoint,
    pub dst: Endpoint,
    /// 1-based layer.
    pub layer: usize,
    /// 1-based segment within the layer; 0 when not tied to a segment.
    pub segment: usize,
    /// Node the message is about.
    pub node: Option<String>,
}

/// Everything that can appear in an event trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceKind {
    Message(MessageKind),
    AttemptBegin,
    AttemptEnd,
    Restart,
    Complete,
}

impl TraceKind {
    pub fn name(&self) -> &'static str {
        match self {
            TraceKind::Message(k) => k.name(),
            TraceKind::AttemptBegin => "ATTEMPT_BEGIN",
            TraceKind::AttemptEnd => "ATTEMPT_END",
            TraceKind::Restart => "RESTART",
            TraceKind::Complete => "COMPLETE",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    pub time: f64,
    pub kind: TraceKind,
    pub src: Endpoint,
    pub dst: Endpoint,
    pub layer: usize,
    pub segment: usize,
    pub node: Option<String>,
}

pub const TRACE_HEADER: &str = "time,kind,src,dst,layer,segment,node";

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{},{}",
            self.time,
            self.kind.name(),
            self.src,
            self.dst,
            self.layer,
            self.segment,
            self.node.as_deref().unwrap_or("")
        )
    }
}
