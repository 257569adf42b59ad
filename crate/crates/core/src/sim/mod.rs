//! Discrete-event execution of a swap plan under a central controller.
//!
//! The controller dispatches START_ES to the first parent of every segment of
//! a layer, advances composite parents one member at a time on ACK_DONE, and
//! opens the next layer only once every parent has reported. A failed attempt
//! is reported with FAILED; the controller sends RETRY to the domain
//! controller owning the node, which re-prepares pairs and answers ENT_READY.

mod attempts;
mod config;
mod controller;
mod engine;
mod message;
mod metrics;
mod protocol;

use thiserror::Error;

use crate::ModelError;

pub use attempts::sample_attempts;
pub use config::{AttemptModel, RetransmissionPolicy, SimConfig};
pub use controller::{AckOutcome, Controller, ControllerState, Dispatch, FailureResponse};
pub use engine::{run_simulation, run_simulation_traced};
pub use message::{Endpoint, Message, MessageKind, TraceEvent, TraceKind, TRACE_HEADER};
pub use metrics::{Metrics, RNG_NAME};
pub use protocol::{check_protocol, ProtocolReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid simulator configuration: {0}")]
    Config(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("simulation cutoff reached at time {}", .0.completion_time)]
    TimedOut(Box<Metrics>),
}
