//! Planning and simulation of parallel entanglement swapping on repeater chains.
//!
//! A path of repeaters, each with a swap cost in expected attempts, is turned
//! into a layered swapping plan: every layer is a set of segments that swap in
//! parallel, and the parents inside a segment swap one after another. The
//! [`planners`] build such plans with six strategies plus an exhaustive oracle,
//! the [`sim`] module executes a plan under a central controller with barrier
//! synchronization and retransmission, and [`experiments`] runs seeded sweeps
//! that write flat CSV results.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod model;
pub mod planners;
pub mod sim;

pub use error::ModelError;
