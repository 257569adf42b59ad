//! Domain types shared by the planners and the simulator.

mod document;
mod path;
mod plan;
mod profile;

pub use document::PlanDocument;
pub use path::{Node, PathSpec, Role};
pub use plan::{
    apply_layer, layer_cost, plan_cost, segment_cost, validate_layer, validate_plan, LayerSolution,
    PlanCostBreakdown, Segment, SwapPlan, ValidationReport, Violation, ViolationKind,
};
pub use profile::{channel_quality, node_cost, InterferenceProfile, MAX_CHANNEL_NOISE};
