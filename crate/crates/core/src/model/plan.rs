//! Segments, layers and plans of the layered swapping model, with their cost semantics.
//!
//! A layer executes its segments in parallel and the parents of one segment in
//! sequence, so a segment costs the sum of its parent costs, a layer costs the
//! maximum of its segment costs, and a plan costs the sum of its layer costs.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::path::PathSpec;
use crate::error::ModelError;

/// A contiguous sub-path `head, parents..., tail`. Executing the parents' swaps
/// entangles `head` with `tail`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub head: String,
    pub parents: Vec<String>,
    pub tail: String,
}

impl Segment {
    pub fn new(head: impl Into<String>, parents: Vec<String>, tail: impl Into<String>) -> Self {
        Segment {
            head: head.into(),
            parents,
            tail: tail.into(),
        }
    }

    /// Build the segment spanning `path[first - 1 ..= last + 1]`, whose parents are
    /// `path[first..=last]`.
    pub fn spanning(path: &PathSpec, first: usize, last: usize) -> Self {
        let nodes = path.nodes();
        Segment {
            head: nodes[first - 1].id.clone(),
            parents: nodes[first..=last].iter().map(|n| n.id.clone()).collect(),
            tail: nodes[last + 1].id.clone(),
        }
    }

    pub fn is_composite(&self) -> bool {
        self.parents.len() > 1
    }

    /// Number of nodes, head and tail included.
    pub fn node_count(&self) -> usize {
        self.parents.len() + 2
    }

    /// Number of entangled pairs the segment consumes: one per edge it spans.
    pub fn pair_count(&self) -> usize {
        self.parents.len() + 1
    }
}

/// The segments executed in parallel during one layer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LayerSolution {
    pub segments: Vec<Segment>,
}

impl LayerSolution {
    pub fn new(segments: Vec<Segment>) -> Self {
        LayerSolution { segments }
    }

    pub fn parent_count(&self) -> usize {
        self.segments.iter().map(|s| s.parents.len()).sum()
    }

    pub fn parents(&self) -> impl Iterator<Item = &str> {
        self.segments
            .iter()
            .flat_map(|s| s.parents.iter().map(String::as_str))
    }
}

/// The layered swapping model of a path.
///
/// `remaining_paths[0]` is the original path and `remaining_paths[k]` is the
/// path left after layer `k` (1-based); layer `k` is defined over
/// `remaining_paths[k - 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapPlan {
    pub original_path: PathSpec,
    pub layers: Vec<LayerSolution>,
    pub remaining_paths: Vec<PathSpec>,
}

impl SwapPlan {
    /// Build a plan from its layers, deriving the remaining paths. Fails unless
    /// the result passes [`validate_plan`].
    pub fn new(original_path: PathSpec, layers: Vec<LayerSolution>) -> Result<Self, ModelError> {
        let mut remaining_paths = Vec::with_capacity(layers.len() + 1);
        remaining_paths.push(original_path.clone());
        for (k, layer) in layers.iter().enumerate() {
            let next = apply_layer(&remaining_paths[k], layer).map_err(|e| e.in_layer(k + 1))?;
            remaining_paths.push(next);
        }
        let plan = SwapPlan {
            original_path,
            layers,
            remaining_paths,
        };
        plan.check()?;
        Ok(plan)
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// The path layer `k` (1-based) is executed over.
    pub fn path_for_layer(&self, k: usize) -> &PathSpec {
        &self.remaining_paths[k - 1]
    }

    pub fn check(&self) -> Result<(), ModelError> {
        let report = validate_plan(self);
        match report.violations.into_iter().next() {
            None => Ok(()),
            Some(v) => Err(ModelError::Structural {
                layer: v.layer,
                segment: v.segment,
                message: v.kind.to_string(),
            }),
        }
    }

    pub fn has_composite(&self) -> bool {
        self.layers
            .iter()
            .any(|l| l.segments.iter().any(Segment::is_composite))
    }
}

/// Cost of a plan, layer by layer, in attempts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanCostBreakdown {
    pub per_layer: Vec<f64>,
    pub total: f64,
}

/// Positions of `head, parents..., tail` on `path`, checked for contiguity and roles.
fn locate_segment(segment: &Segment, path: &PathSpec) -> Result<(usize, usize), ViolationKind> {
    if segment.parents.is_empty() {
        return Err(ViolationKind::EmptyParents);
    }
    let ids = std::iter::once(&segment.head)
        .chain(segment.parents.iter())
        .chain(std::iter::once(&segment.tail));
    let mut first = None;
    for (offset, id) in ids.enumerate() {
        let pos = path
            .position(id)
            .ok_or_else(|| ViolationKind::UnknownNode(id.clone()))?;
        match first {
            None => first = Some(pos),
            Some(start) if pos != start + offset => return Err(ViolationKind::NotContiguous),
            _ => {}
        }
    }
    let head = first.expect("segment has at least three ids");
    let first_parent = head + 1;
    let last_parent = head + segment.parents.len();
    for pos in first_parent..=last_parent {
        if !path.nodes()[pos].is_repeater() {
            return Err(ViolationKind::ParentNotRepeater(path.nodes()[pos].id.clone()));
        }
    }
    Ok((first_parent, last_parent))
}

/// Sum of the parent costs of `segment`; its parents swap one after another.
pub fn segment_cost(segment: &Segment, path: &PathSpec) -> Result<f64, ModelError> {
    let (first, last) = locate_segment(segment, path)
        .map_err(|kind| ModelError::structural(kind.to_string()))?;
    Ok(path.nodes()[first..=last]
        .iter()
        .fold(0.0, |acc, n| acc + n.cost))
}

/// Maximum segment cost of `layer`; its segments swap in parallel.
pub fn layer_cost(layer: &LayerSolution, path: &PathSpec) -> Result<f64, ModelError> {
    if let Some(v) = validate_layer(layer, path, None).into_iter().next() {
        return Err(ModelError::Structural {
            layer: None,
            segment: v.segment,
            message: v.kind.to_string(),
        });
    }
    layer
        .segments
        .iter()
        .try_fold(0.0f64, |acc, s| Ok(acc.max(segment_cost(s, path)?)))
}

/// Per-layer costs over each layer's own remaining path, and their sum.
pub fn plan_cost(plan: &SwapPlan) -> Result<PlanCostBreakdown, ModelError> {
    plan.check()?;
    let per_layer = plan
        .layers
        .iter()
        .enumerate()
        .map(|(k, layer)| layer_cost(layer, &plan.remaining_paths[k]).map_err(|e| e.in_layer(k + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    let total = per_layer.iter().fold(0.0, |acc, c| acc + c);
    Ok(PlanCostBreakdown { per_layer, total })
}

/// The path left after removing every parent of `layer`, order preserved.
pub fn apply_layer(path: &PathSpec, layer: &LayerSolution) -> Result<PathSpec, ModelError> {
    if let Some(v) = validate_layer(layer, path, None).into_iter().next() {
        return Err(ModelError::Structural {
            layer: None,
            segment: v.segment,
            message: v.kind.to_string(),
        });
    }
    let removed: Vec<&str> = layer.parents().collect();
    Ok(path.retain(|n| !removed.contains(&n.id.as_str())))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    EmptyLayer,
    EmptyParents,
    UnknownNode(String),
    NotContiguous,
    ParentNotRepeater(String),
    OverlappingParents { other: usize },
    AdjacentParents { other: usize },
    RemainingPathMismatch,
    MissingRemainingPaths { expected: usize, found: usize },
    OriginalPathMismatch,
    IncompletePlan { remaining: usize },
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::EmptyLayer => write!(f, "layer has no segments"),
            ViolationKind::EmptyParents => write!(f, "segment has no parent nodes"),
            ViolationKind::UnknownNode(id) => write!(f, "node {id} is not on the current path"),
            ViolationKind::NotContiguous => {
                write!(f, "head, parents and tail are not consecutive on the current path")
            }
            ViolationKind::ParentNotRepeater(id) => write!(f, "parent {id} is not a repeater"),
            ViolationKind::OverlappingParents { other } => {
                write!(f, "parents overlap with segment {other}")
            }
            ViolationKind::AdjacentParents { other } => {
                write!(f, "parents are adjacent to the parents of segment {other}")
            }
            ViolationKind::RemainingPathMismatch => {
                write!(f, "stored remaining path differs from the recomputed one")
            }
            ViolationKind::MissingRemainingPaths { expected, found } => {
                write!(f, "expected {expected} remaining paths, found {found}")
            }
            ViolationKind::OriginalPathMismatch => {
                write!(f, "first remaining path is not the original path")
            }
            ViolationKind::IncompletePlan { remaining } => write!(
                f,
                "incomplete plan: final remaining path has {remaining} nodes, expected 2"
            ),
        }
    }
}

/// One broken invariant, located by 1-based layer and 0-based segment index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub layer: Option<usize>,
    pub segment: Option<usize>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.layer, self.segment) {
            (Some(l), Some(s)) => write!(f, "layer {l}, segment {s}: {}", self.kind),
            (Some(l), None) => write!(f, "layer {l}: {}", self.kind),
            (None, Some(s)) => write!(f, "segment {s}: {}", self.kind),
            (None, None) => write!(f, "{}", self.kind),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check one layer against the path it runs over.
pub fn validate_layer(layer: &LayerSolution, path: &PathSpec, layer_index: Option<usize>) -> Vec<Violation> {
    let at = |segment: Option<usize>, kind| Violation {
        layer: layer_index,
        segment,
        kind,
    };
    if layer.segments.is_empty() {
        return vec![at(None, ViolationKind::EmptyLayer)];
    }
    let mut violations = Vec::new();
    let mut spans: Vec<(usize, usize, usize)> = Vec::new();
    for (si, segment) in layer.segments.iter().enumerate() {
        match locate_segment(segment, path) {
            Ok((first, last)) => spans.push((si, first, last)),
            Err(kind) => violations.push(at(Some(si), kind)),
        }
    }
    for (i, &(si, a_first, a_last)) in spans.iter().enumerate() {
        for &(sj, b_first, b_last) in &spans[..i] {
            if a_first <= b_last && b_first <= a_last {
                violations.push(at(Some(si), ViolationKind::OverlappingParents { other: sj }));
            } else if a_last + 1 == b_first || b_last + 1 == a_first {
                violations.push(at(Some(si), ViolationKind::AdjacentParents { other: sj }));
            }
        }
    }
    violations
}

/// Check every structural invariant of a plan. Validation of layers stops at
/// the first invalid layer, since later layers have no well-defined path.
pub fn validate_plan(plan: &SwapPlan) -> ValidationReport {
    let mut violations = Vec::new();
    let expected = plan.layers.len() + 1;
    if plan.remaining_paths.len() != expected {
        violations.push(Violation {
            layer: None,
            segment: None,
            kind: ViolationKind::MissingRemainingPaths {
                expected,
                found: plan.remaining_paths.len(),
            },
        });
    }
    if plan.remaining_paths.first() != Some(&plan.original_path) && !plan.remaining_paths.is_empty() {
        violations.push(Violation {
            layer: None,
            segment: None,
            kind: ViolationKind::OriginalPathMismatch,
        });
    }
    let mut current = plan.original_path.clone();
    for (k, layer) in plan.layers.iter().enumerate() {
        let layer_violations = validate_layer(layer, &current, Some(k + 1));
        if !layer_violations.is_empty() {
            violations.extend(layer_violations);
            return ValidationReport { violations };
        }
        let removed: Vec<&str> = layer.parents().collect();
        current = current.retain(|n| !removed.contains(&n.id.as_str()));
        if plan.remaining_paths.get(k + 1).is_some_and(|stored| *stored != current) {
            violations.push(Violation {
                layer: Some(k + 1),
                segment: None,
                kind: ViolationKind::RemainingPathMismatch,
            });
        }
    }
    if current.len() != 2 {
        violations.push(Violation {
            layer: None,
            segment: None,
            kind: ViolationKind::IncompletePlan {
                remaining: current.len(),
            },
        });
    }
    ValidationReport { violations }
}
