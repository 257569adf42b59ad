use serde::{Deserialize, Serialize};

use super::profile::InterferenceProfile;
use crate::error::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    User,
    Repeater,
}

/// One node of a repeater chain. Users carry cost 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub id: String,
    pub role: Role,
    /// Node swap cost in expected attempts; 0 for users.
    pub cost: f64,
}

impl Node {
    pub fn user(id: impl Into<String>) -> Self {
        Node {
            id: id.into(),
            role: Role::User,
            cost: 0.0,
        }
    }

    pub fn repeater(id: impl Into<String>, cost: f64) -> Self {
        Node {
            id: id.into(),
            role: Role::Repeater,
            cost,
        }
    }

    pub fn is_repeater(&self) -> bool {
        self.role == Role::Repeater
    }
}

/// An ordered chain: user, repeaters..., user.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PathSpec {
    nodes: Vec<Node>,
}

impl PathSpec {
    pub fn new(nodes: Vec<Node>) -> Result<Self, ModelError> {
        if nodes.len() < 2 {
            return Err(ModelError::InvalidPath(format!(
                "a path needs at least two nodes, got {}",
                nodes.len()
            )));
        }
        let last = nodes.len() - 1;
        for (i, node) in nodes.iter().enumerate() {
            let endpoint = i == 0 || i == last;
            match (endpoint, node.role) {
                (true, Role::Repeater) => {
                    return Err(ModelError::InvalidPath(format!(
                        "endpoint {} must be a user",
                        node.id
                    )))
                }
                (false, Role::User) => {
                    return Err(ModelError::InvalidPath(format!(
                        "interior node {} must be a repeater",
                        node.id
                    )))
                }
                (false, Role::Repeater) if !(node.cost.is_finite() && node.cost >= 1.0) => {
                    return Err(ModelError::InvalidPath(format!(
                        "repeater {} has cost {}, expected a finite value >= 1",
                        node.id, node.cost
                    )))
                }
                (true, Role::User) if node.cost != 0.0 => {
                    return Err(ModelError::InvalidPath(format!(
                        "user {} must carry cost 0",
                        node.id
                    )))
                }
                _ => {}
            }
        }
        for (i, node) in nodes.iter().enumerate() {
            if nodes[..i].iter().any(|other| other.id == node.id) {
                return Err(ModelError::InvalidPath(format!(
                    "duplicate node id {}",
                    node.id
                )));
            }
        }
        Ok(PathSpec { nodes })
    }

    /// Path `x0, x1, ..., x{n+1}` whose interior repeaters have the given costs.
    pub fn from_costs(costs: &[f64]) -> Result<Self, ModelError> {
        let n = costs.len();
        let mut nodes = Vec::with_capacity(n + 2);
        nodes.push(Node::user("x0"));
        for (i, &c) in costs.iter().enumerate() {
            nodes.push(Node::repeater(format!("x{}", i + 1), c));
        }
        nodes.push(Node::user(format!("x{}", n + 1)));
        PathSpec::new(nodes)
    }

    /// Path whose repeater costs are derived from interference profiles.
    pub fn from_profiles(profiles: &[InterferenceProfile]) -> Result<Self, ModelError> {
        let costs = profiles
            .iter()
            .map(|p| p.node_cost())
            .collect::<Result<Vec<_>, _>>()?;
        PathSpec::from_costs(&costs)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn hops(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn repeater_count(&self) -> usize {
        self.nodes.len() - 2
    }

    pub fn repeaters(&self) -> impl Iterator<Item = &Node> {
        self.nodes[1..self.nodes.len() - 1].iter()
    }

    pub fn repeater_costs(&self) -> Vec<f64> {
        self.repeaters().map(|n| n.cost).collect()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn ids(&self) -> Vec<&str> {
        self.nodes.iter().map(|n| n.id.as_str()).collect()
    }

    /// Sum of all repeater costs: the cost of swapping strictly one node at a time.
    pub fn sequential_cost(&self) -> f64 {
        self.repeaters().fold(0.0, |acc, n| acc + n.cost)
    }

    /// Keep only the nodes for which `keep` returns true, preserving order.
    pub(crate) fn retain(&self, mut keep: impl FnMut(&Node) -> bool) -> PathSpec {
        PathSpec {
            nodes: self.nodes.iter().filter(|n| keep(n)).cloned().collect(),
        }
    }

    /// Keep only the nodes whose position satisfies `keep`, preserving order.
    pub(crate) fn retain_positions(&self, mut keep: impl FnMut(usize) -> bool) -> PathSpec {
        PathSpec {
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .filter(|(i, _)| keep(*i))
                .map(|(_, n)| n.clone())
                .collect(),
        }
    }
}

impl<'de> Deserialize<'de> for PathSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let nodes = Vec::<Node>::deserialize(deserializer)?;
        PathSpec::new(nodes).map_err(serde::de::Error::custom)
    }
}
