use thiserror::Error;

/// Errors raised by the domain model: cost formulas, paths, segments and plans.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// A parameter lies outside its documented range.
    #[error("{field} = {value} is out of range ({expected})")]
    Domain {
        field: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// The success probability of a swap at this node is zero, so no finite
    /// number of attempts completes it.
    #[error("unreachable node: {reason}")]
    Unreachable { reason: String },

    /// The path does not have the user/repeater shape.
    #[error("invalid path: {0}")]
    InvalidPath(String),

    /// A segment, layer or plan violates the layered swapping structure.
    #[error("structural error{}: {message}", location(*.layer, *.segment))]
    Structural {
        /// 1-based layer index, when known.
        layer: Option<usize>,
        /// 0-based segment index within the layer, when known.
        segment: Option<usize>,
        message: String,
    },
}

fn location(layer: Option<usize>, segment: Option<usize>) -> String {
    match (layer, segment) {
        (Some(l), Some(s)) => format!(" in layer {l}, segment {s}"),
        (Some(l), None) => format!(" in layer {l}"),
        (None, Some(s)) => format!(" in segment {s}"),
        (None, None) => String::new(),
    }
}

impl ModelError {
    pub(crate) fn structural(message: impl Into<String>) -> Self {
        ModelError::Structural {
            layer: None,
            segment: None,
            message: message.into(),
        }
    }

    /// Attach a layer index to a structural error that does not carry one yet.
    pub(crate) fn in_layer(self, layer: usize) -> Self {
        match self {
            ModelError::Structural {
                layer: None,
                segment,
                message,
            } => ModelError::Structural {
                layer: Some(layer),
                segment,
                message,
            },
            other => other,
        }
    }
}
