use serde::{Deserialize, Serialize};

/// Marks a risk whose impact cannot be meaningfully quantified in advance.
/// A flagged risk stays out of the score tables; an open flag blocks
/// finalization until it is resolved with ratings or explicitly accepted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecautionaryFlag {
    pub uncertainty_rationale: String,
    #[serde(default)]
    pub recommended_measures: Vec<String>,
    /// Rationale recorded when the assessor accepts the open uncertainty.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accepted: Option<String>,
}

impl PrecautionaryFlag {
    pub fn new(rationale: impl Into<String>) -> Self {
        Self {
            uncertainty_rationale: rationale.into(),
            recommended_measures: Vec::new(),
            accepted: None,
        }
    }

    pub fn with_measures(mut self, measures: impl IntoIterator<Item = impl Into<String>>) -> Self {
        self.recommended_measures.extend(measures.into_iter().map(Into::into));
        self
    }

    pub fn is_open(&self) -> bool {
        self.accepted.is_none()
    }
}
