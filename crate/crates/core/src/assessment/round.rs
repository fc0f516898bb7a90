//! Re-assessment rounds: excluding factors, mitigation measures and residual ratings.

use std::cmp::Ordering;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::scoring::{Dimension, RiskRatings};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludingFactor {
    pub description: String,
    pub legal_basis: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MitigationMeasure {
    pub description: String,
    #[serde(default)]
    pub category: String,
}

impl MitigationMeasure {
    pub fn new(description: impl Into<String>, category: impl Into<String>) -> Self {
        Self {
            description: description.into(),
            category: category.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ExcludedMarker {
    Excluded,
}

/// Residual state after a round: either re-rated, or excluded from scoring
/// on legal grounds. Serialized as a ratings object or the string `"excluded"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "ResidualRepr", into = "ResidualRepr")]
pub enum Residual {
    Rated(RiskRatings),
    Excluded,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
enum ResidualRepr {
    Excluded(ExcludedMarker),
    Rated(RiskRatings),
}

impl From<ResidualRepr> for Residual {
    fn from(r: ResidualRepr) -> Self {
        match r {
            ResidualRepr::Excluded(_) => Residual::Excluded,
            ResidualRepr::Rated(ratings) => Residual::Rated(ratings),
        }
    }
}

impl From<Residual> for ResidualRepr {
    fn from(r: Residual) -> Self {
        match r {
            Residual::Excluded => ResidualRepr::Excluded(ExcludedMarker::Excluded),
            Residual::Rated(ratings) => ResidualRepr::Rated(ratings),
        }
    }
}

impl Residual {
    pub fn ratings(&self) -> Option<&RiskRatings> {
        match self {
            Residual::Rated(r) => Some(r),
            Residual::Excluded => None,
        }
    }

    pub fn is_excluded(&self) -> bool {
        matches!(self, Residual::Excluded)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub index: u32,
    #[serde(default)]
    pub excluding_factors: Vec<ExcludingFactor>,
    #[serde(default)]
    pub mitigation_measures: Vec<MitigationMeasure>,
    pub residual: Residual,
    #[serde(default)]
    pub rationale: String,
    pub created_at: DateTime<Utc>,
}

impl Round {
    pub fn new(index: u32, residual: Residual, created_at: DateTime<Utc>) -> Self {
        Self {
            index,
            excluding_factors: Vec::new(),
            mitigation_measures: Vec::new(),
            residual,
            rationale: String::new(),
            created_at,
        }
    }

    pub fn with_measures(mut self, measures: impl IntoIterator<Item = MitigationMeasure>) -> Self {
        self.mitigation_measures.extend(measures);
        self
    }

    pub fn with_excluding_factor(mut self, factor: ExcludingFactor) -> Self {
        self.excluding_factors.push(factor);
        self
    }

    pub fn with_rationale(mut self, rationale: impl Into<String>) -> Self {
        self.rationale = rationale.into();
        self
    }

    /// Checks the round against the ratings it starts from. Returns the
    /// dimensions that got worse, or a description of the broken rule.
    pub(crate) fn check_against(&self, baseline: &RiskRatings) -> Result<Vec<Dimension>, String> {
        for (i, ef) in self.excluding_factors.iter().enumerate() {
            if ef.description.trim().is_empty() {
                return Err(format!("excluding_factors[{i}].description is empty"));
            }
            if ef.legal_basis.trim().is_empty() {
                return Err(format!("excluding_factors[{i}].legal_basis is empty"));
            }
        }
        for (i, mm) in self.mitigation_measures.iter().enumerate() {
            if mm.description.trim().is_empty() {
                return Err(format!("mitigation_measures[{i}].description is empty"));
            }
        }
        let has_rationale = !self.rationale.trim().is_empty();
        match &self.residual {
            Residual::Excluded => {
                if self.excluding_factors.is_empty() {
                    return Err("an excluded residual requires at least one excluding factor".into());
                }
                if !has_rationale {
                    return Err("an excluded residual requires a rationale".into());
                }
                Ok(Vec::new())
            }
            Residual::Rated(residual) => {
                let changes = residual.compare(baseline);
                if !has_rationale && changes.iter().any(|(_, o)| *o == Ordering::Less) {
                    return Err("a rationale is required when a residual level is lowered".into());
                }
                Ok(changes
                    .into_iter()
                    .filter(|(_, o)| *o == Ordering::Greater)
                    .map(|(d, _)| d)
                    .collect())
            }
        }
    }
}

/// Raised when a round's residual rating exceeds its baseline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscalationWarning {
    pub risk_id: String,
    pub round_index: u32,
    pub dimensions: Vec<Dimension>,
}

impl std::fmt::Display for EscalationWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let dims: Vec<_> = self.dimensions.iter().map(|d| d.as_str()).collect();
        write!(
            f,
            "risk {} round {}: residual {} exceeds baseline",
            self.risk_id,
            self.round_index,
            dims.join(", ")
        )
    }
}
