use serde::{Deserialize, Serialize};

use super::{Assessment, AssessmentError, EscalationWarning, Residual};
use crate::scoring::{aggregate_band, Evaluation, ImpactBand, Level, RiskRatings};

/// Residual columns of a comparative row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ResidualView {
    Excluded,
    Rated {
        ratings: RiskRatings,
        evaluation: Evaluation,
    },
}

impl ResidualView {
    pub fn evaluation(&self) -> Option<&Evaluation> {
        match self {
            ResidualView::Excluded => None,
            ResidualView::Rated { evaluation, .. } => Some(evaluation),
        }
    }

    pub fn final_level(&self) -> Option<Level> {
        match self {
            ResidualView::Excluded => None,
            ResidualView::Rated { evaluation, .. } => Some(evaluation.overall),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub risk_id: String,
    pub right_key: String,
    pub description: String,
    pub initial_ratings: RiskRatings,
    pub initial: Evaluation,
    /// Excluding factors across all rounds.
    pub excluding_factors: Vec<String>,
    /// Mitigation measures across all rounds.
    pub mitigation_measures: Vec<String>,
    pub rounds: u32,
    /// Latest round's residual; absent when no round has been applied.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<ResidualView>,
}

impl ReportRow {
    /// Level after the latest round: the residual overall, the initial overall
    /// when there are no rounds, `None` when excluded.
    pub fn final_level(&self) -> Option<Level> {
        match &self.residual {
            None => Some(self.initial.overall),
            Some(view) => view.final_level(),
        }
    }

    pub fn is_excluded(&self) -> bool {
        matches!(self.residual, Some(ResidualView::Excluded))
    }
}

/// Before/after comparison derived entirely from stored ratings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RiskReport {
    pub rows: Vec<ReportRow>,
    /// Band over every row's initial overall impact.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aggregate_before: Option<ImpactBand>,
    /// Band over the final levels of the rows that are not excluded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aggregate_after: Option<ImpactBand>,
    pub warnings: Vec<EscalationWarning>,
}

impl RiskReport {
    pub(super) fn build(assessment: &Assessment) -> Result<RiskReport, AssessmentError> {
        if assessment.risks().is_empty() {
            return Err(AssessmentError::EmptyRegister);
        }
        let rows: Vec<ReportRow> = assessment
            .risks()
            .iter()
            .filter(|r| r.is_scored())
            .map(|risk| {
                let initial_ratings = *risk.initial().expect("scored risks are rated");
                let residual = risk.latest_round().map(|round| match round.residual {
                    Residual::Excluded => ResidualView::Excluded,
                    Residual::Rated(ratings) => ResidualView::Rated {
                        ratings,
                        evaluation: ratings.evaluate(),
                    },
                });
                ReportRow {
                    risk_id: risk.id().to_string(),
                    right_key: risk.right_key().to_string(),
                    description: risk.description().to_string(),
                    initial_ratings,
                    initial: initial_ratings.evaluate(),
                    excluding_factors: risk
                        .rounds()
                        .iter()
                        .flat_map(|r| r.excluding_factors.iter().map(|f| f.description.clone()))
                        .collect(),
                    mitigation_measures: risk
                        .rounds()
                        .iter()
                        .flat_map(|r| r.mitigation_measures.iter().map(|m| m.description.clone()))
                        .collect(),
                    rounds: risk.rounds().len() as u32,
                    residual,
                }
            })
            .collect();

        let before: Vec<Level> = rows.iter().map(|r| r.initial.overall).collect();
        let after: Vec<Level> = rows.iter().filter_map(ReportRow::final_level).collect();
        Ok(RiskReport {
            aggregate_before: aggregate_band(&before).ok(),
            aggregate_after: aggregate_band(&after).ok(),
            warnings: assessment.escalation_warnings(),
            rows,
        })
    }

    pub fn row(&self, risk_id: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.risk_id == risk_id)
    }

    pub fn has_rounds(&self) -> bool {
        self.rows.iter().any(|r| r.rounds > 0)
    }
}
