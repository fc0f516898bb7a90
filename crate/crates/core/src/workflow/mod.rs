//! Stage state machine, precautionary gate and cross-component integration.

mod integrate;
mod precaution;
mod stage;

use chrono::{DateTime, Utc};

use crate::assessment::{Assessment, AssessmentError};
use crate::scoring::RiskRatings;

pub use integrate::{
    integrate, integrate_levels, shared_catalog, ComponentLevel, IntegratedAssessment, IntegratedRight, IntegrationError,
    DEFAULT_ESCALATION_THRESHOLD,
};
pub use precaution::PrecautionaryFlag;
pub use stage::{builtin_checklists, ChecklistItem, Stage, StageChecklist, StageTransition, UnknownStage};

fn non_empty(s: Option<&str>) -> Option<&str> {
    s.map(str::trim).filter(|s| !s.is_empty())
}

impl Assessment {
    /// Moves the assessment to `to`.
    ///
    /// Forward steps need the current stage's checklist to be complete, or an
    /// override rationale. Leaving scoping needs a product description, and
    /// entering further implementation (finalization) needs every
    /// precautionary flag resolved or accepted; overrides bypass neither.
    pub fn advance(
        &mut self,
        to: Stage,
        override_rationale: Option<&str>,
        at: DateTime<Utc>,
    ) -> Result<(), AssessmentError> {
        let from = self.stage();
        if !from.can_transition(to) {
            return Err(AssessmentError::IllegalTransition { from, to });
        }
        let rationale = non_empty(override_rationale);
        let mut overridden = false;
        if from.is_forward(to) {
            let checklist = self.checklist(from);
            if !checklist.is_complete() {
                if rationale.is_none() {
                    return Err(AssessmentError::ChecklistIncomplete {
                        stage: from,
                        pending: checklist.pending(),
                    });
                }
                overridden = true;
            }
        }
        if from == Stage::Scoping && to > from && self.scoping().product_description.trim().is_empty() {
            return Err(AssessmentError::ScopingIncomplete("product_description is empty".into()));
        }
        if to == Stage::FurtherImplementation {
            let open = self.open_precautionary();
            if !open.is_empty() {
                return Err(AssessmentError::PrecautionaryUnresolved { risk_ids: open });
            }
        }
        let (stage, log) = self.stage_mut();
        *stage = to;
        log.push(StageTransition {
            from,
            to,
            at,
            rationale: rationale.map(str::to_string),
            checklist_overridden: overridden,
        });
        self.touch();
        Ok(())
    }

    /// Marks checklist item `item` (zero-based) of `stage` as done or not done.
    pub fn set_task(&mut self, stage: Stage, item: usize, done: bool) -> Result<(), AssessmentError> {
        self.ensure_editable()?;
        let checklist = self.checklist_mut(stage);
        let entry = checklist
            .items
            .get_mut(item)
            .ok_or(AssessmentError::UnknownChecklistItem { stage, item })?;
        entry.done = done;
        self.touch();
        Ok(())
    }

    pub fn complete_stage_tasks(&mut self, stage: Stage) -> Result<(), AssessmentError> {
        self.ensure_editable()?;
        for item in &mut self.checklist_mut(stage).items {
            item.done = true;
        }
        self.touch();
        Ok(())
    }

    /// Ids of risks whose precautionary flag is neither resolved nor accepted.
    pub fn open_precautionary(&self) -> Vec<String> {
        self.risks()
            .iter()
            .filter(|r| r.precautionary().is_some_and(PrecautionaryFlag::is_open))
            .map(|r| r.id().to_string())
            .collect()
    }

    /// Takes a risk out of the score tables because its impact cannot be
    /// quantified in advance.
    pub fn flag_precautionary(
        &mut self,
        risk_id: &str,
        rationale: &str,
        recommended_measures: Vec<String>,
    ) -> Result<(), AssessmentError> {
        self.ensure_editable()?;
        let i = self.risk_index(risk_id)?;
        let rationale = non_empty(Some(rationale)).ok_or(AssessmentError::EmptyField("uncertainty_rationale"))?;
        let risk = self.risk_mut(i);
        risk.precautionary = Some(PrecautionaryFlag::new(rationale).with_measures(recommended_measures));
        risk.resolution = None;
        self.touch();
        Ok(())
    }

    /// Keeps the flag (and the risk out of the tables) but records that the
    /// remaining uncertainty is accepted, which unblocks finalization.
    pub fn accept_precautionary(&mut self, risk_id: &str, rationale: &str) -> Result<(), AssessmentError> {
        self.ensure_editable()?;
        let i = self.risk_index(risk_id)?;
        let rationale = non_empty(Some(rationale)).ok_or(AssessmentError::EmptyField("rationale"))?;
        let flag = self
            .risk_mut(i)
            .precautionary
            .as_mut()
            .ok_or_else(|| AssessmentError::NotFlagged(risk_id.to_string()))?;
        flag.accepted = Some(rationale.to_string());
        self.touch();
        Ok(())
    }

    /// Clears the flag so the risk re-enters the score tables. Ratings are
    /// required when the risk was never rated, and refused once rounds exist.
    pub fn resolve_precautionary(
        &mut self,
        risk_id: &str,
        rationale: &str,
        ratings: Option<RiskRatings>,
    ) -> Result<(), AssessmentError> {
        self.ensure_editable()?;
        let i = self.risk_index(risk_id)?;
        let rationale = non_empty(Some(rationale)).ok_or(AssessmentError::EmptyField("rationale"))?;
        let risk = &self.risks()[i];
        if !risk.is_precautionary() {
            return Err(AssessmentError::NotFlagged(risk_id.to_string()));
        }
        if ratings.is_some() && !risk.rounds().is_empty() {
            return Err(AssessmentError::RoundsExist(risk_id.to_string()));
        }
        if ratings.is_none() && risk.initial().is_none() {
            return Err(AssessmentError::MissingRatings(risk_id.to_string()));
        }
        let risk = self.risk_mut(i);
        if let Some(r) = ratings {
            risk.initial = Some(r);
        }
        risk.precautionary = None;
        risk.resolution = Some(rationale.to_string());
        self.touch();
        Ok(())
    }
}
