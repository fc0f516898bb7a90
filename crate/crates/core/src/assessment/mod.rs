//! The assessment document: metadata, scoping record, risk register and
//! re-assessment rounds.
//!
//! Every mutating operation validates its input before touching the value,
//! so a failed call leaves the assessment unchanged. Each successful mutation
//! increments [`Assessment::revision`].

mod report;
mod round;
pub mod scoping;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{Catalog, CatalogError, RightEntry};
use crate::scoring::{Evaluation, Level, RiskRatings};
use crate::workflow::{builtin_checklists, PrecautionaryFlag, Stage, StageChecklist, StageTransition};

pub use report::{ReportRow, ResidualView, RiskReport};
pub use round::{EscalationWarning, ExcludingFactor, MitigationMeasure, Residual, Round};
pub use scoping::{Answer, QuestionBlock, ScopingRecord, Stakeholder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssessmentError {
    #[error("invalid metadata: {0}")]
    InvalidMetadata(String),
    #[error("unknown right {0:?}")]
    UnknownRight(String),
    #[error("risk id {0:?} already exists")]
    DuplicateRiskId(String),
    #[error("risk id {0:?} is not a valid token (ascii letters, digits, '-', '_', '.')")]
    InvalidRiskId(String),
    #[error("unknown risk {0:?}")]
    UnknownRisk(String),
    #[error("round index {got} for risk {risk_id:?} is out of sequence (expected {expected})")]
    NonMonotoneIndex { risk_id: String, expected: u32, got: u32 },
    #[error("invalid round for risk {risk_id:?}: {reason}")]
    InvalidRound { risk_id: String, reason: String },
    #[error("risk {0:?} has been excluded on legal grounds; no further rounds apply")]
    RiskExcluded(String),
    #[error("risk {0:?} is flagged precautionary; resolve the flag first")]
    RiskFlagged(String),
    #[error("risk {0:?} is not flagged precautionary")]
    NotFlagged(String),
    #[error("risk {0:?} has no ratings")]
    MissingRatings(String),
    #[error("risk {0:?} already has re-assessment rounds; initial ratings are fixed")]
    RoundsExist(String),
    #[error("assessment is finalized (stage further_implementation); move back to analysis_assessment to edit")]
    Finalized,
    #[error("risk register is empty")]
    EmptyRegister,
    #[error("illegal transition from {from} to {to}")]
    IllegalTransition { from: Stage, to: Stage },
    #[error("checklist for stage {stage} is incomplete ({} pending); supply an override rationale to proceed", pending.len())]
    ChecklistIncomplete { stage: Stage, pending: Vec<String> },
    #[error("unresolved precautionary flags block finalization: {}", risk_ids.join(", "))]
    PrecautionaryUnresolved { risk_ids: Vec<String> },
    #[error("scoping incomplete: {0}")]
    ScopingIncomplete(String),
    #[error("scoping answer {path} is not a known question; mark it as an extension")]
    InvalidScoping { path: String },
    #[error("stage {stage} has no checklist item {item}")]
    UnknownChecklistItem { stage: Stage, item: usize },
    #[error("{0} must not be empty")]
    EmptyField(&'static str),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

/// A stored value that breaks a model invariant, with the field path at fault.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("invariant violation at {path}: {message}")]
pub struct InvariantViolation {
    pub path: String,
    pub message: String,
}

impl InvariantViolation {
    fn new(path: impl Into<String>, message: impl fmt::Display) -> Self {
        Self {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssessmentMetadata {
    pub title: String,
    /// Stable identifier; derived from the title when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

impl AssessmentMetadata {
    pub fn titled(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Self::default()
        }
    }
}

/// Ascii token: letters, digits, `-`, `_` and `.`.
pub fn is_token(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.'))
}

pub fn slugify(title: &str) -> String {
    let mut slug = String::new();
    for c in title.chars() {
        if c.is_ascii_alphanumeric() {
            slug.push(c.to_ascii_lowercase());
        } else if !slug.is_empty() && !slug.ends_with('-') {
            slug.push('-');
        }
    }
    while slug.ends_with('-') {
        slug.pop();
    }
    if slug.is_empty() {
        slug.push_str("assessment");
    }
    slug
}

/// Input for [`Assessment::add_risk`]. A risk without initial ratings must
/// carry a precautionary flag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewRisk {
    pub id: String,
    pub right_key: String,
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<RiskRatings>,
    #[serde(default)]
    pub guiding_answers: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precautionary: Option<PrecautionaryFlag>,
}

impl NewRisk {
    pub fn rated(
        id: impl Into<String>,
        right_key: impl Into<String>,
        description: impl Into<String>,
        initial: RiskRatings,
    ) -> Self {
        Self {
            id: id.into(),
            right_key: right_key.into(),
            description: description.into(),
            initial: Some(initial),
            guiding_answers: BTreeMap::new(),
            precautionary: None,
        }
    }

    pub fn with_guiding_answer(mut self, question: impl Into<String>, answer: impl Into<String>) -> Self {
        self.guiding_answers.insert(question.into(), answer.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiskEntry {
    pub(crate) id: String,
    pub(crate) right_key: String,
    pub(crate) description: String,
    pub(crate) guiding_answers: BTreeMap<String, String>,
    pub(crate) initial: Option<RiskRatings>,
    pub(crate) precautionary: Option<PrecautionaryFlag>,
    pub(crate) resolution: Option<String>,
    pub(crate) rounds: Vec<Round>,
}

impl RiskEntry {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn right_key(&self) -> &str {
        &self.right_key
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn guiding_answers(&self) -> &BTreeMap<String, String> {
        &self.guiding_answers
    }

    pub fn initial(&self) -> Option<&RiskRatings> {
        self.initial.as_ref()
    }

    pub fn precautionary(&self) -> Option<&PrecautionaryFlag> {
        self.precautionary.as_ref()
    }

    pub fn is_precautionary(&self) -> bool {
        self.precautionary.is_some()
    }

    /// Rationale recorded when a precautionary flag was resolved.
    pub fn resolution(&self) -> Option<&str> {
        self.resolution.as_deref()
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    pub fn latest_round(&self) -> Option<&Round> {
        self.rounds.last()
    }

    pub fn is_excluded(&self) -> bool {
        self.latest_round().is_some_and(|r| r.residual.is_excluded())
    }

    /// Ratings the next round starts from: the latest rated residual, or the
    /// initial ratings when there are no rounds. `None` once excluded.
    pub fn baseline(&self) -> Option<&RiskRatings> {
        match self.latest_round() {
            Some(r) => r.residual.ratings(),
            None => self.initial.as_ref(),
        }
    }

    /// Whether the risk appears in score tables: rated and not flagged.
    pub fn is_scored(&self) -> bool {
        self.initial.is_some() && self.precautionary.is_none()
    }

    pub fn initial_evaluation(&self) -> Option<Evaluation> {
        self.initial.as_ref().map(RiskRatings::evaluate)
    }

    /// Current overall level: final level of the latest round, or the
    /// initial overall level. `None` for unscored or excluded risks.
    pub fn current_level(&self) -> Option<Level> {
        if !self.is_scored() {
            return None;
        }
        self.baseline().map(|r| r.evaluate().overall)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AssessmentRepr", into = "AssessmentRepr")]
pub struct Assessment {
    id: String,
    title: String,
    description: Option<String>,
    notes: Vec<String>,
    revision: u64,
    stage: Stage,
    checklists: Vec<StageChecklist>,
    transitions: Vec<StageTransition>,
    scoping: ScopingRecord,
    custom_rights: Vec<RightEntry>,
    risks: Vec<RiskEntry>,
}

impl Assessment {
    pub fn new(metadata: AssessmentMetadata) -> Result<Self, AssessmentError> {
        let title = metadata.title.trim();
        if title.is_empty() {
            return Err(AssessmentError::InvalidMetadata("title must not be empty".into()));
        }
        let id = match metadata.id {
            Some(id) if is_token(&id) => id,
            Some(id) => return Err(AssessmentError::InvalidMetadata(format!("id {id:?} is not a valid token"))),
            None => slugify(title),
        };
        Ok(Self {
            id,
            title: title.to_string(),
            description: metadata.description.filter(|d| !d.trim().is_empty()),
            notes: Vec::new(),
            revision: 0,
            stage: Stage::PreliminaryAnalysis,
            checklists: builtin_checklists(),
            transitions: Vec::new(),
            scoping: ScopingRecord::default(),
            custom_rights: Vec::new(),
            risks: Vec::new(),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn description(&self) -> Option<&str> {
        self.description.as_deref()
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn checklists(&self) -> &[StageChecklist] {
        &self.checklists
    }

    pub fn checklist(&self, stage: Stage) -> &StageChecklist {
        self.checklists
            .iter()
            .find(|c| c.stage == stage)
            .expect("one checklist per stage")
    }

    pub fn transitions(&self) -> &[StageTransition] {
        &self.transitions
    }

    pub fn scoping(&self) -> &ScopingRecord {
        &self.scoping
    }

    pub fn custom_rights(&self) -> &[RightEntry] {
        &self.custom_rights
    }

    pub fn risks(&self) -> &[RiskEntry] {
        &self.risks
    }

    pub fn risk(&self, id: &str) -> Option<&RiskEntry> {
        self.risks.iter().find(|r| r.id == id)
    }

    /// Builtin rights plus the project-specific ones registered on this assessment.
    pub fn catalog(&self) -> Catalog {
        Catalog::with_custom(&self.custom_rights).expect("custom rights validated on insert")
    }

    pub fn is_finalized(&self) -> bool {
        self.stage == Stage::FurtherImplementation
    }

    pub(crate) fn ensure_editable(&self) -> Result<(), AssessmentError> {
        if self.is_finalized() {
            Err(AssessmentError::Finalized)
        } else {
            Ok(())
        }
    }

    pub(crate) fn touch(&mut self) {
        self.revision += 1;
    }

    pub(crate) fn risk_index(&self, id: &str) -> Result<usize, AssessmentError> {
        self.risks
            .iter()
            .position(|r| r.id == id)
            .ok_or_else(|| AssessmentError::UnknownRisk(id.to_string()))
    }

    pub(crate) fn stage_mut(&mut self) -> (&mut Stage, &mut Vec<StageTransition>) {
        (&mut self.stage, &mut self.transitions)
    }

    pub(crate) fn checklist_mut(&mut self, stage: Stage) -> &mut StageChecklist {
        self.checklists
            .iter_mut()
            .find(|c| c.stage == stage)
            .expect("one checklist per stage")
    }

    pub(crate) fn risk_mut(&mut self, index: usize) -> &mut RiskEntry {
        &mut self.risks[index]
    }

    pub fn add_note(&mut self, note: impl Into<String>) -> Result<(), AssessmentError> {
        let note = note.into();
        if note.trim().is_empty() {
            return Err(AssessmentError::EmptyField("note"));
        }
        self.notes.push(note);
        self.touch();
        Ok(())
    }

    /// Registers a project-specific right on this assessment's catalog.
    pub fn register_right(&mut self, entry: RightEntry) -> Result<(), AssessmentError> {
        self.ensure_editable()?;
        let catalog = self.catalog().register(entry)?;
        let registered = catalog.entries().last().expect("just registered").clone();
        self.custom_rights.push(registered);
        self.touch();
        Ok(())
    }

    pub fn set_scoping(&mut self, scoping: ScopingRecord) -> Result<(), AssessmentError> {
        self.ensure_editable()?;
        scoping
            .check_question_keys()
            .map_err(|e| AssessmentError::InvalidScoping { path: e.path })?;
        if self.stage > Stage::Scoping && scoping.product_description.trim().is_empty() {
            return Err(AssessmentError::ScopingIncomplete(
                "product_description cannot be cleared after scoping".into(),
            ));
        }
        self.scoping = scoping;
        self.touch();
        Ok(())
    }

    pub fn add_risk(&mut self, new: NewRisk) -> Result<(), AssessmentError> {
        self.ensure_editable()?;
        if !is_token(&new.id) {
            return Err(AssessmentError::InvalidRiskId(new.id));
        }
        if self.risk(&new.id).is_some() {
            return Err(AssessmentError::DuplicateRiskId(new.id));
        }
        if !self.catalog().contains(&new.right_key) {
            return Err(AssessmentError::UnknownRight(new.right_key));
        }
        if new.description.trim().is_empty() {
            return Err(AssessmentError::EmptyField("description"));
        }
        match &new.precautionary {
            None if new.initial.is_none() => return Err(AssessmentError::MissingRatings(new.id)),
            Some(flag) if flag.uncertainty_rationale.trim().is_empty() => {
                return Err(AssessmentError::EmptyField("uncertainty_rationale"))
            }
            _ => {}
        }
        self.risks.push(RiskEntry {
            id: new.id,
            right_key: new.right_key,
            description: new.description,
            guiding_answers: new.guiding_answers,
            initial: new.initial,
            precautionary: new.precautionary,
            resolution: None,
            rounds: Vec::new(),
        });
        self.touch();
        Ok(())
    }

    /// Like [`Assessment::add_risk`], but a right missing from this
    /// assessment is first adopted from `catalog` as a project-specific right.
    /// Counts as a single mutation.
    pub fn add_risk_from(&mut self, new: NewRisk, catalog: &Catalog) -> Result<(), AssessmentError> {
        if self.catalog().contains(&new.right_key) {
            return self.add_risk(new);
        }
        let entry = catalog
            .get(&new.right_key)
            .ok_or_else(|| AssessmentError::UnknownRight(new.right_key.clone()))?
            .clone();
        let mut next = self.clone();
        next.register_right(entry)?;
        next.add_risk(new)?;
        next.revision = self.revision + 1;
        *self = next;
        Ok(())
    }

    /// Replaces the initial ratings of a risk that has no rounds yet.
    pub fn rate_risk(&mut self, risk_id: &str, ratings: RiskRatings) -> Result<(), AssessmentError> {
        self.ensure_editable()?;
        let i = self.risk_index(risk_id)?;
        let risk = &self.risks[i];
        if risk.is_precautionary() {
            return Err(AssessmentError::RiskFlagged(risk_id.to_string()));
        }
        if !risk.rounds.is_empty() {
            return Err(AssessmentError::RoundsExist(risk_id.to_string()));
        }
        self.risks[i].initial = Some(ratings);
        self.touch();
        Ok(())
    }

    /// Appends a re-assessment round. Returns a warning when any residual
    /// rating is worse than the ratings the round started from.
    pub fn apply_round(&mut self, risk_id: &str, round: Round) -> Result<Option<EscalationWarning>, AssessmentError> {
        self.ensure_editable()?;
        let i = self.risk_index(risk_id)?;
        let risk = &self.risks[i];
        if risk.is_precautionary() {
            return Err(AssessmentError::RiskFlagged(risk_id.to_string()));
        }
        let expected = risk.rounds.len() as u32 + 1;
        if round.index != expected {
            return Err(AssessmentError::NonMonotoneIndex {
                risk_id: risk_id.to_string(),
                expected,
                got: round.index,
            });
        }
        if risk.is_excluded() {
            return Err(AssessmentError::RiskExcluded(risk_id.to_string()));
        }
        let baseline = risk
            .baseline()
            .ok_or_else(|| AssessmentError::MissingRatings(risk_id.to_string()))?;
        let escalated = round
            .check_against(baseline)
            .map_err(|reason| AssessmentError::InvalidRound {
                risk_id: risk_id.to_string(),
                reason,
            })?;
        let warning = (!escalated.is_empty()).then(|| EscalationWarning {
            risk_id: risk_id.to_string(),
            round_index: round.index,
            dimensions: escalated,
        });
        self.risks[i].rounds.push(round);
        self.touch();
        Ok(warning)
    }

    /// Escalation warnings for every stored round, recomputed from ratings.
    pub fn escalation_warnings(&self) -> Vec<EscalationWarning> {
        let mut warnings = Vec::new();
        for risk in &self.risks {
            let mut baseline = risk.initial;
            for round in &risk.rounds {
                if let (Some(base), Residual::Rated(residual)) = (baseline, &round.residual) {
                    let dims: Vec<_> = residual
                        .compare(&base)
                        .into_iter()
                        .filter(|(_, o)| o.is_gt())
                        .map(|(d, _)| d)
                        .collect();
                    if !dims.is_empty() {
                        warnings.push(EscalationWarning {
                            risk_id: risk.id.clone(),
                            round_index: round.index,
                            dimensions: dims,
                        });
                    }
                }
                baseline = round.residual.ratings().copied();
            }
        }
        warnings
    }

    /// Comparative before/after table over all scored risks.
    pub fn comparative_table(&self) -> Result<RiskReport, AssessmentError> {
        RiskReport::build(self)
    }

    /// Full invariant check, as applied when loading a stored assessment.
    pub fn validate(&self) -> Result<(), InvariantViolation> {
        Assessment::try_from(AssessmentRepr::from(self.clone())).map(|_| ())
    }
}

// File representation: rounds are kept in a flat list keyed by risk id so
// that every reference can be checked on load.

#[derive(Serialize, Deserialize)]
pub(crate) struct AssessmentRepr {
    id: String,
    title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
    #[serde(default)]
    notes: Vec<String>,
    #[serde(default)]
    revision: u64,
    stage: Stage,
    checklists: Vec<StageChecklist>,
    #[serde(default)]
    transitions: Vec<StageTransition>,
    #[serde(default)]
    scoping: ScopingRecord,
    #[serde(default)]
    custom_rights: Vec<RightEntry>,
    #[serde(default)]
    risks: Vec<RiskRepr>,
    #[serde(default)]
    rounds: Vec<RoundRecord>,
}

#[derive(Serialize, Deserialize)]
struct RiskRepr {
    id: String,
    right_key: String,
    description: String,
    #[serde(default)]
    guiding_answers: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial: Option<RiskRatings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    precautionary: Option<PrecautionaryFlag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    resolution: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct RoundRecord {
    risk_id: String,
    #[serde(flatten)]
    round: Round,
}

impl From<Assessment> for AssessmentRepr {
    fn from(a: Assessment) -> Self {
        let mut rounds = Vec::new();
        let risks = a
            .risks
            .into_iter()
            .map(|r| {
                rounds.extend(r.rounds.into_iter().map(|round| RoundRecord {
                    risk_id: r.id.clone(),
                    round,
                }));
                RiskRepr {
                    id: r.id,
                    right_key: r.right_key,
                    description: r.description,
                    guiding_answers: r.guiding_answers,
                    initial: r.initial,
                    precautionary: r.precautionary,
                    resolution: r.resolution,
                }
            })
            .collect();
        AssessmentRepr {
            id: a.id,
            title: a.title,
            description: a.description,
            notes: a.notes,
            revision: a.revision,
            stage: a.stage,
            checklists: a.checklists,
            transitions: a.transitions,
            scoping: a.scoping,
            custom_rights: a.custom_rights,
            risks,
            rounds,
        }
    }
}

impl TryFrom<AssessmentRepr> for Assessment {
    type Error = InvariantViolation;

    fn try_from(repr: AssessmentRepr) -> Result<Self, Self::Error> {
        if !is_token(&repr.id) {
            return Err(InvariantViolation::new("id", format!("{:?} is not a valid token", repr.id)));
        }
        if repr.title.trim().is_empty() {
            return Err(InvariantViolation::new("title", "title must not be empty"));
        }

        let mut catalog = Catalog::builtin();
        for (i, entry) in repr.custom_rights.iter().enumerate() {
            if entry.builtin {
                return Err(InvariantViolation::new(
                    format!("custom_rights[{i}].builtin"),
                    "project-specific rights cannot be marked builtin",
                ));
            }
            catalog = catalog
                .register(entry.clone())
                .map_err(|e| InvariantViolation::new(format!("custom_rights[{i}]"), e))?;
        }

        check_checklists(&repr.checklists)?;
        check_transitions(&repr.transitions, repr.stage)?;

        repr.scoping
            .check_question_keys()
            .map_err(|e| InvariantViolation::new(e.path, "unknown question key not flagged as extension"))?;
        if repr.stage > Stage::Scoping && repr.scoping.product_description.trim().is_empty() {
            return Err(InvariantViolation::new(
                "scoping.product_description",
                format!("must be non-empty once the assessment has left scoping (stage {})", repr.stage),
            ));
        }

        let mut seen = BTreeSet::new();
        let mut risks = Vec::with_capacity(repr.risks.len());
        for (i, r) in repr.risks.into_iter().enumerate() {
            if !is_token(&r.id) {
                return Err(InvariantViolation::new(format!("risks[{i}].id"), format!("{:?} is not a valid token", r.id)));
            }
            if !seen.insert(r.id.clone()) {
                return Err(InvariantViolation::new(format!("risks[{i}].id"), format!("duplicate risk id {:?}", r.id)));
            }
            if !catalog.contains(&r.right_key) {
                return Err(InvariantViolation::new(
                    format!("risks[{i}].right_key"),
                    format!("risk {:?} references unknown right {:?}", r.id, r.right_key),
                ));
            }
            match &r.precautionary {
                None if r.initial.is_none() => {
                    return Err(InvariantViolation::new(
                        format!("risks[{i}].initial"),
                        format!("risk {:?} has no ratings and no precautionary flag", r.id),
                    ))
                }
                Some(flag) if flag.uncertainty_rationale.trim().is_empty() => {
                    return Err(InvariantViolation::new(
                        format!("risks[{i}].precautionary.uncertainty_rationale"),
                        "must not be empty",
                    ))
                }
                Some(flag) if repr.stage == Stage::FurtherImplementation && flag.is_open() => {
                    return Err(InvariantViolation::new(
                        format!("risks[{i}].precautionary"),
                        format!("open precautionary flag on risk {:?} in a finalized assessment", r.id),
                    ))
                }
                _ => {}
            }
            risks.push(RiskEntry {
                id: r.id,
                right_key: r.right_key,
                description: r.description,
                guiding_answers: r.guiding_answers,
                initial: r.initial,
                precautionary: r.precautionary,
                resolution: r.resolution,
                rounds: Vec::new(),
            });
        }

        for (j, record) in repr.rounds.into_iter().enumerate() {
            let path = format!("rounds[{j}]");
            let Some(risk) = risks.iter_mut().find(|r| r.id == record.risk_id) else {
                return Err(InvariantViolation::new(
                    format!("{path}.risk_id"),
                    format!("round references missing risk {:?}", record.risk_id),
                ));
            };
            let expected = risk.rounds.len() as u32 + 1;
            if record.round.index != expected {
                return Err(InvariantViolation::new(
                    format!("{path}.index"),
                    format!("risk {:?}: expected round {expected}, found {}", risk.id, record.round.index),
                ));
            }
            if risk.is_excluded() {
                return Err(InvariantViolation::new(
                    path,
                    format!("risk {:?} has a round after a legal exclusion", risk.id),
                ));
            }
            let Some(baseline) = risk.baseline() else {
                return Err(InvariantViolation::new(
                    path,
                    format!("risk {:?} has a round but no ratings to start from", risk.id),
                ));
            };
            record
                .round
                .check_against(baseline)
                .map_err(|reason| InvariantViolation::new(path, format!("risk {:?}: {reason}", risk.id)))?;
            risk.rounds.push(record.round);
        }

        Ok(Assessment {
            id: repr.id,
            title: repr.title,
            description: repr.description,
            notes: repr.notes,
            revision: repr.revision,
            stage: repr.stage,
            checklists: repr.checklists,
            transitions: repr.transitions,
            scoping: repr.scoping,
            custom_rights: repr.custom_rights,
            risks,
        })
    }
}

fn check_checklists(checklists: &[StageChecklist]) -> Result<(), InvariantViolation> {
    if checklists.len() != Stage::ALL.len() {
        return Err(InvariantViolation::new(
            "checklists",
            format!("expected {} stage checklists, found {}", Stage::ALL.len(), checklists.len()),
        ));
    }
    for (i, (checklist, stage)) in checklists.iter().zip(Stage::ALL).enumerate() {
        if checklist.stage != stage {
            return Err(InvariantViolation::new(
                format!("checklists[{i}].stage"),
                format!("expected {stage}, found {}", checklist.stage),
            ));
        }
        for (k, task) in stage.tasks().iter().enumerate() {
            if checklist.items.get(k).map(|item| item.task.as_str()) != Some(*task) {
                return Err(InvariantViolation::new(
                    format!("checklists[{i}].items[{k}].task"),
                    "builtin task text does not match",
                ));
            }
        }
    }
    Ok(())
}

fn check_transitions(transitions: &[StageTransition], stage: Stage) -> Result<(), InvariantViolation> {
    let mut current = Stage::PreliminaryAnalysis;
    for (i, t) in transitions.iter().enumerate() {
        if t.from != current {
            return Err(InvariantViolation::new(
                format!("transitions[{i}].from"),
                format!("expected {current}, found {}", t.from),
            ));
        }
        if !t.from.can_transition(t.to) {
            return Err(InvariantViolation::new(
                format!("transitions[{i}]"),
                format!("illegal transition from {} to {}", t.from, t.to),
            ));
        }
        if t.checklist_overridden && t.rationale.as_deref().is_none_or(|r| r.trim().is_empty()) {
            return Err(InvariantViolation::new(
                format!("transitions[{i}].rationale"),
                "a checklist override requires a rationale",
            ));
        }
        current = t.to;
    }
    if current != stage {
        return Err(InvariantViolation::new(
            "stage",
            format!("stage {stage} does not match the transition log (ends at {current})"),
        ));
    }
    Ok(())
}
