use serde::{Deserialize, Serialize};

use crate::assessment::{Assessment, QuestionBlock, ResidualView, Stakeholder};
use crate::catalog::Catalog;
use crate::scoring::{
    self, CombinedScore, Dimension, Level, LIKELIHOOD_BINS, LIKELIHOOD_MATRIX, LIKELIHOOD_MAX, SEVERITY_BINS,
    SEVERITY_MATRIX, SEVERITY_MAX,
};
use crate::workflow::{IntegratedAssessment, Stage};

use super::ReportError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Assessment,
    Integrated,
}

/// Everything a report shows, recomputed from the model on every render.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub kind: ReportKind,
    pub id: String,
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub revision: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<Stage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scoping: Option<ScopingSummary>,
    #[serde(default)]
    pub envisaged: Vec<EnvisagedRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparative: Option<ComparativeSection>,
    #[serde(default)]
    pub precautionary: Vec<PrecautionaryItem>,
    #[serde(default)]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrated: Option<IntegratedSection>,
    #[serde(default)]
    pub notes: Vec<String>,
    pub methodology: Methodology,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockProgress {
    pub block: QuestionBlock,
    pub answered: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScopingSummary {
    pub product_description: String,
    pub target_countries: Vec<String>,
    pub rights_holders: Vec<String>,
    pub data_categories: Vec<String>,
    pub processing_purposes: Vec<String>,
    pub duty_bearers: Vec<String>,
    pub stakeholders: Vec<Stakeholder>,
    pub blocks: Vec<BlockProgress>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvisagedRow {
    pub risk_id: String,
    pub risk: String,
    pub right_key: String,
    pub likelihood: CombinedScore,
    pub severity: CombinedScore,
    pub overall: Level,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ResidualCells {
    /// No round applied yet.
    None,
    Excluded,
    Rated {
        likelihood: CombinedScore,
        severity: CombinedScore,
        final_impact: Level,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparativeRow {
    pub risk_id: String,
    pub risk: String,
    pub likelihood: Level,
    pub severity: Level,
    pub overall: Level,
    pub excluding_factors: Vec<String>,
    pub mitigation_measures: Vec<String>,
    pub residual: ResidualCells,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparativeSection {
    pub rows: Vec<ComparativeRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aggregate_before: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aggregate_after: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecautionaryItem {
    pub risk_id: String,
    pub risk: String,
    pub right_key: String,
    pub uncertainty_rationale: String,
    pub recommended_measures: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accepted: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegratedRow {
    pub right_key: String,
    pub right: String,
    pub components: Vec<String>,
    pub max_level: Level,
    pub contributing: u32,
    pub escalated: bool,
    pub integrated_level: Level,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegratedSection {
    pub components: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub escalation_threshold: Option<u32>,
    pub rows: Vec<IntegratedRow>,
    #[serde(default)]
    pub precautionary: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinRange {
    pub level: Level,
    pub min: u8,
    pub max: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Descriptor {
    pub dimension: Dimension,
    pub level: Level,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Methodology {
    pub likelihood_matrix: Vec<Vec<u8>>,
    pub severity_matrix: Vec<Vec<u8>>,
    pub likelihood_bins: Vec<BinRange>,
    pub severity_bins: Vec<BinRange>,
    pub overall_matrix: Vec<Vec<Level>>,
    pub descriptors: Vec<Descriptor>,
    pub notes: Vec<String>,
}

const METHODOLOGY_NOTES: [&str; 5] = [
    "Likelihood combines probability (columns) and exposure (rows); severity combines gravity (columns) and effort (rows). Both matrices are cardinal and are not symmetric.",
    "Score thresholds are engine constants chosen as contiguous, monotone bins consistent with every worked example; they are not configurable so that assessments remain comparable.",
    "Overall impact is the rounded-up mean of the likelihood and severity ordinals. A published version of the overall-impact table maps each severity column to a constant level regardless of likelihood, which contradicts the worked example (very high likelihood with medium severity gives high); this engine follows the worked example.",
    "Aggregate bands average the overall ordinals of all rated rights with equal weight and show the two nearest levels, nearest first. They are an imprecise synthesis; the radial chart is the primary outcome view.",
    "Radial charts plot overall-impact ordinals on a 0-4 scale; ring labels 1-4 are added for readability. Excluded and precautionary risks are listed separately and not plotted.",
];

fn bin_ranges(bounds: &[u8; 3], max: u8) -> Vec<BinRange> {
    let mut min = 1;
    Level::ALL
        .into_iter()
        .zip(bounds.iter().copied().chain(std::iter::once(max)))
        .map(|(level, upper)| {
            let range = BinRange { level, min, max: upper };
            min = upper + 1;
            range
        })
        .collect()
}

impl Methodology {
    pub fn current() -> Self {
        Self {
            likelihood_matrix: LIKELIHOOD_MATRIX.iter().map(|r| r.to_vec()).collect(),
            severity_matrix: SEVERITY_MATRIX.iter().map(|r| r.to_vec()).collect(),
            likelihood_bins: bin_ranges(&LIKELIHOOD_BINS, LIKELIHOOD_MAX),
            severity_bins: bin_ranges(&SEVERITY_BINS, SEVERITY_MAX),
            overall_matrix: scoring::overall_impact_matrix().iter().map(|r| r.to_vec()).collect(),
            descriptors: Dimension::RATED
                .into_iter()
                .flat_map(|d| {
                    Level::ALL.into_iter().map(move |l| Descriptor {
                        dimension: d,
                        level: l,
                        text: scoring::descriptor(d, l).to_string(),
                    })
                })
                .collect(),
            notes: METHODOLOGY_NOTES.iter().map(|n| n.to_string()).collect(),
        }
    }
}

impl ReportDocument {
    pub fn for_assessment(assessment: &Assessment) -> Result<Self, ReportError> {
        if assessment.stage() <= Stage::Scoping {
            return Err(ReportError::StageTooEarly(assessment.stage()));
        }
        let s = assessment.scoping();
        let scoping = ScopingSummary {
            product_description: s.product_description.clone(),
            target_countries: s.target_countries.clone(),
            rights_holders: s.rights_holders.clone(),
            data_categories: s.data_categories.clone(),
            processing_purposes: s.processing_purposes.clone(),
            duty_bearers: s.duty_bearers.clone(),
            stakeholders: s.stakeholders.clone(),
            blocks: QuestionBlock::ALL
                .into_iter()
                .map(|block| BlockProgress {
                    block,
                    answered: s.answered(block),
                    total: block.questions().count(),
                })
                .collect(),
        };

        let (envisaged, comparative) = match assessment.comparative_table() {
            Ok(table) => {
                let envisaged = table
                    .rows
                    .iter()
                    .map(|r| EnvisagedRow {
                        risk_id: r.risk_id.clone(),
                        risk: r.description.clone(),
                        right_key: r.right_key.clone(),
                        likelihood: r.initial.likelihood,
                        severity: r.initial.severity,
                        overall: r.initial.overall,
                    })
                    .collect();
                let rows = table
                    .rows
                    .iter()
                    .map(|r| ComparativeRow {
                        risk_id: r.risk_id.clone(),
                        risk: r.description.clone(),
                        likelihood: r.initial.likelihood.level,
                        severity: r.initial.severity.level,
                        overall: r.initial.overall,
                        excluding_factors: r.excluding_factors.clone(),
                        mitigation_measures: r.mitigation_measures.clone(),
                        residual: match &r.residual {
                            None => ResidualCells::None,
                            Some(ResidualView::Excluded) => ResidualCells::Excluded,
                            Some(ResidualView::Rated { evaluation, .. }) => ResidualCells::Rated {
                                likelihood: evaluation.likelihood,
                                severity: evaluation.severity,
                                final_impact: evaluation.overall,
                            },
                        },
                    })
                    .collect();
                let comparative = ComparativeSection {
                    rows,
                    aggregate_before: table.aggregate_before.map(|b| b.code()),
                    aggregate_after: table.aggregate_after.map(|b| b.code()),
                };
                (envisaged, Some(comparative))
            }
            Err(_) => (Vec::new(), None),
        };

        let precautionary = assessment
            .risks()
            .iter()
            .filter_map(|r| {
                let flag = r.precautionary()?;
                Some(PrecautionaryItem {
                    risk_id: r.id().to_string(),
                    risk: r.description().to_string(),
                    right_key: r.right_key().to_string(),
                    uncertainty_rationale: flag.uncertainty_rationale.clone(),
                    recommended_measures: flag.recommended_measures.clone(),
                    accepted: flag.accepted.clone(),
                })
            })
            .collect();

        Ok(ReportDocument {
            kind: ReportKind::Assessment,
            id: assessment.id().to_string(),
            title: assessment.title().to_string(),
            revision: Some(assessment.revision()),
            stage: Some(assessment.stage()),
            scoping: Some(scoping),
            envisaged,
            comparative,
            precautionary,
            warnings: assessment.escalation_warnings().iter().map(|w| w.to_string()).collect(),
            integrated: None,
            notes: assessment.notes().to_vec(),
            methodology: Methodology::current(),
        })
    }

    pub fn for_integrated(integrated: &IntegratedAssessment, catalog: &Catalog) -> Self {
        let rows = integrated
            .per_right
            .iter()
            .map(|(key, r)| IntegratedRow {
                right_key: key.clone(),
                right: catalog.get(key).map_or_else(|| key.clone(), |e| e.title.clone()),
                components: r
                    .components
                    .iter()
                    .map(|c| format!("{}: {}", c.component, c.level.code()))
                    .collect(),
                max_level: r.max_level,
                contributing: r.contributing,
                escalated: r.escalated,
                integrated_level: r.integrated_level,
            })
            .collect();
        let id = integrated.component_refs.join("+");
        ReportDocument {
            kind: ReportKind::Integrated,
            title: format!("Integrated assessment of {}", integrated.component_refs.join(", ")),
            id,
            revision: None,
            stage: None,
            scoping: None,
            envisaged: Vec::new(),
            comparative: None,
            precautionary: Vec::new(),
            warnings: Vec::new(),
            integrated: Some(IntegratedSection {
                components: integrated.component_refs.clone(),
                escalation_threshold: integrated.escalation_threshold,
                rows,
                precautionary: integrated.precautionary.clone(),
            }),
            notes: Vec::new(),
            methodology: Methodology::current(),
        }
    }
}
