use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

/// Assessment stages, in pipeline order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    PreliminaryAnalysis,
    Scoping,
    Fieldwork,
    AnalysisAssessment,
    Mitigation,
    FurtherImplementation,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::PreliminaryAnalysis,
        Stage::Scoping,
        Stage::Fieldwork,
        Stage::AnalysisAssessment,
        Stage::Mitigation,
        Stage::FurtherImplementation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::PreliminaryAnalysis => "preliminary_analysis",
            Stage::Scoping => "scoping",
            Stage::Fieldwork => "fieldwork",
            Stage::AnalysisAssessment => "analysis_assessment",
            Stage::Mitigation => "mitigation",
            Stage::FurtherImplementation => "further_implementation",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Stage::PreliminaryAnalysis => "I.A Preliminary analysis",
            Stage::Scoping => "I.B Scoping",
            Stage::Fieldwork => "II.A Fieldwork",
            Stage::AnalysisAssessment => "II.B Analysis and assessment",
            Stage::Mitigation => "III.A Mitigation",
            Stage::FurtherImplementation => "III.B Further implementation",
        }
    }

    fn rank(self) -> usize {
        self as usize
    }

    pub fn next(self) -> Option<Stage> {
        Stage::ALL.get(self.rank() + 1).copied()
    }

    /// Adjacent forward steps, plus the two loops back to analysis:
    /// from mitigation (another round) and from further implementation
    /// (periodic review).
    pub fn can_transition(self, to: Stage) -> bool {
        self.next() == Some(to)
            || matches!(
                (self, to),
                (Stage::Mitigation, Stage::AnalysisAssessment)
                    | (Stage::FurtherImplementation, Stage::AnalysisAssessment)
            )
    }

    pub fn is_forward(self, to: Stage) -> bool {
        to.rank() > self.rank()
    }

    /// Builtin tasks for this stage.
    pub fn tasks(self) -> &'static [&'static str] {
        match self {
            Stage::PreliminaryAnalysis => &[
                "Collection of information on the project, parties involved (including supply-chain), potential stakeholders, and territorial target area (country, region).",
                "Human rights reference framework: review of applicable binding and non-binding instruments, gap analysis.",
            ],
            Stage::Scoping => &[
                "Identification of main issues related to human rights to be examined.",
                "Drafting of a questionnaire for HRIA interviews and main indicators.",
            ],
            Stage::Fieldwork => &[
                "Interviews with internal and external project stakeholders and data collection.",
                "Understanding of contextual issues (political, economic, regulatory, and social).",
            ],
            Stage::AnalysisAssessment => &[
                "Data verification and validation, comparing and combining fieldwork results and desk analysis.",
                "Further interviews and analysis, if necessary.",
                "Impact analysis for each project branch and impacted rights and freedoms.",
                "Integrated impact assessment report.",
            ],
            Stage::Mitigation => &["Recommendations.", "Prioritisation of mitigation goals."],
            Stage::FurtherImplementation => &[
                "Post-assessment monitoring.",
                "Grievance mechanisms.",
                "Ongoing stakeholder engagement.",
            ],
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownStage(pub String);

impl fmt::Display for UnknownStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown stage {:?}", self.0)
    }
}

impl std::error::Error for UnknownStage {}

impl FromStr for Stage {
    type Err = UnknownStage;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let normalized = s.trim().to_ascii_lowercase().replace('-', "_");
        Stage::ALL
            .into_iter()
            .find(|st| st.as_str() == normalized)
            .ok_or_else(|| UnknownStage(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChecklistItem {
    pub task: String,
    #[serde(default)]
    pub done: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageChecklist {
    pub stage: Stage,
    pub items: Vec<ChecklistItem>,
}

impl StageChecklist {
    pub fn builtin(stage: Stage) -> Self {
        Self {
            stage,
            items: stage
                .tasks()
                .iter()
                .map(|t| ChecklistItem {
                    task: (*t).to_string(),
                    done: false,
                })
                .collect(),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.items.iter().all(|i| i.done)
    }

    pub fn pending(&self) -> Vec<String> {
        self.items.iter().filter(|i| !i.done).map(|i| i.task.clone()).collect()
    }
}

pub fn builtin_checklists() -> Vec<StageChecklist> {
    Stage::ALL.into_iter().map(StageChecklist::builtin).collect()
}

/// One entry of the stage log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTransition {
    pub from: Stage,
    pub to: Stage,
    pub at: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rationale: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub checklist_overridden: bool,
}
