//! Planning and scoping record.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// The four question blocks of the planning and scoping questionnaire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionBlock {
    ProductDescription,
    HumanRightsContext,
    ControlsInPlace,
    StakeholderEngagement,
}

impl QuestionBlock {
    pub const ALL: [QuestionBlock; 4] = [
        QuestionBlock::ProductDescription,
        QuestionBlock::HumanRightsContext,
        QuestionBlock::ControlsInPlace,
        QuestionBlock::StakeholderEngagement,
    ];

    pub fn title(self) -> &'static str {
        match self {
            QuestionBlock::ProductDescription => "Description and analysis of the type of product/service, including related data flows and data processing purposes",
            QuestionBlock::HumanRightsContext => "Human rights context (contextualisation based on local jurisprudence and laws)",
            QuestionBlock::ControlsInPlace => "Controls in place",
            QuestionBlock::StakeholderEngagement => "Stakeholder engagement",
        }
    }

    pub fn questions(self) -> impl Iterator<Item = &'static Question> {
        QUESTIONS.iter().filter(move |q| q.block == self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Question {
    pub block: QuestionBlock,
    pub key: &'static str,
    pub text: &'static str,
}

macro_rules! q {
    ($block:ident, $key:expr, $text:expr) => {
        Question {
            block: QuestionBlock::$block,
            key: $key,
            text: $text,
        }
    };
}

/// The builtin planning and scoping questions. Product-description questions
/// map onto the structured fields of [`ScopingRecord`]; the others are keys
/// of the corresponding answer maps.
pub const QUESTIONS: &[Question] = &[
    q!(ProductDescription, "product_description", "What are the main features of the product/service?"),
    q!(ProductDescription, "target_countries", "In which countries will the product/service be offered?"),
    q!(ProductDescription, "rights_holders", "Identification of rights-holders: who are the target-users of the product/service?"),
    q!(ProductDescription, "data_categories", "What types of data are collected (personal, non-personal, special categories)?"),
    q!(ProductDescription, "processing_purposes", "What are the main purposes of data processing?"),
    q!(ProductDescription, "duty_bearers", "Identification of the duty-bearers: which subjects are involved in data management and what is their role in data processing?"),
    q!(HumanRightsContext, "affected_rights", "Which human rights are potentially affected by the product/service?"),
    q!(HumanRightsContext, "legal_instruments", "Which international/regional legal instruments have been implemented at an operational level?"),
    q!(HumanRightsContext, "authoritative_bodies", "Which are the most relevant courts or authoritative bodies in the field of human rights in the context?"),
    q!(HumanRightsContext, "relevant_decisions", "What are the relevant decisions and provisions in the field of human rights?"),
    q!(ControlsInPlace, "impact_policies", "What policies and procedures are in place to assess the potential impact on human rights, including stakeholder engagement?"),
    q!(ControlsInPlace, "prior_assessments", "Has an impact assessment been carried out, developed and implemented in relation to specific issues or some features of the product/service (e.g. use of biometrics)?"),
    q!(StakeholderEngagement, "affected_groups", "Which are the main groups or communities potentially affected by the service/product, including its development?"),
    q!(StakeholderEngagement, "other_stakeholders", "What other stakeholders should be involved, in addition to affected community and groups, (e.g. civil society and international organisations, experts, industry associations, journalists)?"),
    q!(StakeholderEngagement, "other_duty_bearers", "Are there any other duty-bearers to be involved, apart from the product/service developer (e.g. national authorities, governmental agencies)?"),
    q!(StakeholderEngagement, "business_partners", "Were business partners, including suppliers (e.g. subcontractors in AI systems and datasets) involved in the assessment process?"),
    q!(StakeholderEngagement, "supply_chain", "Has the developer conducted an assessment of its supply chain to identify whether the activities of suppliers/contractors involved in product/service development might contribute to adverse human rights impacts? Has the developer promoted human rights standards or audits to ensure respect for human rights among suppliers?"),
    q!(StakeholderEngagement, "public_communication", "Do the product/service developers publicly communicate the potential impacts on human rights of the service/product?"),
    q!(StakeholderEngagement, "staff_training", "Does the developer provide training on human rights standards for relevant management and procurement staff?"),
];

pub fn question(block: QuestionBlock, key: &str) -> Option<&'static Question> {
    QUESTIONS.iter().find(|q| q.block == block && q.key == key)
}

/// Free-text answer. `extension` marks a project-specific question that is
/// not part of the builtin set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Answer {
    pub answer: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub extension: bool,
}

impl Answer {
    pub fn new(answer: impl Into<String>) -> Self {
        Self {
            answer: answer.into(),
            extension: false,
        }
    }

    pub fn extension(answer: impl Into<String>) -> Self {
        Self {
            answer: answer.into(),
            extension: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stakeholder {
    pub name: String,
    pub category: String,
    #[serde(default)]
    pub engaged: bool,
    #[serde(default)]
    pub notes: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScopingRecord {
    pub product_description: String,
    pub target_countries: Vec<String>,
    pub rights_holders: Vec<String>,
    pub data_categories: Vec<String>,
    pub processing_purposes: Vec<String>,
    pub duty_bearers: Vec<String>,
    pub human_rights_context: BTreeMap<String, Answer>,
    pub controls_in_place: BTreeMap<String, Answer>,
    pub stakeholder_engagement: BTreeMap<String, Answer>,
    pub stakeholders: Vec<Stakeholder>,
}

/// A scoping answer that is neither a builtin question nor flagged as an extension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownQuestion {
    pub path: String,
}

impl ScopingRecord {
    fn answers(&self, block: QuestionBlock) -> Option<(&'static str, &BTreeMap<String, Answer>)> {
        match block {
            QuestionBlock::ProductDescription => None,
            QuestionBlock::HumanRightsContext => Some(("human_rights_context", &self.human_rights_context)),
            QuestionBlock::ControlsInPlace => Some(("controls_in_place", &self.controls_in_place)),
            QuestionBlock::StakeholderEngagement => Some(("stakeholder_engagement", &self.stakeholder_engagement)),
        }
    }

    pub fn check_question_keys(&self) -> Result<(), UnknownQuestion> {
        for block in QuestionBlock::ALL {
            let Some((field, answers)) = self.answers(block) else {
                continue;
            };
            for (key, answer) in answers {
                if !answer.extension && question(block, key).is_none() {
                    return Err(UnknownQuestion {
                        path: format!("scoping.{field}.{key}"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Number of builtin questions of `block` that have a non-empty answer.
    pub fn answered(&self, block: QuestionBlock) -> usize {
        block
            .questions()
            .filter(|q| match self.answers(block) {
                Some((_, answers)) => answers.get(q.key).is_some_and(|a| !a.answer.trim().is_empty()),
                None => match q.key {
                    "product_description" => !self.product_description.trim().is_empty(),
                    "target_countries" => !self.target_countries.is_empty(),
                    "rights_holders" => !self.rights_holders.is_empty(),
                    "data_categories" => !self.data_categories.is_empty(),
                    "processing_purposes" => !self.processing_purposes.is_empty(),
                    "duty_bearers" => !self.duty_bearers.is_empty(),
                    _ => false,
                },
            })
            .count()
    }

    pub fn block_complete(&self, block: QuestionBlock) -> bool {
        self.answered(block) == block.questions().count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn question_keys_unique_within_block() {
        for block in QuestionBlock::ALL {
            let mut keys: Vec<_> = block.questions().map(|q| q.key).collect();
            let n = keys.len();
            keys.sort_unstable();
            keys.dedup();
            assert_eq!(keys.len(), n);
        }
    }

    #[test]
    fn unknown_keys_must_be_flagged() {
        let mut s = ScopingRecord::default();
        s.human_rights_context.insert("affected_rights".into(), Answer::new("privacy"));
        assert!(s.check_question_keys().is_ok());
        s.controls_in_place.insert("iso_audit".into(), Answer::new("yes"));
        assert_eq!(
            s.check_question_keys(),
            Err(UnknownQuestion { path: "scoping.controls_in_place.iso_audit".into() })
        );
        s.controls_in_place.insert("iso_audit".into(), Answer::extension("yes"));
        assert!(s.check_question_keys().is_ok());
    }

    #[test]
    fn block_progress() {
        let mut s = ScopingRecord::default();
        assert_eq!(s.answered(QuestionBlock::ProductDescription), 0);
        s.product_description = "A doll".into();
        s.target_countries = vec!["US".into()];
        assert_eq!(s.answered(QuestionBlock::ProductDescription), 2);
        assert!(!s.block_complete(QuestionBlock::ProductDescription));
        s.rights_holders = vec!["children".into()];
        s.data_categories = vec!["voice".into()];
        s.processing_purposes = vec!["dialogue".into()];
        s.duty_bearers = vec!["producer".into()];
        assert!(s.block_complete(QuestionBlock::ProductDescription));
    }
}
