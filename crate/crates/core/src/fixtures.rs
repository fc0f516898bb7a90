//! The connected-doll worked case ("Hello Barbie") as a reproducible
//! assessment, plus the published table values it is checked against.
//!
//! The published comparative table prints the privacy residual likelihood as
//! M, while the narrated residual ratings (probability low, exposure low)
//! combine to score 1, which bins to L. The fixture stores the narrated
//! ratings and records the discrepancy in [`PRIVACY_RESIDUAL_NOTE`]; the
//! engine output is L and the final impact (M) agrees with the table.

use chrono::{DateTime, TimeZone, Utc};

use crate::assessment::{
    Answer, Assessment, AssessmentMetadata, MitigationMeasure, NewRisk, Residual, Round, ScopingRecord, Stakeholder,
};
use crate::catalog::RightEntry;
use crate::scoring::{Level, RiskRatings};
use crate::workflow::Stage;

pub const TITLE: &str = "Hello Barbie";
pub const PRIVACY: &str = "privacy";
pub const THOUGHT: &str = "thought";
pub const SAFETY: &str = "safety";

pub const PRIVACY_RIGHT: &str = "privacy-data-protection";
pub const THOUGHT_RIGHT: &str = "freedom-of-thought-child";
pub const SAFETY_RIGHT: &str = "psychological-physical-safety";

/// Published rows of the envisaged-risk table: (risk id, L, S, overall).
pub const PUBLISHED_INITIAL: [(&str, Level, Level, Level); 3] = [
    (PRIVACY, Level::VeryHigh, Level::Medium, Level::High),
    (THOUGHT, Level::Medium, Level::Low, Level::Medium),
    (SAFETY, Level::Low, Level::Medium, Level::Medium),
];

/// Published residual columns of the comparative table: (risk id, rL, rS, final).
pub const PUBLISHED_RESIDUAL: [(&str, Level, Level, Level); 3] = [
    (PRIVACY, Level::Medium, Level::Medium, Level::Medium),
    (THOUGHT, Level::Low, Level::Low, Level::Low),
    (SAFETY, Level::Low, Level::Medium, Level::Medium),
];

pub const PUBLISHED_AGGREGATE_BEFORE: &str = "M/H";
pub const PUBLISHED_AGGREGATE_AFTER: &str = "M/L";

/// Residual likelihood the engine computes for the privacy risk from the
/// narrated residual ratings, against the published cell.
pub const PRIVACY_RESIDUAL_LIKELIHOOD_COMPUTED: Level = Level::Low;
pub const PRIVACY_RESIDUAL_LIKELIHOOD_PUBLISHED: Level = Level::Medium;

pub const PRIVACY_RESIDUAL_NOTE: &str = "Privacy residual likelihood: the narrated residual ratings \
(probability low, exposure low) give likelihood score 1, which bins to L. The published comparative \
table prints rL = M, which may reflect a different residual-probability judgment. The fixture keeps \
the narrated ratings; the final impact (M) is the same under either reading.";

const PRIVACY_QUESTIONS: [&str; 6] = [
    "Does the device collect personal information? If yes, what kind of data is collected, and what are the main features of data processing? Can the data be shared with other entities/persons?",
    "Can the connected toy intrude into the users' private sphere?",
    "Can the connected toy be used for monitoring and surveillance purposes? If yes, is this monitoring continuous or can the user stop it?",
    "Do users belong to vulnerable categories (e.g. minors, elderly people, parents, etc.)?",
    "Are third parties involved in the data processing?",
    "Are transborder data flows part of the processing operations?",
];

const THOUGHT_QUESTIONS: [&str; 3] = [
    "Is the device able to transmit content to the user?",
    "Which kind of relationships is the device able to create with the user?",
    "Does the device share any value-oriented messages with the user?",
];

const SAFETY_QUESTIONS: [&str; 3] = [
    "Can the device put psychological or physical safety at risk?",
    "Does the device have adequate data security and cybersecurity measures in place?",
    "Can third parties perpetrate malicious attacks that pose a risk to the psychological or physical safety of the user?",
];

fn at(day: u32, hour: u32) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2021, 7, day, hour, 0, 0).single().expect("valid fixture date")
}

fn ratings(p: Level, e: Level, g: Level, f: Level) -> RiskRatings {
    RiskRatings::new(p, e, g, f)
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

pub fn scoping() -> ScopingRecord {
    let mut s = ScopingRecord {
        product_description: "Interactive doll with speech recognition and AI-based dialogue, operating as an \
IoT device. Conversations are recorded when the belt buckle is pressed, sent to a cloud service for \
recognition, and answered from a closed set of pre-recorded lines. A companion app lets parents review \
and delete recordings."
            .into(),
        target_countries: strings(&["United States", "United Kingdom", "Canada"]),
        rights_holders: strings(&["children (direct users)", "parents (supervisory users)", "friends and family present during play (third parties)"]),
        data_categories: strings(&["voice recordings", "speech transcripts", "parent email address", "optional child birthday"]),
        processing_purposes: strings(&["speech recognition and dialogue", "service improvement", "parental review of recordings"]),
        duty_bearers: strings(&["toy manufacturer", "cloud speech service provider"]),
        ..ScopingRecord::default()
    };
    for (key, answer) in [
        ("affected_rights", "Privacy and data protection; freedom of thought and parental guidance; psychological and physical safety."),
        ("legal_instruments", "UN Convention on the Rights of the Child; COPPA; GDPR for EU distribution."),
        ("authoritative_bodies", "Data protection authorities; consumer protection agencies."),
        ("relevant_decisions", "Regulator notices on internet-connected toys."),
    ] {
        s.human_rights_context.insert(key.into(), Answer::new(answer));
    }
    for (key, answer) in [
        ("impact_policies", "Privacy policy and parental consent flow; no human-rights-specific procedure."),
        ("prior_assessments", "COPPA compliance review only."),
    ] {
        s.controls_in_place.insert(key.into(), Answer::new(answer));
    }
    for (key, answer) in [
        ("affected_groups", "Children aged 3-10 and their families."),
        ("other_stakeholders", "Parents associations, educational bodies, data protection authorities."),
    ] {
        s.stakeholder_engagement.insert(key.into(), Answer::new(answer));
    }
    s.stakeholders = vec![
        Stakeholder {
            name: "Parents associations".into(),
            category: "users".into(),
            engaged: false,
            notes: "Concerns expected on recording and security.".into(),
        },
        Stakeholder {
            name: "Data protection authorities".into(),
            category: "supervisory".into(),
            engaged: false,
            notes: String::new(),
        },
    ];
    s
}

fn thought_right() -> RightEntry {
    RightEntry::custom(
        THOUGHT_RIGHT,
        "Freedom of thought, parental guidance and the best interest of the child",
        "Values conveyed to children through the doll's dialogue, and the parents' role in guiding them.",
    )
}

fn safety_right() -> RightEntry {
    RightEntry::custom(
        SAFETY_RIGHT,
        "Right to psychological and physical safety",
        "Harm to the user made possible by third parties taking control of the device.",
    )
}

fn with_answers(mut risk: NewRisk, questions: &[&str], answers: &[&str]) -> NewRisk {
    for (q, a) in questions.iter().zip(answers) {
        risk = risk.with_guiding_answer(*q, *a);
    }
    risk
}

/// The assessment after the initial analysis: three rated risks, stage
/// `analysis_assessment`.
pub fn hello_barbie_initial() -> Assessment {
    use Level::*;
    let mut a = Assessment::new(AssessmentMetadata {
        title: TITLE.into(),
        id: Some("hello-barbie".into()),
        description: Some("Connected AI-equipped doll for children.".into()),
    })
    .expect("fixture metadata");

    a.complete_stage_tasks(Stage::PreliminaryAnalysis).expect("fixture");
    a.advance(Stage::Scoping, None, at(1, 9)).expect("fixture");
    a.set_scoping(scoping()).expect("fixture");
    a.register_right(thought_right()).expect("fixture");
    a.register_right(safety_right()).expect("fixture");
    a.complete_stage_tasks(Stage::Scoping).expect("fixture");
    a.advance(Stage::Fieldwork, None, at(1, 12)).expect("fixture");
    a.complete_stage_tasks(Stage::Fieldwork).expect("fixture");
    a.advance(Stage::AnalysisAssessment, None, at(2, 9)).expect("fixture");

    let privacy = with_answers(
        NewRisk::rated(PRIVACY, PRIVACY_RIGHT, "Impact on privacy and data protection", ratings(High, VeryHigh, High, Medium)),
        &PRIVACY_QUESTIONS,
        &[
            "Yes: voice recordings of children, processed in the cloud; parents can share them.",
            "Yes: recordings capture private conversations at home.",
            "Recording runs only while the buckle is pressed; parents can listen to recordings.",
            "Yes: minors.",
            "Yes: the cloud speech provider and its subcontractors.",
            "Yes: recordings are hosted abroad.",
        ],
    );
    let thought = with_answers(
        NewRisk::rated(THOUGHT, THOUGHT_RIGHT, "Impact on freedom of thought", ratings(Medium, Medium, Low, Low)),
        &THOUGHT_QUESTIONS,
        &[
            "Yes: scripted spoken lines.",
            "A companion-like relationship with the child.",
            "Yes: some scripted lines carry value judgments.",
        ],
    );
    let safety = with_answers(
        NewRisk::rated(
            SAFETY,
            SAFETY_RIGHT,
            "Impact on the right to psychological and physical safety",
            ratings(Medium, Low, Medium, Medium),
        ),
        &SAFETY_QUESTIONS,
        &[
            "Yes, if an attacker takes control of the doll.",
            "Partly: communication is encrypted but device and Wi-Fi hardening is weak.",
            "Yes, mainly when the doll is used outdoors on open networks.",
        ],
    );
    for risk in [privacy, thought, safety] {
        a.add_risk(risk).expect("fixture risk");
    }
    a
}

/// Mitigation rounds for each risk, in fixture order.
pub fn mitigation_rounds() -> Vec<(&'static str, Round)> {
    use Level::*;
    let mm = |d: &str, c: &str| MitigationMeasure::new(d, c);
    vec![
        (
            PRIVACY,
            Round::new(1, Residual::Rated(ratings(Low, Low, Medium, Medium)), at(5, 9))
                .with_measures([
                    mm("No use of child-doll conversations for marketing", "data use"),
                    mm("Clear, accessible notice and consent mechanism", "transparency"),
                    mm("Encrypted device-service communication", "security"),
                    mm("Server-side security requirements, including user change handling", "security"),
                    mm("Stronger device authentication and encryption", "security"),
                ])
                .with_rationale(
                    "Exposure limited to special circumstances such as malicious attack; probability low after \
dialogue, collection and retention measures; gravity lowered to medium, effort stays medium.",
                ),
        ),
        (
            THOUGHT,
            Round::new(1, Residual::Rated(ratings(Low, Medium, Low, Low)), at(5, 10))
                .with_measures([
                    mm("Closed set of pre-recorded lines tuned to the user's age", "content"),
                    mm("User-customizable content and no stereotyping by default", "content"),
                    mm("Diverse team writing the dialogue", "organisation"),
                    mm("Visual maps of the values and content used", "transparency"),
                    mm("Parental customization of values in critical areas", "parental control"),
                ])
                .with_rationale("Probability lowered to low; exposure stays medium given wide distribution."),
        ),
        (
            SAFETY,
            Round::new(1, Residual::Rated(ratings(Low, Low, Medium, Medium)), at(5, 11))
                .with_measures([
                    mm("No interaction with other IoT devices", "security"),
                    mm("Strong authentication", "security"),
                    mm("Data encryption", "security"),
                ])
                .with_rationale("Probability lowered to low given the measures and low attacker interest."),
        ),
    ]
}

/// The assessment after the mitigation rounds, at stage `mitigation`.
pub fn hello_barbie_mitigated() -> Assessment {
    let mut a = hello_barbie_initial();
    a.complete_stage_tasks(Stage::AnalysisAssessment).expect("fixture");
    a.advance(Stage::Mitigation, None, at(4, 9)).expect("fixture");
    for (risk, round) in mitigation_rounds() {
        a.apply_round(risk, round).expect("fixture round");
    }
    a.add_note(PRIVACY_RESIDUAL_NOTE).expect("fixture note");
    a
}
