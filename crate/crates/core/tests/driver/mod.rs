//! Random call sequences against the assessment workflow, with the safety
//! properties checked after every step.
#![allow(dead_code)]

use chrono::{DateTime, TimeZone, Utc};
use hria_core::assessment::{AssessmentMetadata, NewRisk, Residual, Round, ScopingRecord};
use hria_core::workflow::Stage;
use hria_core::{Assessment, AssessmentError, Level, PrecautionaryFlag, RiskRatings};
use proptest::prelude::*;

pub const RISKS: [&str; 3] = ["r0", "r1", "r2"];

#[derive(Debug, Clone)]
pub enum Op {
    Advance { to: usize, override_checklist: bool },
    /// Advance to the stage after the current one.
    Next { override_checklist: bool },
    /// Loop back to analysis.
    Back,
    CompleteTasks(usize),
    CompleteCurrent,
    Scope(bool),
    AddRisk { k: usize, ratings: [u8; 4], precautionary: bool },
    Flag(usize),
    Accept(usize),
    Resolve { k: usize, ratings: Option<[u8; 4]> },
    Round { k: usize, ratings: [u8; 4] },
}

fn ratings() -> impl Strategy<Value = [u8; 4]> {
    [1u8..=4, 1u8..=4, 1u8..=4, 1u8..=4]
}

pub fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        2 => (0usize..6, any::<bool>()).prop_map(|(to, override_checklist)| Op::Advance { to, override_checklist }),
        5 => any::<bool>().prop_map(|override_checklist| Op::Next { override_checklist }),
        1 => Just(Op::Back),
        1 => (0usize..6).prop_map(Op::CompleteTasks),
        3 => Just(Op::CompleteCurrent),
        1 => any::<bool>().prop_map(Op::Scope),
        2 => (0usize..3, ratings(), any::<bool>()).prop_map(|(k, ratings, precautionary)| Op::AddRisk { k, ratings, precautionary }),
        1 => (0usize..3).prop_map(Op::Flag),
        1 => (0usize..3).prop_map(Op::Accept),
        1 => (0usize..3, proptest::option::of(ratings())).prop_map(|(k, ratings)| Op::Resolve { k, ratings }),
        2 => (0usize..3, ratings()).prop_map(|(k, ratings)| Op::Round { k, ratings }),
    ]
}

pub fn sequence() -> impl Strategy<Value = Vec<Op>> {
    proptest::collection::vec(op(), 1..40)
}

pub fn rr(r: [u8; 4]) -> RiskRatings {
    let l = |o| Level::from_ordinal(o).unwrap();
    RiskRatings::new(l(r[0]), l(r[1]), l(r[2]), l(r[3]))
}

pub fn at(step: usize) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2021, 1, 1, 0, 0, 0).unwrap() + chrono::Duration::minutes(step as i64)
}

fn stage_index(stage: Stage) -> usize {
    Stage::ALL.iter().position(|s| *s == stage).unwrap()
}

/// Rewrites state-relative ops into their concrete form for `a`.
pub fn resolve(op: &Op, a: &Assessment) -> Op {
    let current = stage_index(a.stage());
    match op {
        Op::Next { override_checklist } => Op::Advance {
            to: (current + 1).min(5),
            override_checklist: *override_checklist,
        },
        Op::Back => Op::Advance {
            to: stage_index(Stage::AnalysisAssessment),
            override_checklist: false,
        },
        Op::CompleteCurrent => Op::CompleteTasks(current),
        other => other.clone(),
    }
}

pub fn apply(a: &mut Assessment, op: &Op, step: usize) -> Result<(), AssessmentError> {
    match resolve(op, a) {
        Op::Advance { to, override_checklist } => {
            a.advance(Stage::ALL[to], override_checklist.then_some("assessor override"), at(step))
        }
        Op::CompleteTasks(s) => a.complete_stage_tasks(Stage::ALL[s]),
        Op::Scope(filled) => a.set_scoping(ScopingRecord {
            product_description: if filled { "connected toy".into() } else { String::new() },
            ..ScopingRecord::default()
        }),
        Op::AddRisk { k, ratings, precautionary } => {
            let mut new = NewRisk::rated(RISKS[k], "privacy-data-protection", "risk", rr(ratings));
            if precautionary {
                new.initial = None;
                new.precautionary = Some(PrecautionaryFlag::new("cannot be quantified yet"));
            }
            a.add_risk(new)
        }
        Op::Flag(k) => a.flag_precautionary(RISKS[k], "new uncertainty", vec![]),
        Op::Accept(k) => a.accept_precautionary(RISKS[k], "accepted by board"),
        Op::Resolve { k, ratings } => a.resolve_precautionary(RISKS[k], "evidence gathered", ratings.map(rr)),
        Op::Next { .. } | Op::Back | Op::CompleteCurrent => unreachable!("resolved above"),
        Op::Round { k, ratings } => {
            let index = a.risk(RISKS[k]).map_or(1, |r| r.rounds().len() as u32 + 1);
            let round = Round::new(index, Residual::Rated(rr(ratings)), at(step)).with_rationale("re-assessed");
            a.apply_round(RISKS[k], round).map(|_| ())
        }
    }
}

/// Runs `ops` from a fresh assessment, checking the workflow properties after
/// each step. Returns a description of the first violation.
pub fn check(ops: &[Op]) -> Result<(), String> {
    let mut a = Assessment::new(AssessmentMetadata::titled("Sequence")).unwrap();
    for (step, op) in ops.iter().enumerate() {
        let before = a.clone();
        match apply(&mut a, op, step) {
            Err(e) => {
                if a != before {
                    return Err(format!("step {step} {op:?} failed ({e}) but changed the assessment"));
                }
                if let AssessmentError::PrecautionaryUnresolved { risk_ids } = &e {
                    if risk_ids.is_empty() || a.open_precautionary() != *risk_ids {
                        return Err(format!("step {step}: wrong precautionary report {risk_ids:?}"));
                    }
                }
            }
            Ok(()) => {
                if a.revision() != before.revision() + 1 {
                    return Err(format!("step {step} {op:?}: revision not incremented"));
                }
            }
        }
        a.validate().map_err(|v| format!("step {step} {op:?}: {v}"))?;
        let mut expected_from = Stage::PreliminaryAnalysis;
        for t in a.transitions() {
            if t.from != expected_from || !t.from.can_transition(t.to) {
                return Err(format!("step {step}: illegal recorded transition {} -> {}", t.from, t.to));
            }
            if t.to == Stage::Mitigation && t.from != Stage::AnalysisAssessment {
                return Err(format!("step {step}: reached mitigation from {}", t.from));
            }
            expected_from = t.to;
        }
        if a.stage() >= Stage::Mitigation && !a.transitions().iter().any(|t| t.to == Stage::AnalysisAssessment) {
            return Err(format!("step {step}: {} reached without analysis", a.stage()));
        }
        if a.stage() == Stage::FurtherImplementation && !a.open_precautionary().is_empty() {
            return Err(format!("step {step}: finalized with open precautionary flags"));
        }
    }
    Ok(())
}
