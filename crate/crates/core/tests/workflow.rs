mod driver;

use chrono::{TimeZone, Utc};
use hria_core::assessment::{AssessmentMetadata, NewRisk};
use hria_core::fixtures::hello_barbie_mitigated;
use hria_core::workflow::Stage;
use hria_core::{Assessment, AssessmentError, Level, PrecautionaryFlag, RiskRatings};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn random_sequences_respect_the_gates(ops in driver::sequence()) {
        if let Err(msg) = driver::check(&ops) {
            prop_assert!(false, "{}", msg);
        }
    }
}

#[test]
fn stage_skips_are_illegal() {
    let at = Utc.with_ymd_and_hms(2021, 7, 1, 0, 0, 0).unwrap();
    let mut a = Assessment::new(AssessmentMetadata::titled("x")).unwrap();
    a.complete_stage_tasks(Stage::PreliminaryAnalysis).unwrap();
    a.advance(Stage::Scoping, None, at).unwrap();
    let err = a.advance(Stage::Mitigation, Some("please"), at).unwrap_err();
    assert_eq!(err, AssessmentError::IllegalTransition { from: Stage::Scoping, to: Stage::Mitigation });
    assert!(err.to_string().contains("illegal transition"));
}

#[test]
fn precautionary_flag_blocks_finalization_until_accepted() {
    let at = Utc.with_ymd_and_hms(2021, 7, 10, 0, 0, 0).unwrap();
    let mut a = hello_barbie_mitigated();
    let mut unknown = NewRisk::rated("emotion", "personal-integrity", "Long-term effects of companion bonding", RiskRatings::new(Level::Low, Level::Low, Level::Low, Level::Low));
    unknown.initial = None;
    unknown.precautionary = Some(PrecautionaryFlag::new("No evidence on long-term effects"));
    a.add_risk(unknown).unwrap();
    a.complete_stage_tasks(Stage::Mitigation).unwrap();
    let err = a.advance(Stage::FurtherImplementation, Some("override"), at).unwrap_err();
    assert_eq!(err, AssessmentError::PrecautionaryUnresolved { risk_ids: vec!["emotion".into()] });
    a.accept_precautionary("emotion", "Deployment limited to a pilot").unwrap();
    a.advance(Stage::FurtherImplementation, None, at).unwrap();
    assert!(a.is_finalized());
    assert_eq!(a.add_note("late"), Ok(()));
    assert_eq!(a.complete_stage_tasks(Stage::Mitigation), Err(AssessmentError::Finalized));
    // Loop back to reopen.
    a.advance(Stage::AnalysisAssessment, None, at).unwrap();
    assert!(!a.is_finalized());
}
