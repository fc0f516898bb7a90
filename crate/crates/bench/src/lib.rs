//! Synthetic assessments for benchmarks.

use chrono::{DateTime, Duration, Utc};
use hria_core::assessment::{AssessmentMetadata, NewRisk, Residual, Round};
use hria_core::catalog::BUILTIN_KEYS;
use hria_core::{Assessment, Level, RiskRatings};

fn level(i: usize) -> Level {
    Level::ALL[i % 4]
}

fn epoch() -> DateTime<Utc> {
    DateTime::from_timestamp(1_625_097_600, 0).expect("valid timestamp")
}

/// An assessment with `risks` rated risks spread over the builtin rights,
/// each with `rounds` non-escalating mitigation rounds.
pub fn synthetic(id: &str, risks: usize, rounds: usize) -> Assessment {
    let mut a = Assessment::new(AssessmentMetadata {
        title: format!("Synthetic {id}"),
        id: Some(id.to_string()),
        description: None,
    })
    .expect("valid metadata");
    for i in 0..risks {
        let initial = RiskRatings::new(level(i + 3), level(i / 4 + 3), level(i / 16 + 2), level(i + 1));
        let right = BUILTIN_KEYS[i % BUILTIN_KEYS.len()];
        a.add_risk(NewRisk::rated(format!("r{i}"), right, format!("Risk {i}"), initial))
            .expect("valid risk");
        let mut current = initial;
        for r in 0..rounds {
            // Lower one dimension per round, never below low.
            let lower = |l: Level| Level::from_ordinal(l.ordinal().saturating_sub(1).max(1)).expect("ordinal in range");
            current = match r % 4 {
                0 => RiskRatings { probability: lower(current.probability), ..current },
                1 => RiskRatings { exposure: lower(current.exposure), ..current },
                2 => RiskRatings { gravity: lower(current.gravity), ..current },
                _ => RiskRatings { effort: lower(current.effort), ..current },
            };
            let round = Round::new(r as u32 + 1, Residual::Rated(current), epoch() + Duration::minutes(r as i64))
                .with_rationale("measures applied");
            a.apply_round(&format!("r{i}"), round).expect("valid round");
        }
    }
    a
}
