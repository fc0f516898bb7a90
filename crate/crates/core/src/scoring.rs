//! Ordinal scoring core.
//!
//! Every rating dimension and every computed result lives on the same
//! four-step [`Level`] scale. Probability and exposure combine into a
//! likelihood score through [`LIKELIHOOD_MATRIX`]; gravity and effort combine
//! into a severity score through [`SEVERITY_MATRIX`]. Scores are then binned
//! back onto the four-step scale and combined into an overall impact level.
//!
//! The bin thresholds and the overall-impact rule are engine constants: they
//! are not configurable so that assessments stay comparable with each other.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScoringError {
    #[error("{dimension} score {score} is outside the attainable range 1..={max}")]
    OutOfRange {
        dimension: Dimension,
        score: u8,
        max: u8,
    },
    #[error("cannot aggregate an empty list of levels")]
    EmptyInput,
    #[error("unknown level {0:?} (expected low, medium, high or very_high)")]
    UnknownLevel(String),
}

/// Four-step ordinal scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Low = 1,
    Medium = 2,
    High = 3,
    VeryHigh = 4,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::Low, Level::Medium, Level::High, Level::VeryHigh];

    pub fn ordinal(self) -> u8 {
        self as u8
    }

    pub fn from_ordinal(ordinal: u8) -> Option<Level> {
        match ordinal {
            1 => Some(Level::Low),
            2 => Some(Level::Medium),
            3 => Some(Level::High),
            4 => Some(Level::VeryHigh),
            _ => None,
        }
    }

    /// Short code used in report tables: `L`, `M`, `H`, `VH`.
    pub fn code(self) -> &'static str {
        match self {
            Level::Low => "L",
            Level::Medium => "M",
            Level::High => "H",
            Level::VeryHigh => "VH",
        }
    }

    pub fn from_code(code: &str) -> Option<Level> {
        Level::ALL.into_iter().find(|l| l.code() == code)
    }

    /// Serialized name: `low`, `medium`, `high`, `very_high`.
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Low => "low",
            Level::Medium => "medium",
            Level::High => "high",
            Level::VeryHigh => "very_high",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Level::Low => "Low",
            Level::Medium => "Medium",
            Level::High => "High",
            Level::VeryHigh => "Very high",
        }
    }

    /// One step up the scale, saturating at `VeryHigh`.
    pub fn step_up(self) -> Level {
        Level::from_ordinal((self.ordinal() + 1).min(4)).unwrap_or(Level::VeryHigh)
    }

    fn index(self) -> usize {
        usize::from(self.ordinal() - 1)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level {
    type Err = ScoringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let normalized = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        match normalized.as_str() {
            "low" | "l" | "1" => Ok(Level::Low),
            "medium" | "m" | "2" => Ok(Level::Medium),
            "high" | "h" | "3" => Ok(Level::High),
            "very_high" | "veryhigh" | "vh" | "4" => Ok(Level::VeryHigh),
            _ => Err(ScoringError::UnknownLevel(s.to_string())),
        }
    }
}

/// The four rated dimensions of a risk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Probability,
    Exposure,
    Gravity,
    Effort,
    Likelihood,
    Severity,
}

impl Dimension {
    pub const RATED: [Dimension; 4] = [
        Dimension::Probability,
        Dimension::Exposure,
        Dimension::Gravity,
        Dimension::Effort,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Probability => "probability",
            Dimension::Exposure => "exposure",
            Dimension::Gravity => "gravity",
            Dimension::Effort => "effort",
            Dimension::Likelihood => "likelihood",
            Dimension::Severity => "severity",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RiskRatings {
    pub probability: Level,
    pub exposure: Level,
    pub gravity: Level,
    pub effort: Level,
}

impl RiskRatings {
    pub fn new(probability: Level, exposure: Level, gravity: Level, effort: Level) -> Self {
        Self {
            probability,
            exposure,
            gravity,
            effort,
        }
    }

    pub fn get(&self, dimension: Dimension) -> Option<Level> {
        match dimension {
            Dimension::Probability => Some(self.probability),
            Dimension::Exposure => Some(self.exposure),
            Dimension::Gravity => Some(self.gravity),
            Dimension::Effort => Some(self.effort),
            Dimension::Likelihood | Dimension::Severity => None,
        }
    }

    pub fn likelihood(&self) -> CombinedScore {
        combine_likelihood(self.probability, self.exposure)
    }

    pub fn severity(&self) -> CombinedScore {
        combine_severity(self.gravity, self.effort)
    }

    pub fn evaluate(&self) -> Evaluation {
        let likelihood = self.likelihood();
        let severity = self.severity();
        Evaluation {
            likelihood,
            severity,
            overall: overall_impact(likelihood.level, severity.level),
        }
    }

    /// Rated dimensions whose level differs from `baseline`, with their ordering.
    pub fn compare(&self, baseline: &RiskRatings) -> Vec<(Dimension, Ordering)> {
        Dimension::RATED
            .into_iter()
            .filter_map(|d| {
                let (now, before) = (self.get(d)?, baseline.get(d)?);
                match now.cmp(&before) {
                    Ordering::Equal => None,
                    ord => Some((d, ord)),
                }
            })
            .collect()
    }
}

/// A matrix score together with the level it bins to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CombinedScore {
    pub score: u8,
    pub level: Level,
}

/// Likelihood, severity and overall impact for one set of ratings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Evaluation {
    pub likelihood: CombinedScore,
    pub severity: CombinedScore,
    pub overall: Level,
}

/// Likelihood scores. Rows are exposure, columns are probability (both Low..VeryHigh).
pub const LIKELIHOOD_MATRIX: [[u8; 4]; 4] = [
    [1, 2, 3, 4],
    [2, 3, 5, 9],
    [3, 5, 9, 12],
    [4, 7, 12, 15],
];

/// Severity scores. Rows are effort, columns are gravity (both Low..VeryHigh).
pub const SEVERITY_MATRIX: [[u8; 4]; 4] = [
    [1, 2, 4, 6],
    [2, 3, 5, 8],
    [3, 5, 8, 10],
    [5, 8, 10, 12],
];

/// Inclusive upper score bound of the Low, Medium and High likelihood bins.
/// Everything above the last bound up to 15 is VeryHigh.
pub const LIKELIHOOD_BINS: [u8; 3] = [2, 6, 11];
pub const LIKELIHOOD_MAX: u8 = 15;

/// Inclusive upper score bound of the Low, Medium and High severity bins.
pub const SEVERITY_BINS: [u8; 3] = [2, 5, 9];
pub const SEVERITY_MAX: u8 = 12;

pub fn combine_likelihood(probability: Level, exposure: Level) -> CombinedScore {
    let score = LIKELIHOOD_MATRIX[exposure.index()][probability.index()];
    CombinedScore {
        score,
        level: bin(score, &LIKELIHOOD_BINS),
    }
}

pub fn combine_severity(gravity: Level, effort: Level) -> CombinedScore {
    let score = SEVERITY_MATRIX[effort.index()][gravity.index()];
    CombinedScore {
        score,
        level: bin(score, &SEVERITY_BINS),
    }
}

pub fn likelihood_bin(score: u8) -> Result<Level, ScoringError> {
    if !(1..=LIKELIHOOD_MAX).contains(&score) {
        return Err(ScoringError::OutOfRange {
            dimension: Dimension::Likelihood,
            score,
            max: LIKELIHOOD_MAX,
        });
    }
    Ok(bin(score, &LIKELIHOOD_BINS))
}

pub fn severity_bin(score: u8) -> Result<Level, ScoringError> {
    if !(1..=SEVERITY_MAX).contains(&score) {
        return Err(ScoringError::OutOfRange {
            dimension: Dimension::Severity,
            score,
            max: SEVERITY_MAX,
        });
    }
    Ok(bin(score, &SEVERITY_BINS))
}

fn bin(score: u8, bounds: &[u8; 3]) -> Level {
    match bounds.iter().position(|&upper| score <= upper) {
        Some(0) => Level::Low,
        Some(1) => Level::Medium,
        Some(_) => Level::High,
        None => Level::VeryHigh,
    }
}

/// Overall impact of a risk: the rounded-up mean of the likelihood and
/// severity ordinals.
///
/// | L \ S | L | M | H | VH |
/// |-------|---|---|---|----|
/// | L     | L | M | M | H  |
/// | M     | M | M | H | H  |
/// | H     | M | H | H | VH |
/// | VH    | H | H | VH| VH |
pub fn overall_impact(likelihood: Level, severity: Level) -> Level {
    let sum = likelihood.ordinal() + severity.ordinal();
    Level::from_ordinal(sum.div_ceil(2)).unwrap_or(Level::VeryHigh)
}

/// The full overall-impact table, rows likelihood, columns severity.
pub fn overall_impact_matrix() -> [[Level; 4]; 4] {
    Level::ALL.map(|l| Level::ALL.map(|s| overall_impact(l, s)))
}

/// Reduced fraction with a positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ratio {
    pub numerator: u32,
    pub denominator: u32,
}

impl Ratio {
    pub fn new(numerator: u32, denominator: u32) -> Self {
        assert!(denominator > 0, "ratio denominator must be positive");
        let g = gcd(numerator, denominator);
        Self {
            numerator: numerator / g,
            denominator: denominator / g,
        }
    }

    pub fn is_integral(&self) -> bool {
        self.denominator == 1
    }

    pub fn to_f64(&self) -> f64 {
        f64::from(self.numerator) / f64::from(self.denominator)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integral() {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, self.denominator)
        }
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Mean of several levels, shown as a level or as a band between two
/// adjacent levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ImpactBand {
    pub mean: Ratio,
    pub primary_level: Level,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secondary_level: Option<Level>,
}

impl ImpactBand {
    /// Table rendering, e.g. `M` or `M/H`.
    pub fn code(&self) -> String {
        match self.secondary_level {
            Some(second) => format!("{}/{}", self.primary_level.code(), second.code()),
            None => self.primary_level.code().to_string(),
        }
    }
}

impl fmt::Display for ImpactBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

/// Arithmetic mean of `levels`. A fractional mean is reported as the two
/// bracketing levels, nearest first; an exact half puts the lower one first.
pub fn aggregate_band(levels: &[Level]) -> Result<ImpactBand, ScoringError> {
    if levels.is_empty() {
        return Err(ScoringError::EmptyInput);
    }
    let count = levels.len() as u32;
    let sum: u32 = levels.iter().map(|l| u32::from(l.ordinal())).sum();
    let mean = Ratio::new(sum, count);
    let lower = sum / count;
    let remainder = sum - lower * count;
    let lower_level = Level::from_ordinal(lower as u8).expect("mean of ordinals stays in 1..=4");
    if remainder == 0 {
        return Ok(ImpactBand {
            mean,
            primary_level: lower_level,
            secondary_level: None,
        });
    }
    let upper_level = lower_level.step_up();
    let (primary, secondary) = if remainder * 2 <= count {
        (lower_level, upper_level)
    } else {
        (upper_level, lower_level)
    };
    Ok(ImpactBand {
        mean,
        primary_level: primary,
        secondary_level: Some(secondary),
    })
}

/// Descriptor text for a rating dimension at a given level, as shown to
/// assessors next to each picker.
pub fn descriptor(dimension: Dimension, level: Level) -> &'static str {
    let row = match dimension {
        Dimension::Probability => &PROBABILITY_DESCRIPTORS,
        Dimension::Exposure => &EXPOSURE_DESCRIPTORS,
        Dimension::Gravity => &GRAVITY_DESCRIPTORS,
        Dimension::Effort => &EFFORT_DESCRIPTORS,
        Dimension::Likelihood | Dimension::Severity => return level.label(),
    };
    row[level.index()]
}

const PROBABILITY_DESCRIPTORS: [&str; 4] = [
    "The risk of prejudice is improbable or highly improbable",
    "The risk may occur",
    "There is a high probability that the risk occurs",
    "The risk is highly likely to occur",
];

const EXPOSURE_DESCRIPTORS: [&str; 4] = [
    "Few or very few of the identified population of rights-holders are potentially affected",
    "Some of the identified population are potentially affected",
    "The majority of the identified population is potentially affected",
    "Almost the entire identified population is potentially affected",
];

const GRAVITY_DESCRIPTORS: [&str; 4] = [
    "Affected individuals and groups may encounter only minor prejudices in the exercise of their rights and freedoms.",
    "Affected individuals and groups may encounter significant prejudices.",
    "Affected individuals and groups may encounter serious prejudices.",
    "Affected individuals and groups may encounter serious or even irreversible prejudices.",
];

const EFFORT_DESCRIPTORS: [&str; 4] = [
    "Suffered prejudice can be overcome without any problem (e.g. time spent amending information, annoyances, irritations, etc.)",
    "Suffered prejudice can be overcome despite a few difficulties (e.g. extra costs, fear, lack of understanding, stress, minor physical ailments, etc.).",
    "Suffered prejudice can be overcome albeit with serious difficulties (e.g. economic loss, property damage, worsening of health, etc.).",
    "Suffered prejudice may not be overcome (e.g. long-term psychological or physical ailments, death, etc.).",
];
