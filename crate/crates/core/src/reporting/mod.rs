//! Deterministic report and chart rendering. Every value is recomputed from
//! the model at render time.

mod chart;
mod document;
mod markdown;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::assessment::Assessment;
use crate::canonical::to_canonical_string;
use crate::catalog::Catalog;
use crate::workflow::{IntegratedAssessment, Stage};

pub use chart::{RadialAxis, RadialChartSpec, RadialSeries, SeriesRole, FILL_OPACITY, FINAL_COLOR, INITIAL_COLOR};
pub use document::{
    BinRange, BlockProgress, ComparativeRow, ComparativeSection, Descriptor, EnvisagedRow, IntegratedRow,
    IntegratedSection, Methodology, PrecautionaryItem, ReportDocument, ReportKind, ResidualCells, ScopingSummary,
};
pub use markdown::{COMPARATIVE_HEADER, EXCLUDED_CELL, LEGEND};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("reports are available once the assessment has passed scoping (current stage: {0})")]
    StageTooEarly(Stage),
    #[error("no scored risks to chart")]
    NoRisks,
    #[error("unknown report format {0:?} (expected md, json or svg)")]
    UnknownFormat(String),
    #[error("svg output is only available for single assessments")]
    UnsupportedFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Json,
    Svg,
}

impl FromStr for ReportFormat {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            "json" => Ok(ReportFormat::Json),
            "svg" => Ok(ReportFormat::Svg),
            _ => Err(ReportError::UnknownFormat(s.to_string())),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Markdown => "md",
            ReportFormat::Json => "json",
            ReportFormat::Svg => "svg",
        })
    }
}

impl ReportFormat {
    pub fn content_type(self) -> &'static str {
        match self {
            ReportFormat::Markdown => "text/markdown; charset=utf-8",
            ReportFormat::Json => "application/json",
            ReportFormat::Svg => "image/svg+xml",
        }
    }
}

/// What a report is about.
#[derive(Debug, Clone, Copy)]
pub enum ReportSubject<'a> {
    Assessment(&'a Assessment),
    Integrated {
        integrated: &'a IntegratedAssessment,
        catalog: &'a Catalog,
    },
}

pub fn radial_chart(assessment: &Assessment, include_final: bool) -> Result<String, ReportError> {
    Ok(RadialChartSpec::from_assessment(assessment, include_final)?.to_svg())
}

pub fn render_document(doc: &ReportDocument, format: ReportFormat) -> Result<String, ReportError> {
    match format {
        ReportFormat::Markdown => Ok(markdown::render(doc)),
        ReportFormat::Json => Ok(to_canonical_string(doc).expect("report documents serialize")),
        ReportFormat::Svg => Err(ReportError::UnsupportedFormat),
    }
}

pub fn build_document(subject: ReportSubject<'_>) -> Result<ReportDocument, ReportError> {
    match subject {
        ReportSubject::Assessment(a) => ReportDocument::for_assessment(a),
        ReportSubject::Integrated { integrated, catalog } => Ok(ReportDocument::for_integrated(integrated, catalog)),
    }
}

/// Renders a report as markdown, json, or (for single assessments) the
/// before/after radial chart.
pub fn render_report(subject: ReportSubject<'_>, format: ReportFormat) -> Result<String, ReportError> {
    if format == ReportFormat::Svg {
        return match subject {
            ReportSubject::Assessment(a) => radial_chart(a, true),
            ReportSubject::Integrated { .. } => Err(ReportError::UnsupportedFormat),
        };
    }
    render_document(&build_document(subject)?, format)
}
