//! Human rights impact assessment engine: ordinal risk scoring, assessment
//! documents with mitigation rounds, a staged workflow, multi-component
//! integration, deterministic reports and versioned file storage.

pub mod assessment;
pub mod canonical;
pub mod catalog;
pub mod fixtures;
pub mod persistence;
pub mod reporting;
pub mod scoring;
pub mod workflow;

pub use assessment::{
    Assessment, AssessmentError, AssessmentMetadata, EscalationWarning, ExcludingFactor, InvariantViolation,
    MitigationMeasure, NewRisk, Residual, RiskEntry, RiskReport, Round, ScopingRecord,
};
pub use catalog::{Catalog, CatalogError, RightEntry};
pub use persistence::{Document, DocumentKind, FileEnvelope, PersistenceError};
pub use reporting::{ReportError, ReportFormat, ReportSubject};
pub use scoring::{Dimension, Evaluation, ImpactBand, Level, RiskRatings, ScoringError};
pub use workflow::{IntegratedAssessment, IntegrationError, PrecautionaryFlag, Stage};
