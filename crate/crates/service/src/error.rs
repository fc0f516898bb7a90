use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use hria_core::persistence::PersistenceError;
use hria_core::reporting::ReportError;
use hria_core::workflow::IntegrationError;
use hria_core::{AssessmentError, ScoringError};
use serde::Serialize;

/// JSON error body. `path` mirrors the field path of the offending value
/// where one is known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorBody {
    pub error: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub current_revision: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, error: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                error,
                message: message.into(),
                path: None,
                current_revision: None,
            },
        }
    }

    pub fn with_path(mut self, path: impl Into<String>) -> Self {
        self.body.path = Some(path.into());
        self
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn not_found(what: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", what)
    }

    pub fn conflict(expected: u64, current: u64) -> Self {
        let mut e = Self::new(
            StatusCode::CONFLICT,
            "revision_conflict",
            format!("If-Match revision {expected} does not match current revision {current}"),
        );
        e.body.current_revision = Some(current);
        e
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::to_string(&self.body).expect("error bodies serialize");
        (self.status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
    }
}

impl From<AssessmentError> for ApiError {
    fn from(e: AssessmentError) -> Self {
        use AssessmentError::*;
        let message = e.to_string();
        let (status, kind, path): (StatusCode, &'static str, Option<String>) = match &e {
            UnknownRisk(_) => (StatusCode::NOT_FOUND, "unknown_risk", None),
            UnknownRight(_) => (StatusCode::BAD_REQUEST, "unknown_right", Some("right_key".into())),
            DuplicateRiskId(_) | InvalidRiskId(_) => (StatusCode::BAD_REQUEST, "invalid_risk", Some("id".into())),
            NonMonotoneIndex { .. } => (StatusCode::BAD_REQUEST, "non_monotone_index", Some("index".into())),
            InvalidRound { .. } => (StatusCode::BAD_REQUEST, "invalid_round", None),
            IllegalTransition { .. } => (StatusCode::BAD_REQUEST, "illegal_transition", Some("to".into())),
            ChecklistIncomplete { .. } => (StatusCode::BAD_REQUEST, "checklist_incomplete", None),
            PrecautionaryUnresolved { .. } => (StatusCode::BAD_REQUEST, "precautionary_unresolved", None),
            ScopingIncomplete(_) => (StatusCode::BAD_REQUEST, "scoping_incomplete", Some("scoping.product_description".into())),
            InvalidScoping { path } => (StatusCode::BAD_REQUEST, "invalid_scoping", Some(path.clone())),
            EmptyField(field) => (StatusCode::BAD_REQUEST, "empty_field", Some(field.to_string())),
            Finalized => (StatusCode::BAD_REQUEST, "finalized", None),
            _ => (StatusCode::BAD_REQUEST, "invalid", None),
        };
        let mut err = ApiError::new(status, kind, message);
        err.body.path = path;
        err
    }
}

impl From<PersistenceError> for ApiError {
    fn from(e: PersistenceError) -> Self {
        match e {
            PersistenceError::InvariantViolation(v) => {
                ApiError::new(StatusCode::BAD_REQUEST, "invariant_violation", v.message).with_path(v.path)
            }
            PersistenceError::Io { .. } => ApiError::internal(e.to_string()),
            other => ApiError::new(StatusCode::BAD_REQUEST, "invalid_file", other.to_string()),
        }
    }
}

impl From<ReportError> for ApiError {
    fn from(e: ReportError) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "report_unavailable", e.to_string())
    }
}

impl From<IntegrationError> for ApiError {
    fn from(e: IntegrationError) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "integration_failed", e.to_string())
    }
}

impl From<ScoringError> for ApiError {
    fn from(e: ScoringError) -> Self {
        ApiError::bad_request(e.to_string())
    }
}
