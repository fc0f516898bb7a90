use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use chrono::{DateTime, Utc};
use hria_core::assessment::{ExcludingFactor, MitigationMeasure, NewRisk, Residual, Round, ScopingRecord};
use hria_core::canonical::to_canonical_string;
use hria_core::reporting::{radial_chart, render_report, ReportFormat, ReportSubject};
use hria_core::workflow::{integrate, shared_catalog, Stage, DEFAULT_ESCALATION_THRESHOLD};
use hria_core::{Assessment, AssessmentMetadata, EscalationWarning, Level, RightEntry, RiskRatings};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::ApiError;
use crate::store::Store;

type AppState = State<Arc<Store>>;
type ApiResult = Result<Response, ApiError>;

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "invalid_body", e.to_string()))
}

/// Accepts `3`, `"3"` and `W/"3"`.
fn if_match(headers: &HeaderMap) -> Result<Option<u64>, ApiError> {
    let Some(raw) = headers.get(header::IF_MATCH) else {
        return Ok(None);
    };
    let text = raw.to_str().map_err(|_| ApiError::bad_request("If-Match is not valid text"))?;
    let trimmed = text.trim().trim_start_matches("W/").trim_matches('"');
    trimmed
        .parse()
        .map(Some)
        .map_err(|_| ApiError::bad_request(format!("If-Match must be a revision number, got {text:?}")))
}

fn etag(revision: u64) -> HeaderValue {
    HeaderValue::from_str(&format!("\"{revision}\"")).expect("digits are a valid header")
}

fn respond(status: StatusCode, content_type: &'static str, body: String, revision: Option<u64>) -> Response {
    let mut res = (status, [(header::CONTENT_TYPE, content_type)], body).into_response();
    if let Some(rev) = revision {
        res.headers_mut().insert(header::ETAG, etag(rev));
    }
    res
}

fn json<T: Serialize>(status: StatusCode, value: &T, revision: Option<u64>) -> Response {
    let body = to_canonical_string(value).expect("responses serialize");
    respond(status, "application/json", body, revision)
}

/// Body of every successful mutation: the revision it produced and the
/// resulting assessment.
#[derive(Serialize)]
struct Mutation<'a> {
    revision: u64,
    assessment: &'a Assessment,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<EscalationWarning>,
}

fn mutated(status: StatusCode, a: &Assessment, warning: Option<EscalationWarning>) -> Response {
    json(
        status,
        &Mutation {
            revision: a.revision(),
            assessment: a,
            warning,
        },
        Some(a.revision()),
    )
}

pub async fn list(State(store): AppState) -> ApiResult {
    Ok(json(StatusCode::OK, &store.list()?, None))
}

pub async fn create(State(store): AppState, body: Bytes) -> ApiResult {
    let meta: AssessmentMetadata = parse_body(&body)?;
    let a = store.create(meta).await?;
    Ok(mutated(StatusCode::CREATED, &a, None))
}

pub async fn get(State(store): AppState, Path(id): Path<String>) -> ApiResult {
    let a = store.load(&id)?;
    Ok(json(StatusCode::OK, &a, Some(a.revision())))
}

pub async fn put_scoping(State(store): AppState, Path(id): Path<String>, headers: HeaderMap, body: Bytes) -> ApiResult {
    let scoping: ScopingRecord = parse_body(&body)?;
    let (a, _) = store.mutate(&id, if_match(&headers)?, |a| a.set_scoping(scoping)).await?;
    Ok(mutated(StatusCode::OK, &a, None))
}

pub async fn add_risk(State(store): AppState, Path(id): Path<String>, headers: HeaderMap, body: Bytes) -> ApiResult {
    let risk: NewRisk = parse_body(&body)?;
    let catalog = store.catalog().clone();
    let (a, _) = store
        .mutate(&id, if_match(&headers)?, |a| a.add_risk_from(risk, &catalog))
        .await?;
    Ok(mutated(StatusCode::CREATED, &a, None))
}

pub async fn rate_risk(
    State(store): AppState,
    Path((id, rid)): Path<(String, String)>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let ratings: RiskRatings = parse_body(&body)?;
    let (a, _) = store.mutate(&id, if_match(&headers)?, |a| a.rate_risk(&rid, ratings)).await?;
    Ok(mutated(StatusCode::OK, &a, None))
}

#[derive(Deserialize)]
struct RoundRequest {
    /// Defaults to the next index for the risk.
    index: Option<u32>,
    #[serde(default)]
    excluding_factors: Vec<ExcludingFactor>,
    #[serde(default)]
    mitigation_measures: Vec<MitigationMeasure>,
    residual: Residual,
    #[serde(default)]
    rationale: String,
    created_at: Option<DateTime<Utc>>,
}

pub async fn add_round(
    State(store): AppState,
    Path((id, rid)): Path<(String, String)>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let req: RoundRequest = parse_body(&body)?;
    let (a, warning) = store
        .mutate(&id, if_match(&headers)?, |a| {
            let next = a.risk(&rid).map_or(1, |r| r.rounds().len() as u32 + 1);
            let round = Round {
                index: req.index.unwrap_or(next),
                excluding_factors: req.excluding_factors,
                mitigation_measures: req.mitigation_measures,
                residual: req.residual,
                rationale: req.rationale,
                created_at: req.created_at.unwrap_or_else(Utc::now),
            };
            a.apply_round(&rid, round)
        })
        .await?;
    Ok(mutated(StatusCode::OK, &a, warning))
}

#[derive(Deserialize)]
struct FlagRequest {
    rationale: String,
    #[serde(default)]
    recommended_measures: Vec<String>,
}

pub async fn flag(
    State(store): AppState,
    Path((id, rid)): Path<(String, String)>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let req: FlagRequest = parse_body(&body)?;
    let (a, _) = store
        .mutate(&id, if_match(&headers)?, |a| {
            a.flag_precautionary(&rid, &req.rationale, req.recommended_measures)
        })
        .await?;
    Ok(mutated(StatusCode::OK, &a, None))
}

#[derive(Deserialize)]
struct ResolveRequest {
    rationale: String,
    ratings: Option<RiskRatings>,
}

pub async fn accept(
    State(store): AppState,
    Path((id, rid)): Path<(String, String)>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let req: ResolveRequest = parse_body(&body)?;
    let (a, _) = store
        .mutate(&id, if_match(&headers)?, |a| a.accept_precautionary(&rid, &req.rationale))
        .await?;
    Ok(mutated(StatusCode::OK, &a, None))
}

pub async fn resolve(
    State(store): AppState,
    Path((id, rid)): Path<(String, String)>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let req: ResolveRequest = parse_body(&body)?;
    let (a, _) = store
        .mutate(&id, if_match(&headers)?, |a| {
            a.resolve_precautionary(&rid, &req.rationale, req.ratings)
        })
        .await?;
    Ok(mutated(StatusCode::OK, &a, None))
}

#[derive(Deserialize)]
struct StageRequest {
    to: Stage,
    override_rationale: Option<String>,
}

pub async fn advance(State(store): AppState, Path(id): Path<String>, headers: HeaderMap, body: Bytes) -> ApiResult {
    let req: StageRequest = parse_body(&body)?;
    let (a, _) = store
        .mutate(&id, if_match(&headers)?, |a| {
            a.advance(req.to, req.override_rationale.as_deref(), Utc::now())
        })
        .await?;
    Ok(mutated(StatusCode::OK, &a, None))
}

fn parse_stage(s: &str) -> Result<Stage, ApiError> {
    Stage::from_str(s).map_err(|e| ApiError::not_found(e.to_string()))
}

#[derive(Deserialize)]
struct TaskRequest {
    done: bool,
}

pub async fn set_task(
    State(store): AppState,
    Path((id, stage, item)): Path<(String, String, usize)>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let stage = parse_stage(&stage)?;
    let req: TaskRequest = parse_body(&body)?;
    let (a, _) = store
        .mutate(&id, if_match(&headers)?, |a| a.set_task(stage, item, req.done))
        .await?;
    Ok(mutated(StatusCode::OK, &a, None))
}

pub async fn complete_tasks(
    State(store): AppState,
    Path((id, stage)): Path<(String, String)>,
    headers: HeaderMap,
) -> ApiResult {
    let stage = parse_stage(&stage)?;
    let (a, _) = store
        .mutate(&id, if_match(&headers)?, |a| a.complete_stage_tasks(stage))
        .await?;
    Ok(mutated(StatusCode::OK, &a, None))
}

pub async fn register_right(State(store): AppState, Path(id): Path<String>, headers: HeaderMap, body: Bytes) -> ApiResult {
    let entry: RightEntry = parse_body(&body)?;
    let (a, _) = store.mutate(&id, if_match(&headers)?, |a| a.register_right(entry)).await?;
    Ok(mutated(StatusCode::CREATED, &a, None))
}

#[derive(Deserialize)]
struct NoteRequest {
    note: String,
}

pub async fn add_note(State(store): AppState, Path(id): Path<String>, headers: HeaderMap, body: Bytes) -> ApiResult {
    let req: NoteRequest = parse_body(&body)?;
    let (a, _) = store.mutate(&id, if_match(&headers)?, |a| a.add_note(req.note)).await?;
    Ok(mutated(StatusCode::CREATED, &a, None))
}

#[derive(Deserialize)]
pub struct ReportQuery {
    format: Option<String>,
}

pub async fn report(State(store): AppState, Path(id): Path<String>, Query(q): Query<ReportQuery>) -> ApiResult {
    let format = match q.format.as_deref() {
        None => ReportFormat::Json,
        Some(f) => ReportFormat::from_str(f)?,
    };
    let a = store.load(&id)?;
    let body = render_report(ReportSubject::Assessment(&a), format)?;
    Ok(respond(StatusCode::OK, format.content_type(), body, Some(a.revision())))
}

#[derive(Deserialize)]
pub struct ChartQuery {
    #[serde(rename = "final")]
    include_final: Option<bool>,
}

pub async fn chart(State(store): AppState, Path(id): Path<String>, Query(q): Query<ChartQuery>) -> ApiResult {
    let a = store.load(&id)?;
    let svg = radial_chart(&a, q.include_final.unwrap_or(true))?;
    Ok(respond(StatusCode::OK, "image/svg+xml", svg, Some(a.revision())))
}

#[derive(Serialize)]
struct WhatIf {
    l_score: u8,
    likelihood: Level,
    s_score: u8,
    severity: Level,
    overall: Level,
}

pub async fn whatif(Query(q): Query<BTreeMap<String, String>>) -> ApiResult {
    let level = |name: &'static str| -> Result<Level, ApiError> {
        let raw = q
            .get(name)
            .ok_or_else(|| ApiError::bad_request(format!("missing query parameter {name}")).with_path(name))?;
        Level::from_str(raw).map_err(|e| ApiError::bad_request(e.to_string()).with_path(name))
    };
    let ratings = RiskRatings::new(level("probability")?, level("exposure")?, level("gravity")?, level("effort")?);
    let e = ratings.evaluate();
    Ok(json(
        StatusCode::OK,
        &WhatIf {
            l_score: e.likelihood.score,
            likelihood: e.likelihood.level,
            s_score: e.severity.score,
            severity: e.severity.level,
            overall: e.overall,
        },
        None,
    ))
}

fn default_threshold() -> Option<u32> {
    Some(DEFAULT_ESCALATION_THRESHOLD)
}

#[derive(Deserialize)]
struct IntegrateRequest {
    components: Vec<String>,
    /// Absent: the default threshold. `null`: no escalation.
    #[serde(default = "default_threshold")]
    escalation_threshold: Option<u32>,
    format: Option<String>,
}

pub async fn integrate_components(State(store): AppState, body: Bytes) -> ApiResult {
    let req: IntegrateRequest = parse_body(&body)?;
    let components = req
        .components
        .iter()
        .map(|id| store.load(id))
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&Assessment> = components.iter().collect();
    let catalog = shared_catalog(store.catalog(), &refs)?;
    let integrated = integrate(&refs, &catalog, req.escalation_threshold)?;
    match req.format.as_deref() {
        None => Ok(json(StatusCode::OK, &integrated, None)),
        Some(f) => {
            let format = ReportFormat::from_str(f)?;
            let body = render_report(
                ReportSubject::Integrated {
                    integrated: &integrated,
                    catalog: &catalog,
                },
                format,
            )?;
            Ok(respond(StatusCode::OK, format.content_type(), body, None))
        }
    }
}

pub async fn catalog(State(store): AppState) -> ApiResult {
    Ok(json(StatusCode::OK, &store.catalog().entries(), None))
}
