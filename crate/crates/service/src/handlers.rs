use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{FromRequest, Multipart, Path, Query, Request, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use metasheet_core::workbook::XLSX_MEDIA_TYPE;
use metasheet_core::{
    apply_patches, generate_delimited_skeleton, generate_workbook, ingest, lint_template, link_template,
    parse_table, parse_template, render_spec_doc, render_template, resolve_template, serialize_delimited,
    suggest_for_issue, validate_table, write_workbook, Issue, IssueKind, Patch, RegisterOutcome, RegistryError,
    ResolvedTemplate, Separator, Suggestion, Table, Template, TemplateSelector, ValidationReport, Version,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::{ApiError, AppState};

type ApiResult<T> = Result<T, ApiError>;

/// Runs engine work off the async executor.
async fn blocking<T, F>(f: F) -> ApiResult<T>
where
    F: FnOnce() -> ApiResult<T> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
}

fn parse_selector(s: &str) -> ApiResult<TemplateSelector> {
    s.parse()
        .map_err(|e: ingest::SelectorParseError| ApiError::bad_request(e.to_string()))
}

fn parse_separator(s: Option<&str>) -> ApiResult<Option<Separator>> {
    s.map(|s| s.parse::<Separator>().map_err(ApiError::bad_request))
        .transpose()
}

fn lookup(state: &AppState, id: &str, version: &str) -> ApiResult<Arc<Template>> {
    let unknown = || ApiError::not_found(format!("template {id}@{version} is not registered"));
    let version: Version = version.parse().map_err(|_| unknown())?;
    state.registry.get(id, &version).ok_or_else(unknown)
}

async fn resolve(state: &AppState, template: Arc<Template>) -> ApiResult<ResolvedTemplate> {
    let terms = state.terms.clone();
    blocking(move || Ok(resolve_template(&template, terms.as_ref())?)).await
}

pub async fn health(State(state): State<AppState>) -> Json<serde_json::Value> {
    Json(json!({"status": "ok", "templates_loaded": state.registry.len()}))
}

pub async fn list_templates(State(state): State<AppState>) -> Response {
    Json(state.registry.list()).into_response()
}

pub async fn register_template(State(state): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let template = parse_template(&body)?;
    let warnings = lint_template(&template);
    let (id, version) = (template.id.clone(), template.version);
    let registry = state.registry.clone();
    let outcome = blocking(move || {
        registry.register(template).map_err(|e| match e {
            RegistryError::Conflict { .. } => ApiError::new(StatusCode::CONFLICT, "conflict", e.to_string()),
            RegistryError::Invalid(_) => ApiError::new(StatusCode::BAD_REQUEST, "invalid_template", e.to_string()),
            other => ApiError::internal(other.to_string()),
        })
    })
    .await?;
    let status = match outcome {
        RegisterOutcome::Created => StatusCode::CREATED,
        RegisterOutcome::Unchanged => StatusCode::OK,
    };
    tracing::info!(%id, %version, ?outcome, "template registered");
    Ok((status, Json(json!({"id": id, "version": version, "warnings": warnings}))).into_response())
}

pub async fn get_template(
    State(state): State<AppState>,
    Path((id, version)): Path<(String, String)>,
) -> ApiResult<Response> {
    let template = lookup(&state, &id, &version)?;
    Ok(([(header::CONTENT_TYPE, "application/json")], render_template(&template)).into_response())
}

pub async fn get_workbook(
    State(state): State<AppState>,
    Path((id, version)): Path<(String, String)>,
) -> ApiResult<Response> {
    let rt = resolve(&state, lookup(&state, &id, &version)?).await?;
    let generated = blocking(move || {
        generate_workbook(&rt).map_err(|e| ApiError::internal(e.to_string()))
    })
    .await?;
    let disposition = format!("attachment; filename=\"{id}-{version}.xlsx\"");
    Ok((
        [
            (header::CONTENT_TYPE, XLSX_MEDIA_TYPE.to_string()),
            (header::CONTENT_DISPOSITION, disposition),
        ],
        generated.bytes,
    )
        .into_response())
}

pub async fn get_skeleton(
    State(state): State<AppState>,
    Path((id, version)): Path<(String, String)>,
) -> ApiResult<Response> {
    let rt = resolve(&state, lookup(&state, &id, &version)?).await?;
    Ok((
        [(header::CONTENT_TYPE, "text/tab-separated-values; charset=utf-8")],
        generate_delimited_skeleton(&rt),
    )
        .into_response())
}

pub async fn get_spec_doc(
    State(state): State<AppState>,
    Path((id, version)): Path<(String, String)>,
) -> ApiResult<Response> {
    let rt = resolve(&state, lookup(&state, &id, &version)?).await?;
    Ok(([(header::CONTENT_TYPE, "text/markdown; charset=utf-8")], render_spec_doc(&rt)).into_response())
}

#[derive(Debug, Default, Deserialize)]
pub struct ValidateQuery {
    template: Option<String>,
    separator: Option<String>,
    filename: Option<String>,
}

/// The uploaded file: the `file` part of a multipart form (or its first
/// part), else the raw request body.
async fn read_upload(state: &AppState, request: Request) -> ApiResult<(Bytes, Option<String>)> {
    let is_multipart = request
        .headers()
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("multipart/form-data"));
    if !is_multipart {
        let body = Bytes::from_request(request, state)
            .await
            .map_err(|e| ApiError::new(e.status(), "bad_body", e.body_text()))?;
        return Ok((body, None));
    }
    let mut multipart = Multipart::from_request(request, state)
        .await
        .map_err(|e| ApiError::new(e.status(), "bad_multipart", e.body_text()))?;
    let mut upload = None;
    while let Some(field) = multipart
        .next_field()
        .await
        .map_err(|e| ApiError::new(e.status(), "bad_multipart", e.body_text()))?
    {
        let is_file = field.name() == Some("file");
        if upload.is_some() && !is_file {
            continue;
        }
        let name = field.file_name().map(str::to_string);
        let bytes = field
            .bytes()
            .await
            .map_err(|e| ApiError::new(e.status(), "bad_multipart", e.body_text()))?;
        upload = Some((bytes, name));
        if is_file {
            break;
        }
    }
    upload.ok_or_else(|| ApiError::bad_request("multipart body has no file part"))
}

fn parse_and_link(
    state: &AppState,
    bytes: &[u8],
    file_name: Option<&str>,
    separator: Option<Separator>,
    selector: Option<&TemplateSelector>,
) -> ApiResult<(Table, ResolvedTemplate)> {
    let table = parse_table(bytes, file_name, separator)?;
    let rt = link_template(&table, &state.registry, selector, state.terms.as_ref())?;
    Ok((table, rt))
}

pub async fn validate(
    State(state): State<AppState>,
    Query(query): Query<ValidateQuery>,
    request: Request,
) -> ApiResult<Json<ValidationReport>> {
    let selector = query.template.as_deref().map(parse_selector).transpose()?;
    let separator = parse_separator(query.separator.as_deref())?;
    let (bytes, part_name) = read_upload(&state, request).await?;
    let file_name = query.filename.or(part_name);
    let report = blocking(move || {
        let (table, rt) = parse_and_link(&state, &bytes, file_name.as_deref(), separator, selector.as_ref())?;
        Ok(validate_table(&rt, &table))
    })
    .await?;
    tracing::debug!(
        template = %report.template.id,
        issues = report.issues.len(),
        "validated upload"
    );
    Ok(Json(report))
}

/// An issue as the client saw it in a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IssueRef {
    pub row: usize,
    pub column: String,
    pub kind: IssueKind,
    #[serde(default)]
    pub observed: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuggestRequest {
    /// `id@version` of the template the issues were reported against.
    pub template: String,
    pub issues: Vec<IssueRef>,
}

pub async fn suggest(State(state): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let request: SuggestRequest = serde_json::from_slice(&body)
        .map_err(|e| ApiError::bad_request(format!("malformed suggest request: {e}")))?;
    let selector = parse_selector(&request.template)?;
    let template = lookup(&state, &selector.id, &selector.version.to_string())?;
    let rt = resolve(&state, template).await?;
    let ranker = state.ranker.clone();
    let suggestions = blocking(move || {
        let mut out: BTreeMap<String, Vec<Suggestion>> = BTreeMap::new();
        for r in request.issues {
            let issue = Issue::new(r.row, &r.column, r.kind, r.observed, "");
            out.insert(
                format!("{}:{}", r.row, r.column),
                suggest_for_issue(&rt, &issue, ranker.as_ref()),
            );
        }
        Ok(out)
    })
    .await?;
    Ok(Json(json!({ "suggestions": suggestions })).into_response())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepairRequest {
    /// Base64 of the original upload.
    pub file: String,
    #[serde(default)]
    pub filename: Option<String>,
    #[serde(default)]
    pub separator: Option<String>,
    #[serde(default)]
    pub template: Option<String>,
    #[serde(default)]
    pub patches: Vec<Patch>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepairResponse {
    /// Base64 of the repaired file, in the same format as the upload.
    pub file: String,
    pub media_type: String,
    pub report: ValidationReport,
}

pub async fn repair(State(state): State<AppState>, body: Bytes) -> ApiResult<Json<RepairResponse>> {
    let request: RepairRequest = serde_json::from_slice(&body)
        .map_err(|e| ApiError::bad_request(format!("malformed repair request: {e}")))?;
    let bytes = BASE64
        .decode(request.file.as_bytes())
        .map_err(|e| ApiError::bad_request(format!("file is not valid base64: {e}")))?;
    let selector = request.template.as_deref().map(parse_selector).transpose()?;
    let separator = parse_separator(request.separator.as_deref())?;
    let response = blocking(move || {
        let (table, rt) = parse_and_link(
            &state,
            &bytes,
            request.filename.as_deref(),
            separator,
            selector.as_ref(),
        )?;
        let patched = apply_patches(&table, &request.patches)?;
        let report = validate_table(&rt, &patched);
        let (out, media_type) = if ingest::is_workbook(&bytes) {
            let out = write_workbook(&rt, &patched).map_err(|e| ApiError::internal(e.to_string()))?;
            (out, XLSX_MEDIA_TYPE.to_string())
        } else {
            let sep = separator
                .or_else(|| request.filename.as_deref().and_then(Separator::from_file_name))
                .unwrap_or(Separator::Tab);
            (serialize_delimited(&patched, sep).into_bytes(), sep.media_type().to_string())
        };
        Ok(RepairResponse {
            file: BASE64.encode(out),
            media_type,
            report,
        })
    })
    .await?;
    Ok(Json(response))
}
