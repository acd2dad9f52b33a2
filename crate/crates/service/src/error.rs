use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use metasheet_core::{IngestError, LinkError, PatchError, ResolveError, TemplateError};
use serde_json::{json, Map, Value};

/// A JSON error body `{"error": code, "message": text, ...}` with a status.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub extra: Map<String, Value>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
            extra: Map::new(),
        }
    }

    pub fn with(mut self, key: &str, value: Value) -> Self {
        self.extra.insert(key.to_string(), value);
        self
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = Map::new();
        body.insert("error".into(), Value::from(self.code));
        body.insert("message".into(), Value::from(self.message));
        body.extend(self.extra);
        (self.status, Json(Value::Object(body))).into_response()
    }
}

impl From<TemplateError> for ApiError {
    fn from(e: TemplateError) -> Self {
        let base = ApiError::new(StatusCode::BAD_REQUEST, "invalid_template", e.to_string());
        match &e {
            TemplateError::Syntax { line, column, .. } => {
                base.with("line", json!(line)).with("column", json!(column))
            }
            TemplateError::Semantic(s) => base.with("field", json!(s.field())),
        }
    }
}

impl From<IngestError> for ApiError {
    fn from(e: IngestError) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "unparseable_file", e.to_string())
    }
}

impl From<ResolveError> for ApiError {
    fn from(e: ResolveError) -> Self {
        if e.is_transport() {
            ApiError::new(StatusCode::BAD_GATEWAY, "terminology_unavailable", e.to_string())
        } else {
            ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "unresolvable_template", e.to_string())
        }
    }
}

impl From<LinkError> for ApiError {
    fn from(e: LinkError) -> Self {
        match e {
            LinkError::Resolve(inner) => inner.into(),
            other => {
                let code = match other {
                    LinkError::Ambiguous { .. } => "ambiguous_template",
                    LinkError::Unregistered(_) => "unregistered_template",
                    _ => "no_template_found",
                };
                let candidates: Vec<String> = other.candidates().iter().map(ToString::to_string).collect();
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, code, other.to_string())
                    .with("candidates", json!(candidates))
            }
        }
    }
}

impl From<PatchError> for ApiError {
    fn from(e: PatchError) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_patch", e.to_string())
    }
}
