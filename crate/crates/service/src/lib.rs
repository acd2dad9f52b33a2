//! HTTP front end over the metasheet engine: template registry, artifact
//! generation, validation, suggestions and repair.
//!
//! | Method | Path | Result |
//! |---|---|---|
//! | POST | `/templates` | register a template document |
//! | GET | `/templates` | list registered templates |
//! | GET | `/templates/{id}/{version}` | the template document |
//! | GET | `/templates/{id}/{version}/workbook` | generated XLSX |
//! | GET | `/templates/{id}/{version}/skeleton.tsv` | header-only TSV |
//! | GET | `/templates/{id}/{version}/spec.md` | Markdown field reference |
//! | POST | `/validate` | validation report for an uploaded file |
//! | POST | `/suggest` | ranked suggestions for issues |
//! | POST | `/repair` | patched file plus a fresh report |
//! | GET | `/health` | liveness and template count |

mod error;
mod handlers;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::DefaultBodyLimit;
use axum::http::{HeaderValue, Method};
use axum::routing::{get, post};
use axum::Router;
use metasheet_core::{
    RegistryError, SemanticRanker, TemplateRegistry, TermClient, TerminologySource, TokenOverlapRanker,
};
use thiserror::Error;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

pub use error::ApiError;
pub use handlers::{RepairRequest, RepairResponse, SuggestRequest, IssueRef};

/// Default request body limit: 20 MB.
pub const DEFAULT_PAYLOAD_LIMIT: usize = 20 * 1024 * 1024;

/// Shared, read-mostly state handed to every request.
#[derive(Clone)]
pub struct AppState {
    pub registry: Arc<TemplateRegistry>,
    pub terms: Arc<TermClient>,
    pub ranker: Arc<dyn SemanticRanker>,
}

impl AppState {
    pub fn new(registry: Arc<TemplateRegistry>, terms: Arc<TermClient>) -> Self {
        Self {
            registry,
            terms,
            ranker: Arc::new(TokenOverlapRanker),
        }
    }

    pub fn with_ranker(mut self, ranker: Arc<dyn SemanticRanker>) -> Self {
        self.ranker = ranker;
        self
    }
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub listen: SocketAddr,
    /// Registry directory; `None` keeps templates in memory.
    pub registry_root: Option<PathBuf>,
    pub terms: TerminologySource,
    pub payload_limit: usize,
    /// Allowed CORS origins; empty allows any origin.
    pub cors_origins: Vec<String>,
    /// Register the bundled fixture templates at startup.
    pub seed_fixtures: bool,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            listen: SocketAddr::from(([127, 0, 0, 1], 8080)),
            registry_root: None,
            terms: TerminologySource::fixture(metasheet_core::fixtures::value_set_dir()),
            payload_limit: DEFAULT_PAYLOAD_LIMIT,
            cors_origins: Vec::new(),
            seed_fixtures: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error("invalid CORS origin '{0}'")]
    Origin(String),
    #[error("server error: {0}")]
    Io(#[from] std::io::Error),
}

/// The full route table with CORS and the body limit applied.
pub fn router(state: AppState, payload_limit: usize, cors_origins: &[String]) -> Result<Router, ServiceError> {
    let origins = if cors_origins.is_empty() {
        AllowOrigin::from(Any)
    } else {
        let parsed = cors_origins
            .iter()
            .map(|o| HeaderValue::from_str(o).map_err(|_| ServiceError::Origin(o.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        AllowOrigin::list(parsed)
    };
    let cors = CorsLayer::new()
        .allow_origin(origins)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers(Any);

    Ok(Router::new()
        .route("/health", get(handlers::health))
        .route("/templates", get(handlers::list_templates).post(handlers::register_template))
        .route("/templates/{id}/{version}", get(handlers::get_template))
        .route("/templates/{id}/{version}/workbook", get(handlers::get_workbook))
        .route("/templates/{id}/{version}/skeleton.tsv", get(handlers::get_skeleton))
        .route("/templates/{id}/{version}/spec.md", get(handlers::get_spec_doc))
        .route("/validate", post(handlers::validate))
        .route("/suggest", post(handlers::suggest))
        .route("/repair", post(handlers::repair))
        .layer(DefaultBodyLimit::max(payload_limit))
        .layer(cors)
        .with_state(state))
}

/// Builds state from `config`.
pub fn build_state(config: &ServiceConfig) -> Result<AppState, ServiceError> {
    let registry = match &config.registry_root {
        Some(root) => TemplateRegistry::open(root)?,
        None => TemplateRegistry::in_memory(),
    };
    if config.seed_fixtures {
        for template in metasheet_core::fixtures::templates() {
            registry.register(template)?;
        }
    }
    Ok(AppState::new(Arc::new(registry), Arc::new(TermClient::new(&config.terms))))
}

/// Binds and serves until the process is stopped.
pub async fn serve(config: ServiceConfig) -> Result<(), ServiceError> {
    let state = build_state(&config)?;
    let templates = state.registry.len();
    let app = router(state, config.payload_limit, &config.cors_origins)?;
    let listener = tokio::net::TcpListener::bind(config.listen).await?;
    tracing::info!(
        addr = %listener.local_addr()?,
        templates,
        terms = %config.terms,
        "metasheet service listening"
    );
    axum::serve(listener, app).await?;
    Ok(())
}
