//! JSON-over-HTTP surface used by the trainer UI.

use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use praise_core::annotation::{load_corpus, AnnotatedResponse, TypedSpan};
use praise_core::feedback::{
    compose_feedback, render_highlight_markup, FeedbackMessage, FeedbackTemplates, HighlightMarkup,
};
use praise_core::llm::{extract_praise, ChatError, ChatProvider, ExtractionError, LlmError};
use praise_core::metrics::MiouConfig;
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;

use crate::evaluation::{evaluate_corpus, EvaluationReport};

pub const MAX_RESPONSE_CHARS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Live,
    #[default]
    Replay,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HighlightRequest {
    pub response_text: String,
    pub mode: Mode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HighlightResponse {
    pub markup: HighlightMarkup,
    pub feedback: FeedbackMessage,
    pub spans: Vec<TypedSpan>,
    pub model_id: String,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
pub struct EvaluateQuery {
    #[serde(default)]
    pub mode: Mode,
}

/// Shared, read-only service configuration.
#[derive(Clone)]
pub struct AppState {
    replay: Arc<dyn ChatProvider>,
    live: Option<Arc<dyn ChatProvider>>,
    templates: Arc<FeedbackTemplates>,
    miou: MiouConfig,
}

impl AppState {
    pub fn new(
        replay: Arc<dyn ChatProvider>,
        live: Option<Arc<dyn ChatProvider>>,
        templates: FeedbackTemplates,
        miou: MiouConfig,
    ) -> Self {
        AppState {
            replay,
            live,
            templates: Arc::new(templates),
            miou,
        }
    }

    fn provider(&self, mode: Mode) -> Result<&dyn ChatProvider, ApiError> {
        match mode {
            Mode::Replay => Ok(self.replay.as_ref()),
            Mode::Live => self.live.as_deref().ok_or_else(|| ApiError {
                status: StatusCode::BAD_GATEWAY,
                message: "live mode is not configured on this server".into(),
                retry_after: None,
            }),
        }
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    retry_after: Option<u64>,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
            retry_after: None,
        }
    }
}

impl From<ChatError> for ApiError {
    fn from(e: ChatError) -> Self {
        ApiError {
            status: StatusCode::BAD_GATEWAY,
            retry_after: e.retry_after().map(|d| d.as_secs().max(1)),
            message: e.to_string(),
        }
    }
}

impl From<ExtractionError> for ApiError {
    fn from(e: ExtractionError) -> Self {
        match e {
            ExtractionError::Chat(c) => c.into(),
            ExtractionError::Prompt(p) => ApiError::bad_request(p.to_string()),
            unparseable @ ExtractionError::Unparseable(_) => ApiError {
                status: StatusCode::UNPROCESSABLE_ENTITY,
                message: unparseable.to_string(),
                retry_after: None,
            },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = Json(serde_json::json!({ "error": self.message }));
        match self.retry_after {
            Some(secs) => {
                (self.status, [(header::RETRY_AFTER, secs.to_string())], body).into_response()
            }
            None => (self.status, body).into_response(),
        }
    }
}

fn validate(request: &HighlightRequest) -> Result<(), ApiError> {
    if request.response_text.trim().is_empty() {
        return Err(ApiError::bad_request(LlmError::EmptyResponse.to_string()));
    }
    let chars = request.response_text.chars().count();
    if chars > MAX_RESPONSE_CHARS {
        return Err(ApiError::bad_request(format!(
            "response text has {chars} characters; the limit is {MAX_RESPONSE_CHARS}"
        )));
    }
    Ok(())
}

pub async fn handle_highlight(
    state: &AppState,
    request: HighlightRequest,
) -> Result<HighlightResponse, ApiError> {
    validate(&request)?;
    let provider = state.provider(request.mode)?;
    let response = AnnotatedResponse::new("request", &request.response_text, [])
        .map_err(|e| ApiError::bad_request(e.to_string()))?;
    let extracted = extract_praise(provider, &response).await?;
    let spans = extracted.alignment.spans;
    Ok(HighlightResponse {
        markup: render_highlight_markup(response.tokens(), &spans),
        feedback: compose_feedback(&spans, &response, &state.templates),
        spans,
        model_id: provider.model_id().to_string(),
    })
}

async fn highlight(
    State(state): State<AppState>,
    Json(request): Json<HighlightRequest>,
) -> Result<Json<HighlightResponse>, ApiError> {
    handle_highlight(&state, request).await.map(Json)
}

/// Takes a line-delimited corpus as the request body.
async fn evaluate(
    State(state): State<AppState>,
    Query(query): Query<EvaluateQuery>,
    body: String,
) -> Result<Json<EvaluationReport>, ApiError> {
    let corpus = load_corpus(body.as_bytes()).map_err(|e| ApiError::bad_request(e.to_string()))?;
    if corpus.is_empty() {
        return Err(ApiError::bad_request("corpus is empty"));
    }
    let provider = state.provider(query.mode)?;
    let report = evaluate_corpus(provider, &corpus, state.miou, corpus.len(), 0, 4).await;
    Ok(Json(report))
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

pub fn router(state: AppState, cors_origin: Option<HeaderValue>) -> Router {
    let mut app = Router::new()
        .route("/highlight", post(highlight))
        .route("/evaluate", post(evaluate))
        .route("/health", get(health))
        .with_state(state);
    if let Some(origin) = cors_origin {
        app = app.layer(
            CorsLayer::new()
                .allow_origin(origin)
                .allow_methods([Method::GET, Method::POST])
                .allow_headers([header::CONTENT_TYPE]),
        );
    }
    app
}
