//! Chat-completion providers: a live HTTP client with retries and a
//! request-rate governor.

use std::fmt;
use std::time::Duration;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;
use tokio::sync::{Mutex, Semaphore};
use tokio::time::Instant;

use super::prompt::ChatMessage;

pub const API_KEY_ENV: &str = "PRAISE_API_KEY";
pub const ENDPOINT_ENV: &str = "PRAISE_ENDPOINT";
pub const MODEL_ENV: &str = "PRAISE_MODEL";
pub const DEFAULT_ENDPOINT: &str = "https://api.openai.com/v1/chat/completions";
pub const DEFAULT_MODEL: &str = "gpt-3.5-turbo-0125";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChatError {
    #[error("request timed out after {attempts} attempt(s)")]
    Timeout { attempts: u32 },
    #[error("provider rejected the credentials (HTTP {status})")]
    AuthFailure { status: u16 },
    #[error("rate limited by provider after {attempts} attempt(s)")]
    RateLimited {
        attempts: u32,
        retry_after: Option<Duration>,
    },
    #[error("provider error: {0}")]
    Provider(String),
    #[error("no recorded reply for request digest {0}")]
    MissingFixture(String),
    #[error("invalid client configuration: {0}")]
    Config(String),
}

impl ChatError {
    /// How long a caller should wait before trying again, when known.
    pub fn retry_after(&self) -> Option<Duration> {
        match self {
            ChatError::RateLimited { retry_after, .. } => *retry_after,
            ChatError::Timeout { .. } => Some(Duration::from_secs(5)),
            _ => None,
        }
    }
}

/// Anything that can answer a chat conversation with assistant text.
#[async_trait]
pub trait ChatProvider: Send + Sync {
    fn model_id(&self) -> &str;

    async fn chat(&self, messages: &[ChatMessage]) -> Result<String, ChatError>;
}

/// API key that never shows up in logs.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct ApiKey(String);

impl ApiKey {
    pub fn new(key: impl Into<String>) -> Self {
        ApiKey(key.into())
    }

    pub fn expose(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for ApiKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ApiKey(***)")
    }
}

/// At most `requests` requests start within any `per` window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateLimit {
    pub requests: u32,
    pub per: Duration,
}

impl RateLimit {
    fn spacing(&self) -> Duration {
        self.per / self.requests.max(1)
    }
}

impl Default for RateLimit {
    fn default() -> Self {
        RateLimit {
            requests: 60,
            per: Duration::from_secs(60),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClientConfig {
    pub endpoint: String,
    pub model_id: String,
    pub api_key: ApiKey,
    pub temperature: f64,
    pub timeout: Duration,
    pub max_retries: u32,
    pub initial_backoff: Duration,
    pub max_backoff: Duration,
    pub rate_limit: RateLimit,
    pub max_in_flight: usize,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig {
            endpoint: DEFAULT_ENDPOINT.to_string(),
            model_id: DEFAULT_MODEL.to_string(),
            api_key: ApiKey::default(),
            temperature: 0.0,
            timeout: Duration::from_secs(60),
            max_retries: 3,
            initial_backoff: Duration::from_millis(500),
            max_backoff: Duration::from_secs(30),
            rate_limit: RateLimit::default(),
            max_in_flight: 4,
        }
    }
}

impl ClientConfig {
    /// Reads key, endpoint and model from the environment.
    pub fn from_env() -> Result<Self, ChatError> {
        let api_key = std::env::var(API_KEY_ENV)
            .map_err(|_| ChatError::Config(format!("{API_KEY_ENV} is not set")))?;
        let mut cfg = ClientConfig {
            api_key: ApiKey::new(api_key),
            ..ClientConfig::default()
        };
        if let Ok(endpoint) = std::env::var(ENDPOINT_ENV) {
            cfg.endpoint = endpoint;
        }
        if let Ok(model) = std::env::var(MODEL_ENV) {
            cfg.model_id = model;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ChatError> {
        if self.timeout.is_zero() {
            return Err(ChatError::Config("timeout must be positive".into()));
        }
        if self.rate_limit.requests == 0 || self.rate_limit.per.is_zero() {
            return Err(ChatError::Config(
                "rate limit must allow at least one request per non-empty interval".into(),
            ));
        }
        if self.max_in_flight == 0 {
            return Err(ChatError::Config("max_in_flight must be at least 1".into()));
        }
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(ChatError::Config("temperature must be >= 0".into()));
        }
        reqwest::Url::parse(&self.endpoint)
            .map_err(|e| ChatError::Config(format!("bad endpoint `{}`: {e}", self.endpoint)))?;
        Ok(())
    }

    fn backoff(&self, attempt: u32) -> Duration {
        let factor = 2u32.saturating_pow(attempt);
        self.initial_backoff
            .saturating_mul(factor)
            .min(self.max_backoff)
    }
}

/// Spaces request starts evenly so that a [`RateLimit`] is never exceeded.
#[derive(Debug)]
struct Pacer {
    spacing: Duration,
    next_slot: Mutex<Option<Instant>>,
}

impl Pacer {
    fn new(limit: RateLimit) -> Self {
        Pacer {
            spacing: limit.spacing(),
            next_slot: Mutex::new(None),
        }
    }

    async fn wait_turn(&self) {
        let wait_until = {
            let mut next = self.next_slot.lock().await;
            let now = Instant::now();
            let slot = next.map_or(now, |n| n.max(now));
            *next = Some(slot + self.spacing);
            slot
        };
        tokio::time::sleep_until(wait_until).await;
    }
}

enum Attempt {
    Done(String),
    Retry(ChatError, Option<Duration>),
    Fatal(ChatError),
}

/// Client for an OpenAI-style `chat/completions` endpoint.
pub struct HttpChatClient {
    config: ClientConfig,
    http: reqwest::Client,
    pacer: Pacer,
    in_flight: Semaphore,
}

impl HttpChatClient {
    pub fn new(config: ClientConfig) -> Result<Self, ChatError> {
        config.validate()?;
        let http = reqwest::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| ChatError::Config(e.to_string()))?;
        Ok(HttpChatClient {
            pacer: Pacer::new(config.rate_limit),
            in_flight: Semaphore::new(config.max_in_flight),
            config,
            http,
        })
    }

    pub fn config(&self) -> &ClientConfig {
        &self.config
    }

    async fn attempt(&self, body: &Value) -> Attempt {
        let response = self
            .http
            .post(&self.config.endpoint)
            .bearer_auth(self.config.api_key.expose())
            .json(body)
            .send()
            .await;
        let response = match response {
            Ok(r) => r,
            Err(e) if e.is_timeout() => {
                return Attempt::Retry(ChatError::Timeout { attempts: 0 }, None)
            }
            Err(e) => return Attempt::Retry(ChatError::Provider(format!("transport: {e}")), None),
        };
        let status = response.status();
        let retry_after = response
            .headers()
            .get(reqwest::header::RETRY_AFTER)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse::<u64>().ok())
            .map(Duration::from_secs);
        if status.as_u16() == 401 || status.as_u16() == 403 {
            return Attempt::Fatal(ChatError::AuthFailure {
                status: status.as_u16(),
            });
        }
        if status.as_u16() == 429 {
            return Attempt::Retry(
                ChatError::RateLimited {
                    attempts: 0,
                    retry_after,
                },
                retry_after,
            );
        }
        let text = match response.text().await {
            Ok(t) => t,
            Err(e) if e.is_timeout() => {
                return Attempt::Retry(ChatError::Timeout { attempts: 0 }, None)
            }
            Err(e) => return Attempt::Retry(ChatError::Provider(format!("transport: {e}")), None),
        };
        if status.is_server_error() {
            return Attempt::Retry(
                ChatError::Provider(format!("HTTP {}: {}", status.as_u16(), truncate(&text))),
                retry_after,
            );
        }
        if !status.is_success() {
            return Attempt::Fatal(ChatError::Provider(format!(
                "HTTP {}: {}",
                status.as_u16(),
                truncate(&text)
            )));
        }
        match assistant_text(&text) {
            Some(content) => Attempt::Done(content),
            None => Attempt::Fatal(ChatError::Provider(format!(
                "response has no assistant message: {}",
                truncate(&text)
            ))),
        }
    }
}

fn truncate(s: &str) -> String {
    s.chars().take(200).collect()
}

fn assistant_text(body: &str) -> Option<String> {
    let value: Value = serde_json::from_str(body).ok()?;
    value
        .pointer("/choices/0/message/content")?
        .as_str()
        .map(str::to_string)
}

#[async_trait]
impl ChatProvider for HttpChatClient {
    fn model_id(&self) -> &str {
        &self.config.model_id
    }

    async fn chat(&self, messages: &[ChatMessage]) -> Result<String, ChatError> {
        let _permit = self
            .in_flight
            .acquire()
            .await
            .map_err(|_| ChatError::Provider("client shut down".into()))?;
        let body = json!({
            "model": self.config.model_id,
            "temperature": self.config.temperature,
            "messages": messages,
        });
        let mut attempt = 0u32;
        loop {
            self.pacer.wait_turn().await;
            let outcome = self.attempt(&body).await;
            attempt += 1;
            match outcome {
                Attempt::Done(text) => return Ok(text),
                Attempt::Fatal(err) => return Err(err),
                Attempt::Retry(err, hint) => {
                    if attempt > self.config.max_retries {
                        return Err(match err {
                            ChatError::Timeout { .. } => ChatError::Timeout { attempts: attempt },
                            ChatError::RateLimited { retry_after, .. } => ChatError::RateLimited {
                                attempts: attempt,
                                retry_after,
                            },
                            other => other,
                        });
                    }
                    let delay = self
                        .config
                        .backoff(attempt - 1)
                        .max(hint.unwrap_or_default());
                    tracing::debug!(attempt, ?delay, error = %err, "retrying chat request");
                    tokio::time::sleep(delay).await;
                }
            }
        }
    }
}
