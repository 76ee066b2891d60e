//! Recorded provider replies, keyed by a digest of the request messages.
//!
//! A fixture file is a JSON object mapping the hex SHA-256 of the serialized
//! message array to the assistant text that was returned for it.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, Mutex};

use async_trait::async_trait;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::client::{ChatError, ChatProvider};
use super::prompt::ChatMessage;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("fixture file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("fixture file {path} is not a digest -> text map: {source}")]
    Format {
        path: String,
        source: serde_json::Error,
    },
}

/// Hex SHA-256 of the compact JSON encoding of `messages`.
pub fn request_digest(messages: &[ChatMessage]) -> String {
    let bytes = serde_json::to_vec(messages).expect("messages always serialize");
    hex::encode(Sha256::digest(&bytes))
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FixtureStore {
    entries: BTreeMap<String, String>,
}

impl FixtureStore {
    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        Ok(FixtureStore {
            entries: serde_json::from_str(json)?,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FixtureError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| FixtureError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text).map_err(|source| FixtureError::Format {
            path: path.display().to_string(),
            source,
        })
    }

    /// Pretty JSON with keys in sorted order, so files diff cleanly.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.entries).expect("map always serializes");
        out.push('\n');
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), FixtureError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|source| FixtureError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn insert(&mut self, messages: &[ChatMessage], reply: impl Into<String>) -> String {
        let digest = request_digest(messages);
        self.entries.insert(digest.clone(), reply.into());
        digest
    }

    pub fn lookup(&self, messages: &[ChatMessage]) -> Result<&str, ChatError> {
        let digest = request_digest(messages);
        self.entries
            .get(&digest)
            .map(String::as_str)
            .ok_or(ChatError::MissingFixture(digest))
    }

    pub fn merge(&mut self, other: FixtureStore) {
        self.entries.extend(other.entries);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Serves recorded replies and never touches the network.
#[derive(Debug, Clone)]
pub struct ReplayClient {
    model_id: String,
    fixtures: Arc<FixtureStore>,
}

impl ReplayClient {
    pub fn new(model_id: impl Into<String>, fixtures: FixtureStore) -> Self {
        ReplayClient {
            model_id: model_id.into(),
            fixtures: Arc::new(fixtures),
        }
    }
}

#[async_trait]
impl ChatProvider for ReplayClient {
    fn model_id(&self) -> &str {
        &self.model_id
    }

    async fn chat(&self, messages: &[ChatMessage]) -> Result<String, ChatError> {
        self.fixtures.lookup(messages).map(str::to_string)
    }
}

/// Forwards to another provider and keeps every successful reply.
pub struct RecordingClient<P> {
    inner: P,
    recorded: Mutex<FixtureStore>,
}

impl<P: ChatProvider> RecordingClient<P> {
    pub fn new(inner: P) -> Self {
        RecordingClient {
            inner,
            recorded: Mutex::new(FixtureStore::default()),
        }
    }

    pub fn recorded(&self) -> FixtureStore {
        self.recorded
            .lock()
            .expect("recorder lock poisoned")
            .clone()
    }
}

#[async_trait]
impl<P: ChatProvider> ChatProvider for RecordingClient<P> {
    fn model_id(&self) -> &str {
        self.inner.model_id()
    }

    async fn chat(&self, messages: &[ChatMessage]) -> Result<String, ChatError> {
        let reply = self.inner.chat(messages).await?;
        self.recorded
            .lock()
            .expect("recorder lock poisoned")
            .insert(messages, reply.clone());
        Ok(reply)
    }
}
