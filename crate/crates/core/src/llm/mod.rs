//! Prompting a chat model to highlight praise and mapping its answer back
//! onto response tokens.

mod align;
mod client;
mod extraction;
mod prompt;
mod replay;

use thiserror::Error;

pub use align::{align_extraction, align_phrases, AlignmentFailure, AlignmentReport};
pub use client::{
    ApiKey, ChatError, ChatProvider, ClientConfig, HttpChatClient, RateLimit, API_KEY_ENV,
    DEFAULT_ENDPOINT, DEFAULT_MODEL, ENDPOINT_ENV, MODEL_ENV,
};
pub use extraction::{format_phrase_object, parse_extraction, ExtractionResult, ParseError};
pub use prompt::{
    build_highlight_prompt, prompt_preamble, ChatMessage, PromptBundle, Role, CORRECTIVE_TURN,
    LESSON_PRINCIPLE, SYSTEM_INSTRUCTION,
};
pub use replay::{request_digest, FixtureError, FixtureStore, RecordingClient, ReplayClient};

use crate::annotation::AnnotatedResponse;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LlmError {
    #[error("response text is empty")]
    EmptyResponse,
    #[error("chat message content is empty")]
    EmptyMessage,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtractionError {
    #[error(transparent)]
    Prompt(#[from] LlmError),
    #[error(transparent)]
    Chat(#[from] ChatError),
    #[error("model output unusable after a corrective retry: {0}")]
    Unparseable(ParseError),
}

/// Highlighted spans for one response, with the extraction they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct PraiseExtraction {
    pub extraction: ExtractionResult,
    pub alignment: AlignmentReport,
}

/// Prompts the model, parses its answer and aligns the phrases. A reply
/// that cannot be parsed is answered with one corrective turn before
/// giving up.
pub async fn extract_praise(
    provider: &dyn ChatProvider,
    response: &AnnotatedResponse,
) -> Result<PraiseExtraction, ExtractionError> {
    let messages = build_highlight_prompt(response.text())?.messages;
    let raw = provider.chat(&messages).await?;
    let extraction = match parse_extraction(&raw) {
        Ok(e) => e,
        Err(first) => {
            tracing::debug!(response = response.id(), error = %first, "re-asking after unparseable reply");
            let retry = provider
                .chat(&corrective_conversation(response.text(), &raw)?)
                .await?;
            parse_extraction(&retry).map_err(ExtractionError::Unparseable)?
        }
    };
    let alignment = align_extraction(response, &extraction);
    Ok(PraiseExtraction {
        extraction,
        alignment,
    })
}

/// The messages sent for the corrective retry after `first_reply`.
pub fn corrective_conversation(
    response_text: &str,
    first_reply: &str,
) -> Result<Vec<ChatMessage>, LlmError> {
    let mut messages = build_highlight_prompt(response_text)?.messages;
    if let Ok(echo) = ChatMessage::new(Role::Assistant, first_reply) {
        messages.push(echo);
    }
    messages.push(ChatMessage::user(CORRECTIVE_TURN));
    Ok(messages)
}
