//! Fine-tuning records: the highlighting conversation followed by the
//! expert answer.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::annotation::{AnnotatedResponse, Corpus, PraiseType};
use crate::llm::{build_highlight_prompt, format_phrase_object, ChatMessage, Role};

/// One line of a chat fine-tuning file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinetuneRecord {
    pub messages: Vec<ChatMessage>,
}

impl FinetuneRecord {
    /// Content of the final assistant turn.
    pub fn target(&self) -> Option<&str> {
        self.messages
            .last()
            .filter(|m| m.role == Role::Assistant)
            .map(|m| m.content.as_str())
    }
}

pub fn finetune_record(response: &AnnotatedResponse) -> Result<FinetuneRecord, ExperimentError> {
    let mut messages = build_highlight_prompt(response.text())
        .map_err(|e| ExperimentError::InvalidResponse {
            id: response.id().to_string(),
            reason: e.to_string(),
        })?
        .messages;
    let effort = response.phrases(response.gold(), PraiseType::Effort);
    let outcome = response.phrases(response.gold(), PraiseType::Outcome);
    messages.push(ChatMessage::assistant(&format_phrase_object(
        &effort, &outcome,
    )));
    Ok(FinetuneRecord { messages })
}

/// Writes one JSON line per response and returns the number written.
pub fn emit_finetune_dataset(
    partition: &Corpus,
    mut sink: impl Write,
) -> Result<usize, ExperimentError> {
    let mut count = 0;
    for response in partition.responses() {
        let record = finetune_record(response)?;
        serde_json::to_writer(&mut sink, &record).map_err(std::io::Error::from)?;
        sink.write_all(b"\n")?;
        count += 1;
    }
    sink.flush()?;
    Ok(count)
}
