//! Reading the `{"effort": [...], "outcome": [...]}` object out of free-form
//! model output.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::annotation::PraiseType;

/// Phrases the model attributed to each praise type, in output order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub effort_phrases: Vec<String>,
    pub outcome_phrases: Vec<String>,
    pub raw_output: String,
}

impl ExtractionResult {
    pub fn new(effort: Vec<String>, outcome: Vec<String>) -> Self {
        let mut result = ExtractionResult {
            effort_phrases: effort,
            outcome_phrases: outcome,
            raw_output: String::new(),
        };
        result.raw_output = result.to_json();
        result
    }

    pub fn phrases(&self, praise_type: PraiseType) -> &[String] {
        match praise_type {
            PraiseType::Effort => &self.effort_phrases,
            PraiseType::Outcome => &self.outcome_phrases,
        }
    }

    /// Renders the phrase lists in the same layout the worked examples use.
    pub fn to_json(&self) -> String {
        format_phrase_object(&self.effort_phrases, &self.outcome_phrases)
    }
}

pub fn format_phrase_object(effort: &[String], outcome: &[String]) -> String {
    let list = |items: &[String]| {
        items
            .iter()
            .map(|p| serde_json::to_string(p).expect("strings always serialize"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    format!(
        "{{\"effort\": [{}], \"outcome\": [{}]}}",
        list(effort),
        list(outcome)
    )
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("no JSON object found in model output")]
    NoObjectFound,
    #[error("model output violates the phrase schema: {0}")]
    SchemaViolation(String),
}

fn strip_code_fences(raw: &str) -> String {
    raw.lines()
        .filter(|line| !line.trim_start().starts_with("```"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Returns the first `{ ... }` with balanced braces, skipping braces inside
/// string literals.
fn first_balanced_object(text: &str) -> Option<&str> {
    let start = text.find('{')?;
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (offset, c) in text[start..].char_indices() {
        if in_string {
            match c {
                _ if escaped => escaped = false,
                '\\' => escaped = true,
                '"' => in_string = false,
                _ => {}
            }
            continue;
        }
        match c {
            '"' => in_string = true,
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(&text[start..start + offset + 1]);
                }
            }
            _ => {}
        }
    }
    None
}

fn string_list(
    object: &serde_json::Map<String, Value>,
    key: &str,
) -> Result<Vec<String>, ParseError> {
    let mut matches = object.iter().filter(|(k, _)| k.eq_ignore_ascii_case(key));
    let (_, value) = matches
        .next()
        .ok_or_else(|| ParseError::SchemaViolation(format!("missing key `{key}`")))?;
    if matches.next().is_some() {
        return Err(ParseError::SchemaViolation(format!(
            "key `{key}` appears twice"
        )));
    }
    let items = value
        .as_array()
        .ok_or_else(|| ParseError::SchemaViolation(format!("`{key}` is not a list")))?;
    items
        .iter()
        .map(|item| {
            item.as_str().map(str::to_string).ok_or_else(|| {
                ParseError::SchemaViolation(format!("`{key}` contains a non-string element"))
            })
        })
        .collect()
}

pub fn parse_extraction(raw: &str) -> Result<ExtractionResult, ParseError> {
    let unfenced = strip_code_fences(raw);
    let object_text = first_balanced_object(&unfenced).ok_or(ParseError::NoObjectFound)?;
    let value: Value = serde_json::from_str(object_text)
        .map_err(|e| ParseError::SchemaViolation(format!("invalid JSON: {e}")))?;
    let object = value
        .as_object()
        .ok_or_else(|| ParseError::SchemaViolation("not an object".into()))?;
    Ok(ExtractionResult {
        effort_phrases: string_list(object, "effort")?,
        outcome_phrases: string_list(object, "outcome")?,
        raw_output: raw.to_string(),
    })
}
