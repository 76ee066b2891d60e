//! Templated explanatory feedback and highlight markup for trainees.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotation::{spans_of, AnnotatedResponse, PraiseType, TypedSpan};
use crate::text::TokenList;

const DEFAULT_TEMPLATES: &str = include_str!("../data/feedback_templates.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    EffortPraised,
    OutcomeOnly,
    NoPraiseFound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitedSpan {
    pub praise_type: PraiseType,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackMessage {
    pub verdict: Verdict,
    pub body: String,
    pub cited_spans: Vec<CitedSpan>,
}

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("cannot read templates: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad template file: {0}")]
    Format(#[from] toml::de::Error),
    #[error("template `{0}` has an empty body")]
    EmptyBody(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
struct Template {
    body: String,
}

/// Feedback wording per verdict, loaded from TOML.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct FeedbackTemplates {
    effort_praised: Template,
    outcome_only: Template,
    no_praise_found: Template,
}

impl Default for FeedbackTemplates {
    fn default() -> Self {
        Self::from_toml(DEFAULT_TEMPLATES).expect("bundled templates are valid")
    }
}

impl FeedbackTemplates {
    pub fn from_toml(text: &str) -> Result<Self, TemplateError> {
        let templates: FeedbackTemplates = toml::from_str(text)?;
        for (name, t) in [
            ("effort_praised", &templates.effort_praised),
            ("outcome_only", &templates.outcome_only),
            ("no_praise_found", &templates.no_praise_found),
        ] {
            if t.body.trim().is_empty() {
                return Err(TemplateError::EmptyBody(name));
            }
        }
        Ok(templates)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TemplateError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    fn body(&self, verdict: Verdict) -> &str {
        match verdict {
            Verdict::EffortPraised => &self.effort_praised.body,
            Verdict::OutcomeOnly => &self.outcome_only.body,
            Verdict::NoPraiseFound => &self.no_praise_found.body,
        }
    }
}

fn quoted(phrases: &[String]) -> String {
    let q: Vec<String> = phrases.iter().map(|p| format!("\"{p}\"")).collect();
    match q.as_slice() {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {}", init.join(", "), last),
    }
}

pub fn compose_feedback(
    spans: &[TypedSpan],
    response: &AnnotatedResponse,
    templates: &FeedbackTemplates,
) -> FeedbackMessage {
    let effort = response.phrases(spans, PraiseType::Effort);
    let outcome = response.phrases(spans, PraiseType::Outcome);
    let verdict = if !effort.is_empty() {
        Verdict::EffortPraised
    } else if !outcome.is_empty() {
        Verdict::OutcomeOnly
    } else {
        Verdict::NoPraiseFound
    };
    let body = templates
        .body(verdict)
        .replace("{effort_phrases}", &quoted(&effort))
        .replace(
            "{outcome_phrase}",
            &quoted(&outcome[..outcome.len().min(1)]),
        );
    let cited_spans = match verdict {
        Verdict::EffortPraised => effort
            .into_iter()
            .map(|text| CitedSpan {
                praise_type: PraiseType::Effort,
                text,
            })
            .collect(),
        Verdict::OutcomeOnly => outcome
            .into_iter()
            .take(1)
            .map(|text| CitedSpan {
                praise_type: PraiseType::Outcome,
                text,
            })
            .collect(),
        Verdict::NoPraiseFound => Vec::new(),
    };
    FeedbackMessage {
        verdict,
        body,
        cited_spans,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentStyle {
    Plain,
    Effort,
    Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub text: String,
    pub style: SegmentStyle,
}

/// The response text cut into styled runs that concatenate back to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HighlightMarkup {
    pub segments: Vec<Segment>,
}

impl HighlightMarkup {
    pub fn text(&self) -> String {
        self.segments.iter().map(|s| s.text.as_str()).collect()
    }
}

pub fn render_highlight_markup(tokens: &TokenList, spans: &[TypedSpan]) -> HighlightMarkup {
    let text = tokens.source_text();
    let mut styles = vec![SegmentStyle::Plain; text.len()];
    for (ty, style) in [
        (PraiseType::Outcome, SegmentStyle::Outcome),
        (PraiseType::Effort, SegmentStyle::Effort),
    ] {
        for span in spans_of(spans, ty) {
            if let Some(range) = tokens.byte_range_of(span.start, span.end) {
                styles[range].fill(style);
            }
        }
    }
    let mut segments: Vec<Segment> = Vec::new();
    for (offset, c) in text.char_indices() {
        let style = styles[offset];
        match segments.last_mut() {
            Some(last) if last.style == style => last.text.push(c),
            _ => segments.push(Segment {
                text: c.to_string(),
                style,
            }),
        }
    }
    HighlightMarkup { segments }
}
