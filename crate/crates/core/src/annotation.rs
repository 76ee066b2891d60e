//! Praise spans, IO label encoding and corpus ingestion.

use std::collections::HashSet;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{tokenize, TokenList};

/// The two praise categories that are highlighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PraiseType {
    Effort,
    Outcome,
}

impl PraiseType {
    pub const ALL: [PraiseType; 2] = [PraiseType::Effort, PraiseType::Outcome];

    pub fn as_str(self) -> &'static str {
        match self {
            PraiseType::Effort => "effort",
            PraiseType::Outcome => "outcome",
        }
    }
}

impl fmt::Display for PraiseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for PraiseType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "effort" => Ok(PraiseType::Effort),
            "outcome" => Ok(PraiseType::Outcome),
            other => Err(other.to_string()),
        }
    }
}

/// Single-track IO label of one token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PraiseLabel {
    O,
    #[serde(rename = "I_Effort")]
    IEffort,
    #[serde(rename = "I_Outcome")]
    IOutcome,
}

impl PraiseLabel {
    pub const ALL: [PraiseLabel; 3] = [PraiseLabel::O, PraiseLabel::IEffort, PraiseLabel::IOutcome];

    pub fn inside(praise_type: PraiseType) -> Self {
        match praise_type {
            PraiseType::Effort => PraiseLabel::IEffort,
            PraiseType::Outcome => PraiseLabel::IOutcome,
        }
    }

    pub fn praise_type(self) -> Option<PraiseType> {
        match self {
            PraiseLabel::O => None,
            PraiseLabel::IEffort => Some(PraiseType::Effort),
            PraiseLabel::IOutcome => Some(PraiseType::Outcome),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PraiseLabel::O => "O",
            PraiseLabel::IEffort => "I_Effort",
            PraiseLabel::IOutcome => "I_Outcome",
        }
    }
}

/// Half-open token interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn contains(&self, index: usize) -> bool {
        self.start <= index && index < self.end
    }

    pub fn indices(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypedSpan {
    pub praise_type: PraiseType,
    pub span: Span,
}

impl TypedSpan {
    pub fn new(praise_type: PraiseType, start: usize, end: usize) -> Self {
        TypedSpan {
            praise_type,
            span: Span::new(start, end),
        }
    }
}

/// Which span set of a response to read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpanSource {
    Gold,
    Predicted,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnnotationError {
    #[error("span {start}..{end} is empty or exceeds {token_count} tokens")]
    SpanOutOfBounds {
        start: usize,
        end: usize,
        token_count: usize,
    },
    #[error("{praise_type} spans {first:?} and {second:?} overlap")]
    OverlappingSpans {
        praise_type: PraiseType,
        first: Span,
        second: Span,
    },
    #[error("response `{0}` has no predicted spans")]
    MissingPrediction(String),
}

/// Checks bounds and same-type disjointness, returning the spans sorted.
pub fn validate_spans(
    spans: impl IntoIterator<Item = TypedSpan>,
    token_count: usize,
) -> Result<Vec<TypedSpan>, AnnotationError> {
    let mut spans: Vec<TypedSpan> = spans.into_iter().collect();
    for s in &spans {
        if s.span.is_empty() || s.span.end > token_count {
            return Err(AnnotationError::SpanOutOfBounds {
                start: s.span.start,
                end: s.span.end,
                token_count,
            });
        }
    }
    spans.sort_by_key(|s| (s.span.start, s.span.end, s.praise_type));
    spans.dedup();
    for ty in PraiseType::ALL {
        let same: Vec<&TypedSpan> = spans.iter().filter(|s| s.praise_type == ty).collect();
        for pair in same.windows(2) {
            if pair[0].span.overlaps(&pair[1].span) {
                return Err(AnnotationError::OverlappingSpans {
                    praise_type: ty,
                    first: pair[0].span,
                    second: pair[1].span,
                });
            }
        }
    }
    Ok(spans)
}

/// A tutor response with its expert spans and, optionally, model spans.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedResponse {
    id: String,
    tokens: TokenList,
    gold: Vec<TypedSpan>,
    predicted: Option<Vec<TypedSpan>>,
}

impl AnnotatedResponse {
    pub fn new(
        id: impl Into<String>,
        text: &str,
        gold: impl IntoIterator<Item = TypedSpan>,
    ) -> Result<Self, AnnotationError> {
        let tokens = tokenize(text);
        let gold = validate_spans(gold, tokens.len())?;
        Ok(AnnotatedResponse {
            id: id.into(),
            tokens,
            gold,
            predicted: None,
        })
    }

    pub fn with_predicted(
        mut self,
        predicted: impl IntoIterator<Item = TypedSpan>,
    ) -> Result<Self, AnnotationError> {
        self.predicted = Some(validate_spans(predicted, self.tokens.len())?);
        Ok(self)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn text(&self) -> &str {
        self.tokens.source_text()
    }

    pub fn tokens(&self) -> &TokenList {
        &self.tokens
    }

    pub fn gold(&self) -> &[TypedSpan] {
        &self.gold
    }

    pub fn predicted(&self) -> Option<&[TypedSpan]> {
        self.predicted.as_deref()
    }

    pub fn spans(&self, which: SpanSource) -> Result<&[TypedSpan], AnnotationError> {
        match which {
            SpanSource::Gold => Ok(&self.gold),
            SpanSource::Predicted => self
                .predicted()
                .ok_or_else(|| AnnotationError::MissingPrediction(self.id.clone())),
        }
    }

    /// Gold spans of one type, in token order.
    pub fn gold_of(&self, praise_type: PraiseType) -> Vec<Span> {
        spans_of(&self.gold, praise_type)
    }

    /// Surface text of each span of `praise_type`, in token order.
    pub fn phrases(&self, spans: &[TypedSpan], praise_type: PraiseType) -> Vec<String> {
        spans_of(spans, praise_type)
            .into_iter()
            .filter_map(|s| self.tokens.surface_of(s.start, s.end))
            .map(str::to_string)
            .collect()
    }
}

/// Untyped spans of a single type, sorted by position.
pub fn spans_of(spans: &[TypedSpan], praise_type: PraiseType) -> Vec<Span> {
    let mut out: Vec<Span> = spans
        .iter()
        .filter(|s| s.praise_type == praise_type)
        .map(|s| s.span)
        .collect();
    out.sort();
    out
}

/// Encodes spans as one IO label per token. Effort wins where an effort and
/// an outcome span share a token.
pub fn to_io_labels(
    response: &AnnotatedResponse,
    which: SpanSource,
) -> Result<Vec<PraiseLabel>, AnnotationError> {
    Ok(spans_to_labels(
        response.spans(which)?,
        response.tokens().len(),
    ))
}

pub fn spans_to_labels(spans: &[TypedSpan], token_count: usize) -> Vec<PraiseLabel> {
    let mut labels = vec![PraiseLabel::O; token_count];
    for ty in [PraiseType::Outcome, PraiseType::Effort] {
        for s in spans.iter().filter(|s| s.praise_type == ty) {
            for i in s.span.indices().filter(|&i| i < token_count) {
                labels[i] = PraiseLabel::inside(ty);
            }
        }
    }
    labels
}

/// Recovers maximal same-label runs as spans.
pub fn labels_to_spans(labels: &[PraiseLabel]) -> Vec<TypedSpan> {
    let mut spans = Vec::new();
    let mut i = 0;
    while i < labels.len() {
        let Some(ty) = labels[i].praise_type() else {
            i += 1;
            continue;
        };
        let start = i;
        while i < labels.len() && labels[i] == labels[start] {
            i += 1;
        }
        spans.push(TypedSpan::new(ty, start, i));
    }
    spans
}

/// Ordered collection of responses with unique ids.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Corpus {
    responses: Vec<AnnotatedResponse>,
}

impl Corpus {
    pub fn new(responses: Vec<AnnotatedResponse>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::new();
        for r in &responses {
            if !seen.insert(r.id()) {
                return Err(CorpusError::DuplicateId(r.id().to_string()));
            }
        }
        Ok(Corpus { responses })
    }

    pub fn responses(&self) -> &[AnnotatedResponse] {
        &self.responses
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }

    pub fn ids(&self) -> Vec<&str> {
        self.responses.iter().map(|r| r.id()).collect()
    }

    pub fn get(&self, id: &str) -> Option<&AnnotatedResponse> {
        self.responses.iter().find(|r| r.id() == id)
    }

    pub(crate) fn from_unique(responses: Vec<AnnotatedResponse>) -> Self {
        Corpus { responses }
    }
}

impl IntoIterator for Corpus {
    type Item = AnnotatedResponse;
    type IntoIter = std::vec::IntoIter<AnnotatedResponse>;

    fn into_iter(self) -> Self::IntoIter {
        self.responses.into_iter()
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("line {line}: unknown praise type `{value}`")]
    UnknownPraiseType { line: usize, value: String },
    #[error("duplicate response id `{0}`")]
    DuplicateId(String),
    #[error("failed to read corpus: {0}")]
    Io(#[from] std::io::Error),
}

/// A gold span whose character range cut through a token and was widened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapWarning {
    pub response_id: String,
    pub char_start: usize,
    pub char_end: usize,
    pub snapped: Span,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    id: String,
    text: String,
    gold: Vec<RawSpan>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpan {
    #[serde(rename = "type")]
    praise_type: String,
    char_start: usize,
    char_end: usize,
}

/// Serializable corpus line, the inverse of [`load_corpus`].
#[derive(Debug, Serialize)]
pub struct CorpusRecord<'a> {
    pub id: &'a str,
    pub text: &'a str,
    pub gold: Vec<CorpusSpan>,
}

#[derive(Debug, Serialize)]
pub struct CorpusSpan {
    #[serde(rename = "type")]
    pub praise_type: PraiseType,
    pub char_start: usize,
    pub char_end: usize,
}

impl<'a> CorpusRecord<'a> {
    pub fn from_response(response: &'a AnnotatedResponse) -> Self {
        let toks = response.tokens().tokens();
        CorpusRecord {
            id: response.id(),
            text: response.text(),
            gold: response
                .gold()
                .iter()
                .map(|s| CorpusSpan {
                    praise_type: s.praise_type,
                    char_start: toks[s.span.start].char_start,
                    char_end: toks[s.span.end - 1].char_end,
                })
                .collect(),
        }
    }
}

pub fn write_corpus(corpus: &Corpus, mut sink: impl std::io::Write) -> std::io::Result<()> {
    for response in corpus.responses() {
        serde_json::to_writer(&mut sink, &CorpusRecord::from_response(response))?;
        sink.write_all(b"\n")?;
    }
    sink.flush()
}

/// Reads a line-delimited corpus. Blank lines are skipped.
pub fn load_corpus(source: impl BufRead) -> Result<Corpus, CorpusError> {
    let (corpus, warnings) = load_corpus_with_warnings(source)?;
    for w in &warnings {
        tracing::warn!(
            response = %w.response_id,
            char_start = w.char_start,
            char_end = w.char_end,
            "gold span cuts a token; widened to tokens {}..{}",
            w.snapped.start,
            w.snapped.end
        );
    }
    Ok(corpus)
}

pub fn load_corpus_with_warnings(
    source: impl BufRead,
) -> Result<(Corpus, Vec<SnapWarning>), CorpusError> {
    let mut responses = Vec::new();
    let mut warnings = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord =
            serde_json::from_str(&line).map_err(|e| CorpusError::MalformedRecord {
                line: line_no,
                reason: e.to_string(),
            })?;
        if !seen.insert(raw.id.clone()) {
            return Err(CorpusError::DuplicateId(raw.id));
        }
        let tokens = tokenize(&raw.text);
        let text_chars = raw.text.chars().count();
        let mut gold = Vec::with_capacity(raw.gold.len());
        for g in &raw.gold {
            let praise_type: PraiseType =
                g.praise_type
                    .parse()
                    .map_err(|value| CorpusError::UnknownPraiseType {
                        line: line_no,
                        value,
                    })?;
            if g.char_start >= g.char_end || g.char_end > text_chars {
                return Err(CorpusError::MalformedRecord {
                    line: line_no,
                    reason: format!(
                        "character range {}..{} is empty or exceeds the text ({} chars)",
                        g.char_start, g.char_end, text_chars
                    ),
                });
            }
            let covered: Vec<usize> = tokens
                .tokens()
                .iter()
                .filter(|t| t.char_start < g.char_end && g.char_start < t.char_end)
                .map(|t| t.index)
                .collect();
            let (Some(&first), Some(&last)) = (covered.first(), covered.last()) else {
                return Err(CorpusError::MalformedRecord {
                    line: line_no,
                    reason: format!(
                        "character range {}..{} covers no token",
                        g.char_start, g.char_end
                    ),
                });
            };
            let span = Span::new(first, last + 1);
            let toks = tokens.tokens();
            if toks[first].char_start != g.char_start || toks[last].char_end != g.char_end {
                // Only a cut through a token counts; trailing punctuation or
                // whitespace inside the range is harmless.
                let cut = g.char_start > toks[first].char_start || g.char_end < toks[last].char_end;
                if cut {
                    warnings.push(SnapWarning {
                        response_id: raw.id.clone(),
                        char_start: g.char_start,
                        char_end: g.char_end,
                        snapped: span,
                    });
                }
            }
            gold.push(TypedSpan { praise_type, span });
        }
        let response = AnnotatedResponse::new(raw.id, &raw.text, gold).map_err(|e| {
            CorpusError::MalformedRecord {
                line: line_no,
                reason: e.to_string(),
            }
        })?;
        responses.push(response);
    }
    Ok((Corpus::from_unique(responses), warnings))
}

/// Token counts per IO label, as in a corpus statistics table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelDistribution {
    pub outside: usize,
    pub inside_effort: usize,
    pub inside_outcome: usize,
    pub total: usize,
}

impl LabelDistribution {
    pub fn count(&self, label: PraiseLabel) -> usize {
        match label {
            PraiseLabel::O => self.outside,
            PraiseLabel::IEffort => self.inside_effort,
            PraiseLabel::IOutcome => self.inside_outcome,
        }
    }

    /// Share of all tokens, in percent. Zero when there are no tokens.
    pub fn percentage(&self, label: PraiseLabel) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.count(label) as f64 / self.total as f64
        }
    }

    /// True when the table was computed over zero tokens.
    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// One row in the `count (pct%)` layout.
    pub fn render_row(&self, name: &str) -> String {
        let cell = |l| format!("{} ({:.2}%)", self.count(l), self.percentage(l));
        format!(
            "{:<10} {:>16} {:>16} {:>16}",
            name,
            cell(PraiseLabel::O),
            cell(PraiseLabel::IEffort),
            cell(PraiseLabel::IOutcome)
        )
    }

    pub fn render_header() -> String {
        format!(
            "{:<10} {:>16} {:>16} {:>16}",
            "", "O", "I_Effort", "I_Outcome"
        )
    }
}

pub fn label_distribution(
    corpus: &Corpus,
    which: SpanSource,
) -> Result<LabelDistribution, AnnotationError> {
    let mut dist = LabelDistribution {
        outside: 0,
        inside_effort: 0,
        inside_outcome: 0,
        total: 0,
    };
    for response in corpus.responses() {
        for label in to_io_labels(response, which)? {
            match label {
                PraiseLabel::O => dist.outside += 1,
                PraiseLabel::IEffort => dist.inside_effort += 1,
                PraiseLabel::IOutcome => dist.inside_outcome += 1,
            }
            dist.total += 1;
        }
    }
    Ok(dist)
}
