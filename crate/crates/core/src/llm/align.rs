use serde::{Deserialize, Serialize};

use super::extraction::ExtractionResult;
use crate::annotation::{AnnotatedResponse, PraiseType, Span, TypedSpan};
use crate::text::{locate_phrase, normalize_phrase, TokenList};

/// A model phrase that does not occur in the response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentFailure {
    pub praise_type: PraiseType,
    pub phrase: String,
    /// Number of tokens in the phrase; scored as false positives.
    pub token_count: usize,
}

/// Spans recovered from a model extraction.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AlignmentReport {
    pub spans: Vec<TypedSpan>,
    pub failures: Vec<AlignmentFailure>,
}

impl AlignmentReport {
    pub fn spans_of(&self, praise_type: PraiseType) -> Vec<Span> {
        crate::annotation::spans_of(&self.spans, praise_type)
    }

    /// Token counts of phrases of one type that could not be placed.
    pub fn unplaced_token_counts(&self, praise_type: PraiseType) -> Vec<usize> {
        self.failures
            .iter()
            .filter(|f| f.praise_type == praise_type)
            .map(|f| f.token_count)
            .collect()
    }
}

pub fn align_extraction(
    response: &AnnotatedResponse,
    extraction: &ExtractionResult,
) -> AlignmentReport {
    align_phrases(response.tokens(), extraction)
}

/// Places each phrase on the token list. Phrases of one type are matched
/// left to right with a cursor that wraps to the start once; matches of one
/// type that overlap are merged.
pub fn align_phrases(tokens: &TokenList, extraction: &ExtractionResult) -> AlignmentReport {
    let mut report = AlignmentReport::default();
    for praise_type in PraiseType::ALL {
        let mut cursor = 0;
        let mut found: Vec<Span> = Vec::new();
        for phrase in extraction.phrases(praise_type) {
            let hit = locate_phrase(tokens, phrase, cursor).or_else(|| {
                (cursor > 0)
                    .then(|| locate_phrase(tokens, phrase, 0))
                    .flatten()
            });
            match hit {
                Some(m) => {
                    cursor = m.end;
                    found.push(Span::new(m.start, m.end));
                }
                None => report.failures.push(AlignmentFailure {
                    praise_type,
                    phrase: phrase.clone(),
                    token_count: normalize_phrase(phrase).len(),
                }),
            }
        }
        report.spans.extend(
            merge_overlapping(found)
                .into_iter()
                .map(|span| TypedSpan { praise_type, span }),
        );
    }
    report
        .spans
        .sort_by_key(|s| (s.span.start, s.span.end, s.praise_type));
    report
}

fn merge_overlapping(mut spans: Vec<Span>) -> Vec<Span> {
    spans.sort();
    let mut merged: Vec<Span> = Vec::with_capacity(spans.len());
    for s in spans {
        match merged.last_mut() {
            Some(last) if last.overlaps(&s) => last.end = last.end.max(s.end),
            _ => merged.push(s),
        }
    }
    merged
}
