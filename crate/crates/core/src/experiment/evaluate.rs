use futures::stream::{self, StreamExt};
use serde::{Deserialize, Serialize};

use crate::annotation::{AnnotatedResponse, Corpus, PraiseType};
use crate::llm::{extract_praise, AlignmentReport, ChatProvider};
use crate::metrics::{
    confusion_counts, f1_score, iou_score, span_miou_with_unplaced, token_miou, token_set,
    ConfusionCounts, MiouConfig, UnitScore,
};

/// All four scores of one response for one praise type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub response_id: String,
    pub praise_type: PraiseType,
    pub span_miou: UnitScore,
    pub token_miou: UnitScore,
    pub f1: UnitScore,
    pub iou: UnitScore,
}

/// A response whose extraction failed; the rest of the batch still runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationFailure {
    pub response_id: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvaluationOutcome {
    pub records: Vec<ScoreRecord>,
    pub errors: Vec<EvaluationFailure>,
}

/// Scores an alignment against a response's gold spans. Phrases that could
/// not be placed count as false positives.
pub fn score_alignment(
    response: &AnnotatedResponse,
    alignment: &AlignmentReport,
    cfg: MiouConfig,
) -> Vec<ScoreRecord> {
    PraiseType::ALL
        .iter()
        .map(|&praise_type| {
            let pred = alignment.spans_of(praise_type);
            let gold = response.gold_of(praise_type);
            let unplaced = alignment.unplaced_token_counts(praise_type);
            let counts: ConfusionCounts = confusion_counts(&token_set(&pred), &token_set(&gold))
                .with_extra_false_positives(unplaced.iter().sum());
            ScoreRecord {
                response_id: response.id().to_string(),
                praise_type,
                span_miou: span_miou_with_unplaced(&pred, &gold, &unplaced, cfg),
                token_miou: token_miou(counts, cfg),
                f1: f1_score(counts),
                iou: iou_score(counts),
            }
        })
        .collect()
}

/// Extracts and scores every response, running up to `concurrency`
/// extractions at once. Output keeps corpus order.
pub async fn run_evaluation(
    provider: &dyn ChatProvider,
    test: &Corpus,
    cfg: MiouConfig,
    concurrency: usize,
) -> EvaluationOutcome {
    let pending: Vec<_> = test
        .responses()
        .iter()
        .map(|response| async move { (response, extract_praise(provider, response).await) })
        .collect();
    let results: Vec<_> = stream::iter(pending)
        .buffered(concurrency.max(1))
        .collect()
        .await;
    let mut outcome = EvaluationOutcome::default();
    for (response, result) in results {
        match result {
            Ok(extracted) => {
                outcome
                    .records
                    .extend(score_alignment(response, &extracted.alignment, cfg))
            }
            Err(e) => outcome.errors.push(EvaluationFailure {
                response_id: response.id().to_string(),
                message: e.to_string(),
            }),
        }
    }
    outcome
}
