use std::fmt::Write as _;

use praise_core::annotation::Corpus;
use praise_core::experiment::{
    run_evaluation, summarize_runs, EvaluationFailure, RunGroup, RunReport, ScoreRecord,
};
use praise_core::llm::ChatProvider;
use praise_core::metrics::MiouConfig;
use serde::{Deserialize, Serialize};

/// Scores of one model over one corpus, with the run summarized as a
/// single (size, seed) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub model_id: String,
    pub alpha: f64,
    pub size: usize,
    pub seed: u64,
    pub records: Vec<ScoreRecord>,
    pub errors: Vec<EvaluationFailure>,
    /// Absent when no response could be scored.
    pub summary: Option<RunReport>,
}

impl EvaluationReport {
    pub fn group(&self) -> RunGroup {
        RunGroup {
            size: self.size,
            seed: self.seed,
            records: self.records.clone(),
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "model {}  alpha {}  size {}  seed {}",
            self.model_id, self.alpha, self.size, self.seed
        );
        let _ = writeln!(
            out,
            "{:<24} {:<8} {:>9} {:>10} {:>6} {:>6}",
            "response", "type", "span_miou", "token_miou", "f1", "iou"
        );
        for r in &self.records {
            let _ = writeln!(
                out,
                "{:<24} {:<8} {:>9.3} {:>10.3} {:>6.3} {:>6.3}",
                r.response_id,
                r.praise_type,
                r.span_miou.value(),
                r.token_miou.value(),
                r.f1.value(),
                r.iou.value()
            );
        }
        for e in &self.errors {
            let _ = writeln!(out, "failed {}: {}", e.response_id, e.message);
        }
        if let Some(summary) = &self.summary {
            out.push('\n');
            out.push_str(&summary.render_table(None));
        }
        out
    }
}

pub async fn evaluate_corpus(
    provider: &dyn ChatProvider,
    corpus: &Corpus,
    cfg: MiouConfig,
    size: usize,
    seed: u64,
    concurrency: usize,
) -> EvaluationReport {
    let outcome = run_evaluation(provider, corpus, cfg, concurrency).await;
    let summary = summarize_runs(&[RunGroup {
        size,
        seed,
        records: outcome.records.clone(),
    }])
    .ok();
    EvaluationReport {
        model_id: provider.model_id().to_string(),
        alpha: cfg.alpha(),
        size,
        seed,
        records: outcome.records,
        errors: outcome.errors,
        summary,
    }
}
