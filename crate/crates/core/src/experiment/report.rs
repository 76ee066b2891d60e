//! Per training-size summaries of seed-level mean scores.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::evaluate::ScoreRecord;
use super::ExperimentError;
use crate::annotation::PraiseType;
use crate::metrics::{aggregate, SummaryStats};

/// Score records of one fine-tuned model (one training size and seed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunGroup {
    pub size: usize,
    pub seed: u64,
    pub records: Vec<ScoreRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub size: usize,
    pub praise_type: PraiseType,
    pub seeds: Vec<u64>,
    pub seed_means: Vec<f64>,
    pub stats: SummaryStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub rows: Vec<ReportRow>,
}

fn mean_span_miou(records: &[&ScoreRecord]) -> f64 {
    let mut values: Vec<(&str, f64)> = records
        .iter()
        .map(|r| (r.response_id.as_str(), r.span_miou.value()))
        .collect();
    values.sort_by(|a, b| a.0.cmp(b.0).then(a.1.total_cmp(&b.1)));
    values.iter().map(|(_, v)| v).sum::<f64>() / values.len() as f64
}

/// Means each seed's span M-IoU per type, then summarizes the seed means
/// of every size. The result does not depend on the order of groups or
/// records.
pub fn summarize_runs(groups: &[RunGroup]) -> Result<RunReport, ExperimentError> {
    let mut by_size: BTreeMap<usize, BTreeMap<u64, Vec<&ScoreRecord>>> = BTreeMap::new();
    for g in groups {
        by_size
            .entry(g.size)
            .or_default()
            .entry(g.seed)
            .or_default()
            .extend(&g.records);
    }
    let mut rows = Vec::new();
    for (size, seeds) in by_size {
        for praise_type in PraiseType::ALL {
            let mut seed_ids = Vec::new();
            let mut seed_means = Vec::new();
            for (&seed, records) in &seeds {
                let of_type: Vec<&ScoreRecord> = records
                    .iter()
                    .copied()
                    .filter(|r| r.praise_type == praise_type)
                    .collect();
                if of_type.is_empty() {
                    return Err(ExperimentError::EmptyGroup {
                        size,
                        seed,
                        praise_type,
                    });
                }
                seed_ids.push(seed);
                seed_means.push(mean_span_miou(&of_type));
            }
            let stats = aggregate(&seed_means)?;
            rows.push(ReportRow {
                size,
                praise_type,
                seeds: seed_ids,
                seed_means,
                stats,
            });
        }
    }
    Ok(RunReport { rows })
}

impl RunReport {
    pub fn row(&self, size: usize, praise_type: PraiseType) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.size == size && r.praise_type == praise_type)
    }

    /// Plain-text table with Mean/Std./Min./Max. per praise type. When the
    /// corpus size is known, sizes also show their share of it.
    pub fn render_table(&self, corpus_size: Option<usize>) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<16} | {:^31} | {:^31}",
            "Training size", "Effort", "Outcome"
        );
        let cols = format!("{:>7} {:>7} {:>7} {:>7}", "Mean", "Std.", "Min.", "Max.");
        let _ = writeln!(out, "{:<16} | {} | {}", "", cols, cols);
        let _ = writeln!(out, "{}", "-".repeat(16 + 3 + 31 + 3 + 31));
        let mut sizes: Vec<usize> = self.rows.iter().map(|r| r.size).collect();
        sizes.dedup();
        for size in sizes {
            let label = match corpus_size {
                Some(n) if n > 0 => format!("{} ({:.0}%)", size, 100.0 * size as f64 / n as f64),
                _ => size.to_string(),
            };
            let cell = |ty| {
                self.row(size, ty).map_or_else(
                    || format!("{:>31}", "-"),
                    |r| {
                        format!(
                            "{:>7.2} {:>7.2} {:>7.2} {:>7.2}",
                            r.stats.mean, r.stats.std, r.stats.min, r.stats.max
                        )
                    },
                )
            };
            let _ = writeln!(
                out,
                "{:<16} | {} | {}",
                label,
                cell(PraiseType::Effort),
                cell(PraiseType::Outcome)
            );
        }
        out
    }
}
