//! Human Likert ratings and their correlation with span M-IoU.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::evaluate::ScoreRecord;
use super::ExperimentError;
use crate::annotation::PraiseType;
use crate::metrics::{normalize_likert, pearson_r, MetricError};

/// One coder's 1..=5 ratings of one highlighted response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub response_id: String,
    pub coder_id: String,
    pub effort_rating: u8,
    pub outcome_rating: u8,
}

impl RatingRecord {
    pub fn rating(&self, praise_type: PraiseType) -> u8 {
        match praise_type {
            PraiseType::Effort => self.effort_rating,
            PraiseType::Outcome => self.outcome_rating,
        }
    }
}

/// Reads `response_id,coder_id,effort_rating,outcome_rating` rows.
pub fn load_ratings(source: impl Read) -> Result<Vec<RatingRecord>, ExperimentError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<RatingRecord>().enumerate() {
        let record = row.map_err(|e| ExperimentError::Ratings(format!("row {}: {e}", i + 1)))?;
        for ty in PraiseType::ALL {
            normalize_likert(record.rating(ty))
                .map_err(|e| ExperimentError::Ratings(format!("row {}: {e}", i + 1)))?;
        }
        out.push(record);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rater {
    Coder(String),
    /// Per-response mean of all coders' normalized ratings.
    Average,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub praise_type: PraiseType,
    pub rater: Rater,
    pub joined: usize,
    pub pearson_r: f64,
    pub mean_normalized_rating: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub rows: Vec<CorrelationRow>,
    /// Mean span M-IoU over the scored responses, per type.
    pub mean_span_miou: BTreeMap<PraiseType, f64>,
}

impl CorrelationTable {
    pub fn row(&self, praise_type: PraiseType, rater: &Rater) -> Option<&CorrelationRow> {
        self.rows
            .iter()
            .find(|r| r.praise_type == praise_type && &r.rater == rater)
    }

    pub fn render_table(&self) -> String {
        let mut out = format!(
            "{:<8} {:<12} {:>6} {:>10} {:>12}\n",
            "type", "rater", "n", "pearson_r", "mean_rating"
        );
        for r in &self.rows {
            let rater = match &r.rater {
                Rater::Coder(id) => id.clone(),
                Rater::Average => "average".to_string(),
            };
            out.push_str(&format!(
                "{:<8} {:<12} {:>6} {:>10.3} {:>12.3}\n",
                r.praise_type, rater, r.joined, r.pearson_r, r.mean_normalized_rating
            ));
        }
        for (ty, m) in &self.mean_span_miou {
            out.push_str(&format!("mean span M-IoU ({ty}): {m:.3}\n"));
        }
        out
    }
}

fn correlate(
    praise_type: PraiseType,
    rater: Rater,
    pairs: &[(f64, f64)],
) -> Result<CorrelationRow, ExperimentError> {
    if pairs.len() < 2 {
        return Err(ExperimentError::InsufficientOverlap {
            praise_type,
            joined: pairs.len(),
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
    let pearson_r = pearson_r(&xs, &ys).map_err(|e| match e {
        MetricError::DegenerateVariance => ExperimentError::DegenerateVariance {
            praise_type,
            rater: format!("{rater:?}"),
        },
        other => other.into(),
    })?;
    Ok(CorrelationRow {
        praise_type,
        joined: pairs.len(),
        mean_normalized_rating: ys.iter().sum::<f64>() / ys.len() as f64,
        rater,
        pearson_r,
    })
}

/// Joins scores and ratings on response id and correlates span M-IoU with
/// each coder's normalized ratings and with the coders' average.
pub fn correlate_ratings(
    scores: &[ScoreRecord],
    ratings: &[RatingRecord],
) -> Result<CorrelationTable, ExperimentError> {
    let mut table = CorrelationTable {
        rows: Vec::new(),
        mean_span_miou: BTreeMap::new(),
    };
    let coders: BTreeSet<&str> = ratings.iter().map(|r| r.coder_id.as_str()).collect();
    for praise_type in PraiseType::ALL {
        let mut score_of: BTreeMap<&str, f64> = BTreeMap::new();
        for s in scores.iter().filter(|s| s.praise_type == praise_type) {
            if score_of
                .insert(&s.response_id, s.span_miou.value())
                .is_some()
            {
                return Err(ExperimentError::DuplicateScore {
                    response_id: s.response_id.clone(),
                    praise_type,
                });
            }
        }
        if !score_of.is_empty() {
            table.mean_span_miou.insert(
                praise_type,
                score_of.values().sum::<f64>() / score_of.len() as f64,
            );
        }
        let mut per_response: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for &coder in &coders {
            let mut pairs = Vec::new();
            for r in ratings.iter().filter(|r| r.coder_id == coder) {
                let Some(&score) = score_of.get(r.response_id.as_str()) else {
                    continue;
                };
                let rating = normalize_likert(r.rating(praise_type))?.value();
                pairs.push((score, rating));
                per_response.entry(&r.response_id).or_default().push(rating);
            }
            table.rows.push(correlate(
                praise_type,
                Rater::Coder(coder.to_string()),
                &pairs,
            )?);
        }
        let avg_pairs: Vec<(f64, f64)> = per_response
            .iter()
            .map(|(id, rs)| (score_of[id], rs.iter().sum::<f64>() / rs.len() as f64))
            .collect();
        table
            .rows
            .push(correlate(praise_type, Rater::Average, &avg_pairs)?);
    }
    Ok(table)
}
