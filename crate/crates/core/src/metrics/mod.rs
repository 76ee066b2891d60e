//! Scoring math: overlap scores, the modified IoU family, agreement
//! statistics and summaries over runs.

mod agreement;
mod overlap;
mod stats;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use agreement::{cohen_kappa, normalize_likert, pearson_r};
pub use overlap::{
    confusion_counts, f1_score, iou_score, span_clusters, span_miou, span_miou_with_unplaced,
    token_miou, token_set, ConfusionCounts, MiouConfig, SpanCluster,
};
pub use stats::{aggregate, SummaryStats};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("alpha must be a finite number >= 0, got {0}")]
    InvalidAlpha(f64),
    #[error("sequences differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {needed} values, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("a sequence has zero variance")]
    DegenerateVariance,
    #[error("rating {0} is outside 1..=5")]
    RatingOutOfRange(u8),
    #[error("no values to aggregate")]
    EmptyInput,
}

/// A score in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct UnitScore(f64);

impl UnitScore {
    pub const ZERO: UnitScore = UnitScore(0.0);
    pub const ONE: UnitScore = UnitScore(1.0);

    pub fn new(value: f64) -> Option<Self> {
        (0.0..=1.0).contains(&value).then_some(UnitScore(value))
    }

    pub(crate) fn clamped(value: f64) -> Self {
        UnitScore(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for UnitScore {
    type Error = String;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        UnitScore::new(value).ok_or_else(|| format!("{value} is outside [0, 1]"))
    }
}

impl From<UnitScore> for f64 {
    fn from(s: UnitScore) -> f64 {
        s.0
    }
}

impl fmt::Display for UnitScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}
