//! Token-overlap scores between predicted and gold highlights.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{MetricError, UnitScore};
use crate::annotation::Span;

/// Token tallies for one response and one praise type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

impl ConfusionCounts {
    pub fn new(true_positives: usize, false_positives: usize, false_negatives: usize) -> Self {
        ConfusionCounts {
            true_positives,
            false_positives,
            false_negatives,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.true_positives + self.false_positives + self.false_negatives == 0
    }

    /// Counts hallucinated tokens that could not be placed in the text.
    pub fn with_extra_false_positives(mut self, extra: usize) -> Self {
        self.false_positives += extra;
        self
    }
}

/// Weight of false positives in the modified IoU.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct MiouConfig {
    alpha: f64,
}

impl MiouConfig {
    pub const DEFAULT_ALPHA: f64 = 0.2;

    pub fn new(alpha: f64) -> Result<Self, MetricError> {
        if alpha.is_finite() && alpha >= 0.0 {
            Ok(MiouConfig { alpha })
        } else {
            Err(MetricError::InvalidAlpha(alpha))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Default for MiouConfig {
    fn default() -> Self {
        MiouConfig {
            alpha: Self::DEFAULT_ALPHA,
        }
    }
}

impl TryFrom<f64> for MiouConfig {
    type Error = MetricError;

    fn try_from(alpha: f64) -> Result<Self, Self::Error> {
        MiouConfig::new(alpha)
    }
}

impl From<MiouConfig> for f64 {
    fn from(cfg: MiouConfig) -> f64 {
        cfg.alpha
    }
}

pub fn confusion_counts(pred: &BTreeSet<usize>, gold: &BTreeSet<usize>) -> ConfusionCounts {
    ConfusionCounts {
        true_positives: pred.intersection(gold).count(),
        false_positives: pred.difference(gold).count(),
        false_negatives: gold.difference(pred).count(),
    }
}

/// Token indices covered by any of `spans`.
pub fn token_set<'a>(spans: impl IntoIterator<Item = &'a Span>) -> BTreeSet<usize> {
    spans.into_iter().flat_map(|s| s.indices()).collect()
}

/// `tp / (tp + fp_weight * fp + fn)`, or 1 when nothing was predicted or
/// expected.
fn weighted_ratio(c: ConfusionCounts, fp_weight: f64, fn_weight: f64) -> UnitScore {
    if c.is_empty() {
        return UnitScore::ONE;
    }
    let tp = c.true_positives as f64;
    let denom = tp + fp_weight * c.false_positives as f64 + fn_weight * c.false_negatives as f64;
    if denom == 0.0 {
        // Only reachable with alpha = 0 and nothing but false positives.
        return UnitScore::ZERO;
    }
    UnitScore::clamped(tp / denom)
}

pub fn f1_score(c: ConfusionCounts) -> UnitScore {
    weighted_ratio(c, 0.5, 0.5)
}

pub fn iou_score(c: ConfusionCounts) -> UnitScore {
    weighted_ratio(c, 1.0, 1.0)
}

/// Modified IoU: false positives are down-weighted by `alpha`.
pub fn token_miou(c: ConfusionCounts, cfg: MiouConfig) -> UnitScore {
    weighted_ratio(c, cfg.alpha, 1.0)
}

/// A connected group of overlapping predicted and gold spans.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanCluster {
    pub predicted: Vec<Span>,
    pub gold: Vec<Span>,
    pub counts: ConfusionCounts,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Groups spans into clusters linked by shared tokens. Clusters come back
/// ordered by their first token.
pub fn span_clusters(pred: &[Span], gold: &[Span]) -> Vec<SpanCluster> {
    let n = pred.len() + gold.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for (i, p) in pred.iter().enumerate() {
        for (j, g) in gold.iter().enumerate() {
            if p.overlaps(g) {
                let a = find(&mut parent, i);
                let b = find(&mut parent, pred.len() + j);
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut clusters: Vec<SpanCluster> = Vec::new();
    for k in 0..n {
        let root = find(&mut parent, k);
        let slot = match roots.iter().position(|&r| r == root) {
            Some(pos) => pos,
            None => {
                roots.push(root);
                clusters.push(SpanCluster {
                    predicted: Vec::new(),
                    gold: Vec::new(),
                    counts: ConfusionCounts::default(),
                });
                clusters.len() - 1
            }
        };
        if k < pred.len() {
            clusters[slot].predicted.push(pred[k]);
        } else {
            clusters[slot].gold.push(gold[k - pred.len()]);
        }
    }
    for c in &mut clusters {
        c.predicted.sort();
        c.gold.sort();
        c.counts = confusion_counts(&token_set(&c.predicted), &token_set(&c.gold));
    }
    clusters.sort_by_key(|c| {
        c.predicted
            .iter()
            .chain(&c.gold)
            .map(|s| s.start)
            .min()
            .unwrap_or(usize::MAX)
    });
    clusters
}

/// Mean modified IoU over span clusters of one praise type.
pub fn span_miou(pred: &[Span], gold: &[Span], cfg: MiouConfig) -> UnitScore {
    span_miou_with_unplaced(pred, gold, &[], cfg)
}

/// Like [`span_miou`], with extra predicted phrases that could not be found
/// in the text. Each one is its own cluster made only of `n` false-positive
/// tokens; phrases with no tokens are ignored.
pub fn span_miou_with_unplaced(
    pred: &[Span],
    gold: &[Span],
    unplaced_token_counts: &[usize],
    cfg: MiouConfig,
) -> UnitScore {
    let clusters = span_clusters(pred, gold);
    let scores: Vec<f64> = clusters
        .iter()
        .map(|c| token_miou(c.counts, cfg).value())
        .chain(
            unplaced_token_counts
                .iter()
                .filter(|&&n| n > 0)
                .map(|&n| token_miou(ConfusionCounts::new(0, n, 0), cfg).value()),
        )
        .collect();
    if scores.is_empty() {
        return UnitScore::ONE;
    }
    UnitScore::clamped(scores.iter().sum::<f64>() / scores.len() as f64)
}
