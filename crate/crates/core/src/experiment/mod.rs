//! The experiment protocol: train/test split, seeded training-size
//! partitions, fine-tuning data, batch evaluation, run summaries and
//! correlation with human ratings.

mod evaluate;
mod finetune;
mod ratings;
mod report;
mod split;

use thiserror::Error;

pub use evaluate::{
    run_evaluation, score_alignment, EvaluationFailure, EvaluationOutcome, ScoreRecord,
};
pub use finetune::{emit_finetune_dataset, finetune_record, FinetuneRecord};
pub use ratings::{
    correlate_ratings, load_ratings, CorrelationRow, CorrelationTable, Rater, RatingRecord,
};
pub use report::{summarize_runs, ReportRow, RunGroup, RunReport};
pub use split::{make_partitions, split_train_test, Partition, PartitionPlan, SplitSpec};

use crate::annotation::PraiseType;
use crate::metrics::MetricError;

/// The partition sizes used for the fine-tuning experiments.
pub const DEFAULT_PARTITION_SIZES: [usize; 5] = [13, 26, 39, 52, 65];
pub const DEFAULT_SEEDS_PER_SIZE: usize = 5;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("corpus of {0} response(s) is too small to split")]
    TooSmall(usize),
    #[error("train fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    #[error("partition size {size} exceeds the {train} training responses")]
    SizeExceedsTrain { size: usize, train: usize },
    #[error("a partition plan needs at least one seed per size")]
    NoSeeds,
    #[error("response `{id}` cannot be used: {reason}")]
    InvalidResponse { id: String, reason: String },
    #[error("no {praise_type} records for size {size}, seed {seed}")]
    EmptyGroup {
        size: usize,
        seed: u64,
        praise_type: PraiseType,
    },
    #[error("only {joined} rating(s) joined to {praise_type} scores; need at least 2")]
    InsufficientOverlap {
        praise_type: PraiseType,
        joined: usize,
    },
    #[error("{praise_type} scores or ratings of {rater} are constant")]
    DegenerateVariance {
        praise_type: PraiseType,
        rater: String,
    },
    #[error("more than one {praise_type} score for response `{response_id}`")]
    DuplicateScore {
        response_id: String,
        praise_type: PraiseType,
    },
    #[error("ratings file: {0}")]
    Ratings(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}
