use std::collections::BTreeSet;

use praise_core::annotation::{
    label_distribution, AnnotatedResponse, Corpus, PraiseLabel, PraiseType, SpanSource,
};
use praise_core::bundled;
use praise_core::experiment::{
    correlate_ratings, make_partitions, split_train_test, summarize_runs, PartitionPlan, Rater,
    RatingRecord, RunGroup, ScoreRecord, SplitSpec, DEFAULT_PARTITION_SIZES,
    DEFAULT_SEEDS_PER_SIZE,
};
use praise_core::metrics::{cohen_kappa, normalize_likert, pearson_r, UnitScore};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn synthetic(n: usize) -> Corpus {
    Corpus::new(
        (0..n)
            .map(|i| {
                AnnotatedResponse::new(format!("resp-{i:03}"), "You worked hard on this", [])
                    .unwrap()
            })
            .collect(),
    )
    .unwrap()
}

fn ids(c: &Corpus) -> BTreeSet<String> {
    c.ids().into_iter().map(str::to_string).collect()
}

#[test]
fn split_129_in_half() {
    let corpus = synthetic(129);
    let (train, test) = split_train_test(
        &corpus,
        SplitSpec {
            train_fraction: 0.5,
            seed: 11,
        },
    )
    .unwrap();
    assert_eq!((train.len(), test.len()), (65, 64));
    assert!(ids(&train).is_disjoint(&ids(&test)));
    assert_eq!(ids(&train).union(&ids(&test)).count(), 129);
    let again = split_train_test(
        &corpus,
        SplitSpec {
            train_fraction: 0.5,
            seed: 11,
        },
    )
    .unwrap();
    assert_eq!(again, (train, test));
}

#[test]
fn partition_grid_is_reproducible_per_seed() {
    let corpus = synthetic(129);
    let (train, _) = split_train_test(
        &corpus,
        SplitSpec {
            train_fraction: 0.5,
            seed: 11,
        },
    )
    .unwrap();
    let plan = PartitionPlan {
        sizes: DEFAULT_PARTITION_SIZES.to_vec(),
        seeds_per_size: DEFAULT_SEEDS_PER_SIZE,
        base_seed: 40,
    };
    let parts = make_partitions(&train, &plan).unwrap();
    assert_eq!(parts.len(), 25);
    let train_ids = ids(&train);
    for p in &parts {
        assert_eq!(p.subset.len(), p.size);
        assert!(ids(&p.subset).is_subset(&train_ids));
    }
    let seeds: BTreeSet<u64> = parts.iter().map(|p| p.seed).collect();
    assert_eq!(seeds, (40..45).collect());
    // each (size, seed) can be regenerated alone
    for p in &parts {
        let single = PartitionPlan {
            sizes: vec![p.size],
            seeds_per_size: 1,
            base_seed: p.seed,
        };
        assert_eq!(make_partitions(&train, &single).unwrap()[0], *p);
    }
}

#[test]
fn mini_corpus_label_distribution() {
    let dist = label_distribution(&bundled::mini_corpus(), SpanSource::Gold).unwrap();
    assert_eq!(dist.total, 44);
    assert_eq!(dist.count(PraiseLabel::O), 24);
    assert_eq!(dist.count(PraiseLabel::IEffort), 14);
    assert_eq!(dist.count(PraiseLabel::IOutcome), 6);
    assert!((dist.percentage(PraiseLabel::IEffort) - 100.0 * 14.0 / 44.0).abs() < 1e-12);
}

#[test]
fn likert_and_pearson_anchors() {
    assert_eq!(normalize_likert(1).unwrap().value(), 0.0);
    assert_eq!(normalize_likert(3).unwrap().value(), 0.5);
    assert_eq!(normalize_likert(5).unwrap().value(), 1.0);
    assert!(normalize_likert(0).is_err() && normalize_likert(6).is_err());
    let xs = [0.1, 0.4, 0.35, 0.9, 0.72, 0.05];
    let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
    assert!((pearson_r(&xs, &xs).unwrap() - 1.0).abs() < 1e-12);
    assert!((pearson_r(&xs, &neg).unwrap() + 1.0).abs() < 1e-12);
}

#[test]
fn kappa_on_label_sequences() {
    use PraiseLabel::*;
    let a = [O, O, IEffort, IEffort, IOutcome, O];
    let b = [O, IEffort, IEffort, IEffort, IOutcome, O];
    // po = 5/6; pe = (3*2 + 2*3 + 1*1)/36 = 13/36
    let expected = (5.0 / 6.0 - 13.0 / 36.0) / (1.0 - 13.0 / 36.0);
    assert!((cohen_kappa(&a, &b).unwrap() - expected).abs() < 1e-12);
}

fn score(id: &str, ty: PraiseType, v: f64) -> ScoreRecord {
    let s = UnitScore::new(v).unwrap();
    ScoreRecord {
        response_id: id.into(),
        praise_type: ty,
        span_miou: s,
        token_miou: s,
        f1: s,
        iou: s,
    }
}

#[test]
fn monotone_ratings_correlate_strongly() {
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let mut scores = Vec::new();
    let mut ratings = Vec::new();
    for i in 0..40 {
        let id = format!("resp-{i:03}");
        let e: f64 = rng.random();
        let o: f64 = rng.random();
        scores.push(score(&id, PraiseType::Effort, e));
        scores.push(score(&id, PraiseType::Outcome, o));
        for coder in ["coder-a", "coder-b"] {
            ratings.push(RatingRecord {
                response_id: id.clone(),
                coder_id: coder.into(),
                effort_rating: 1 + (4.0 * e).round() as u8,
                outcome_rating: 1 + (4.0 * o).round() as u8,
            });
        }
    }
    let table = correlate_ratings(&scores, &ratings).unwrap();
    assert_eq!(table.rows.len(), 6);
    for row in &table.rows {
        assert_eq!(row.joined, 40);
        assert!(
            row.pearson_r > 0.9,
            "{:?} {:?}: {}",
            row.praise_type,
            row.rater,
            row.pearson_r
        );
    }
    assert!(table.row(PraiseType::Effort, &Rater::Average).is_some());
}

proptest! {
    #[test]
    fn summaries_ignore_record_and_group_order(
        values in prop::collection::vec((0u64..3, 0usize..4, 0.0f64..=1.0, 0.0f64..=1.0), 1..30),
        rotate in 0usize..30,
    ) {
        let groups: Vec<RunGroup> = (0..3u64)
            .map(|seed| RunGroup {
                size: 13,
                seed,
                records: values
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| v.0 == seed)
                    .flat_map(|(i, v)| {
                        let id = format!("r{i}-{}", v.1);
                        [score(&id, PraiseType::Effort, v.2), score(&id, PraiseType::Outcome, v.3)]
                    })
                    .collect(),
            })
            .filter(|g| !g.records.is_empty())
            .collect();
        let base = summarize_runs(&groups).unwrap();
        let mut shuffled = groups.clone();
        shuffled.reverse();
        for g in &mut shuffled {
            let k = rotate % g.records.len();
            g.records.rotate_left(k);
        }
        prop_assert_eq!(summarize_runs(&shuffled).unwrap(), base);
    }
}
