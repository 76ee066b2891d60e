mod common;

use praise_core::annotation::Span;
use praise_core::metrics::{
    f1_score, iou_score, span_miou, token_miou, ConfusionCounts, MiouConfig,
};
use proptest::prelude::*;

fn counts() -> impl Strategy<Value = ConfusionCounts> {
    (0usize..200, 0usize..200, 0usize..200)
        .prop_map(|(tp, fp, fn_)| ConfusionCounts::new(tp, fp, fn_))
}

fn cfg(alpha: f64) -> MiouConfig {
    MiouConfig::new(alpha).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn alpha_one_is_iou(c in counts()) {
        prop_assert_eq!(token_miou(c, cfg(1.0)), iou_score(c));
    }

    #[test]
    fn f1_dominates_iou(c in counts()) {
        prop_assert!(f1_score(c).value() >= iou_score(c).value());
    }

    #[test]
    fn miou_non_increasing_in_alpha(c in counts(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(token_miou(c, cfg(lo)).value() >= token_miou(c, cfg(hi)).value());
    }

    #[test]
    fn scores_are_unit(c in counts(), a in 0.0f64..=1.0) {
        for s in [f1_score(c), iou_score(c), token_miou(c, cfg(a))] {
            prop_assert!((0.0..=1.0).contains(&s.value()));
        }
    }

    #[test]
    fn matches_direct_formula(c in counts(), a in 0.0f64..=1.0) {
        let expected = common::ratio(
            c.true_positives as u32,
            c.false_positives as u32,
            c.false_negatives as u32,
            a,
        );
        prop_assert_eq!(token_miou(c, cfg(a)).value(), expected);
    }

    #[test]
    fn single_overlapping_pair_equals_token_level(
        n in 1usize..40,
        (a, b, c, d) in (0usize..40, 0usize..40, 0usize..40, 0usize..40),
        alpha in 0.0f64..=1.0,
    ) {
        let mk = |x: usize, y: usize| {
            let (lo, hi) = (x.min(y) % n, x.max(y) % n);
            Span::new(lo.min(hi), lo.max(hi) + 1)
        };
        let (p, g) = (mk(a, b), mk(c, d));
        prop_assume!(p.overlaps(&g));
        let pred: std::collections::BTreeSet<usize> = p.indices().collect();
        let gold: std::collections::BTreeSet<usize> = g.indices().collect();
        let counts = praise_core::metrics::confusion_counts(&pred, &gold);
        prop_assert_eq!(span_miou(&[p], &[g], cfg(alpha)), token_miou(counts, cfg(alpha)));
    }
}

#[test]
fn all_zero_counts_score_one() {
    let zero = ConfusionCounts::default();
    assert_eq!(iou_score(zero).value(), 1.0);
    assert_eq!(f1_score(zero).value(), 1.0);
    for a in [0.0, 0.2, 1.0] {
        assert_eq!(token_miou(zero, cfg(a)).value(), 1.0);
    }
    assert_eq!(span_miou(&[], &[], MiouConfig::default()).value(), 1.0);
}

#[test]
fn only_false_positives_with_zero_alpha() {
    assert_eq!(
        token_miou(ConfusionCounts::new(0, 5, 0), cfg(0.0)).value(),
        0.0
    );
}

#[test]
fn negative_or_non_finite_alpha_is_rejected() {
    for a in [-0.1, f64::NAN, f64::INFINITY] {
        assert!(MiouConfig::new(a).is_err());
    }
    // weights above one penalize false positives more than plain IoU
    let c = ConfusionCounts::new(2, 2, 0);
    assert!(token_miou(c, cfg(1.5)).value() < iou_score(c).value());
}
