use std::time::Instant;

use praise_core::annotation::{PraiseType, Span};
use praise_core::bundled;
use praise_core::experiment::run_evaluation;
use praise_core::metrics::{span_miou, MiouConfig};

/// (model, predicted effort, predicted outcome, reference effort, reference outcome)
type ModelRow = (&'static str, Vec<Span>, Vec<Span>, f64, f64);

struct Row {
    id: &'static str,
    gold_effort: Vec<Span>,
    gold_outcome: Vec<Span>,
    models: Vec<ModelRow>,
}

fn s(a: usize, b: usize) -> Span {
    Span::new(a, b)
}

fn rows() -> Vec<Row> {
    vec![
        Row {
            id: "mini-01",
            gold_effort: vec![s(7, 10)],
            gold_outcome: vec![s(5, 7)],
            models: vec![
                ("gpt-3.5", vec![s(3, 7), s(7, 10)], vec![], 0.50, 0.0),
                (
                    "gpt-4",
                    vec![s(7, 10), s(10, 14)],
                    vec![s(3, 7)],
                    0.50,
                    0.83,
                ),
            ],
        },
        Row {
            id: "mini-02",
            gold_effort: vec![s(3, 10)],
            gold_outcome: vec![s(0, 2)],
            models: vec![
                ("gpt-3.5", vec![s(6, 13)], vec![s(0, 2)], 0.53, 1.00),
                ("gpt-4", vec![s(3, 10)], vec![s(0, 2)], 1.00, 1.00),
            ],
        },
        Row {
            id: "mini-03",
            gold_effort: vec![s(4, 8)],
            gold_outcome: vec![s(0, 2)],
            models: vec![
                (
                    "gpt-3.5",
                    vec![s(3, 8), s(8, 17)],
                    vec![s(0, 2)],
                    0.48,
                    1.00,
                ),
                ("gpt-4", vec![s(3, 8), s(8, 17)], vec![s(0, 2)], 0.48, 1.00),
            ],
        },
    ]
}

#[test]
fn reference_scores_from_spans() {
    let started = Instant::now();
    let cfg = MiouConfig::default();
    for row in rows() {
        for (model, effort, outcome, want_e, want_o) in &row.models {
            let e = span_miou(effort, &row.gold_effort, cfg).value();
            let o = span_miou(outcome, &row.gold_outcome, cfg).value();
            assert!(
                (e - want_e).abs() <= 0.005,
                "{} {model} effort {e:.4} vs {want_e}",
                row.id
            );
            assert!(
                (o - want_o).abs() <= 0.005,
                "{} {model} outcome {o:.4} vs {want_o}",
                row.id
            );
        }
    }
    assert!(started.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn exact_fractions() {
    let cfg = MiouConfig::default();
    let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
    assert!(close(
        span_miou(&[s(3, 7)], &[s(5, 7)], cfg).value(),
        2.0 / 2.4
    ));
    assert!(close(
        span_miou(&[s(6, 13)], &[s(3, 10)], cfg).value(),
        4.0 / 7.6
    ));
    assert!(close(
        span_miou(&[s(3, 8), s(8, 17)], &[s(4, 8)], cfg).value(),
        (4.0 / 4.2) / 2.0
    ));
}

#[test]
fn bundled_corpus_tokens_line_up() {
    let corpus = bundled::mini_corpus();
    let expected = [(14, 7..10, 5..7), (13, 3..10, 0..2), (17, 4..8, 0..2)];
    for (response, (n, effort, outcome)) in corpus.responses().iter().zip(expected) {
        assert_eq!(response.tokens().len(), n, "{}", response.id());
        assert_eq!(
            response.gold_of(PraiseType::Effort),
            [Span::new(effort.start, effort.end)]
        );
        assert_eq!(
            response.gold_of(PraiseType::Outcome),
            [Span::new(outcome.start, outcome.end)]
        );
    }
}

#[tokio::test]
async fn replayed_models_reproduce_reference_scores() {
    let corpus = bundled::mini_corpus();
    let rows = rows();
    for (index, client) in [bundled::gpt35_replay(), bundled::gpt4_replay()]
        .iter()
        .enumerate()
    {
        let outcome = run_evaluation(client, &corpus, MiouConfig::default(), 2).await;
        assert!(outcome.errors.is_empty(), "{:?}", outcome.errors);
        assert_eq!(outcome.records.len(), 6);
        for row in &rows {
            let (model, _, _, want_e, want_o) = &row.models[index];
            for r in outcome.records.iter().filter(|r| r.response_id == row.id) {
                let want = match r.praise_type {
                    PraiseType::Effort => want_e,
                    PraiseType::Outcome => want_o,
                };
                assert!(
                    (r.span_miou.value() - want).abs() <= 0.005,
                    "{} {model} {}: {} vs {want}",
                    row.id,
                    r.praise_type,
                    r.span_miou
                );
            }
        }
    }
}
