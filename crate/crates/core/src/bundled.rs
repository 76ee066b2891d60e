//! Data shipped with the crate: a three-response mini-corpus with expert
//! spans, recorded model replies for it, and demo replies for the trainer
//! UI.

use crate::annotation::{load_corpus, Corpus};
use crate::llm::{FixtureStore, ReplayClient};

pub const MINI_CORPUS: &str = include_str!("../data/mini_corpus.jsonl");
pub const GPT35_FIXTURES: &str = include_str!("../data/fixtures/gpt-3.5-mini.json");
pub const GPT4_FIXTURES: &str = include_str!("../data/fixtures/gpt-4-mini.json");
pub const DEMO_FIXTURES: &str = include_str!("../data/fixtures/demo.json");

pub const GPT35_MODEL: &str = "gpt-3.5-turbo-0125";
pub const GPT4_MODEL: &str = "gpt-4-0125-preview";

pub fn mini_corpus() -> Corpus {
    load_corpus(MINI_CORPUS.as_bytes()).expect("bundled corpus is valid")
}

fn store(json: &str) -> FixtureStore {
    FixtureStore::from_json(json).expect("bundled fixtures are valid")
}

pub fn gpt35_replay() -> ReplayClient {
    ReplayClient::new(GPT35_MODEL, store(GPT35_FIXTURES))
}

pub fn gpt4_replay() -> ReplayClient {
    ReplayClient::new(GPT4_MODEL, store(GPT4_FIXTURES))
}

/// Demo replies plus the GPT-3.5 replies for the mini-corpus.
pub fn demo_replay() -> ReplayClient {
    let mut fixtures = store(DEMO_FIXTURES);
    fixtures.merge(store(GPT35_FIXTURES));
    ReplayClient::new(format!("{GPT35_MODEL} (replay)"), fixtures)
}
