use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::annotation::Corpus;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn train_size(&self, corpus_size: usize) -> usize {
        (self.train_fraction * corpus_size as f64).round() as usize
    }
}

/// Training-set sizes to sample, each repeated with `seeds_per_size` seeds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionPlan {
    pub sizes: Vec<usize>,
    pub seeds_per_size: usize,
    /// Seeds are `base_seed, base_seed + 1, ...`; every size reuses them.
    pub base_seed: u64,
}

impl PartitionPlan {
    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.seeds_per_size as u64).map(move |k| self.base_seed.wrapping_add(k))
    }
}

/// One sampled training subset.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub size: usize,
    pub seed: u64,
    pub subset: Corpus,
}

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Shuffles with `spec.seed` and cuts a train prefix of
/// `round(fraction * n)` responses.
pub fn split_train_test(
    corpus: &Corpus,
    spec: SplitSpec,
) -> Result<(Corpus, Corpus), ExperimentError> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(ExperimentError::InvalidFraction(spec.train_fraction));
    }
    if corpus.len() < 2 {
        return Err(ExperimentError::TooSmall(corpus.len()));
    }
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    order.shuffle(&mut rng(spec.seed));
    let cut = spec.train_size(corpus.len());
    let pick = |idx: &[usize]| {
        Corpus::from_unique(idx.iter().map(|&i| corpus.responses()[i].clone()).collect())
    };
    Ok((pick(&order[..cut]), pick(&order[cut..])))
}

/// Seeded samples without replacement from the training set, kept in
/// training-set order.
pub fn make_partitions(
    train: &Corpus,
    plan: &PartitionPlan,
) -> Result<Vec<Partition>, ExperimentError> {
    if plan.seeds_per_size == 0 {
        return Err(ExperimentError::NoSeeds);
    }
    if let Some(&too_big) = plan.sizes.iter().find(|&&s| s > train.len()) {
        return Err(ExperimentError::SizeExceedsTrain {
            size: too_big,
            train: train.len(),
        });
    }
    let mut out = Vec::with_capacity(plan.sizes.len() * plan.seeds_per_size);
    for &size in &plan.sizes {
        for seed in plan.seeds() {
            let mut picked = index::sample(&mut rng(seed), train.len(), size).into_vec();
            picked.sort_unstable();
            let subset = Corpus::from_unique(
                picked
                    .into_iter()
                    .map(|i| train.responses()[i].clone())
                    .collect(),
            );
            out.push(Partition { size, seed, subset });
        }
    }
    Ok(out)
}
