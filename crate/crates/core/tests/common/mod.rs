//! Independent reference implementations used by several test targets.
#![allow(dead_code)]

use praise_core::annotation::Span;

/// A span tagged with the side it came from, as a token bitmask.
#[derive(Debug, Clone, Copy)]
pub struct Item {
    pub gold: bool,
    pub start: usize,
    pub mask: u32,
}

pub fn items(pred: &[Span], gold: &[Span]) -> Vec<Item> {
    let mask = |s: &Span| (s.start..s.end).fold(0u32, |m, i| m | (1 << i));
    pred.iter()
        .map(|s| Item {
            gold: false,
            start: s.start,
            mask: mask(s),
        })
        .chain(gold.iter().map(|s| Item {
            gold: true,
            start: s.start,
            mask: mask(s),
        }))
        .collect()
}

/// Every partition of `0..n` into blocks, as block-id vectors in
/// restricted-growth form.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let next = prefix.iter().copied().max().map_or(0, |m| m + 1);
        for b in 0..=next {
            prefix.push(b);
            grow(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::with_capacity(n), n, &mut out);
    out
}

fn linked(a: &Item, b: &Item) -> bool {
    a.gold != b.gold && a.mask & b.mask != 0
}

/// A partition is admissible when no linked pair is split across blocks
/// and every block is connected through links.
fn admissible(items: &[Item], blocks: &[usize]) -> bool {
    for i in 0..items.len() {
        for j in 0..items.len() {
            if linked(&items[i], &items[j]) && blocks[i] != blocks[j] {
                return false;
            }
        }
    }
    let count = blocks.iter().copied().max().map_or(0, |m| m + 1);
    for b in 0..count {
        let members: Vec<usize> = (0..items.len()).filter(|&i| blocks[i] == b).collect();
        let mut reached = vec![members[0]];
        let mut frontier = vec![members[0]];
        while let Some(x) = frontier.pop() {
            for &y in &members {
                if !reached.contains(&y) && linked(&items[x], &items[y]) {
                    reached.push(y);
                    frontier.push(y);
                }
            }
        }
        if reached.len() != members.len() {
            return false;
        }
    }
    true
}

pub fn ratio(tp: u32, fp: u32, fn_: u32, alpha: f64) -> f64 {
    if tp + fp + fn_ == 0 {
        return 1.0;
    }
    let denom = tp as f64 + alpha * fp as f64 + fn_ as f64;
    if denom == 0.0 {
        0.0
    } else {
        tp as f64 / denom
    }
}

/// Span-level modified IoU by exhaustive search over set partitions: the
/// admissible partitions are enumerated, the finest one is scored block by
/// block and the block scores are averaged in order of first token.
pub fn brute_force_span_miou(pred: &[Span], gold: &[Span], alpha: f64) -> (f64, usize) {
    let items = items(pred, gold);
    if items.is_empty() {
        return (1.0, 1);
    }
    let candidates: Vec<Vec<usize>> = set_partitions(items.len())
        .into_iter()
        .filter(|p| admissible(&items, p))
        .collect();
    let finest = candidates
        .iter()
        .max_by_key(|p| p.iter().copied().max().unwrap() + 1)
        .unwrap();
    let count = finest.iter().copied().max().unwrap() + 1;
    let mut blocks: Vec<(usize, f64)> = (0..count)
        .map(|b| {
            let (mut p, mut g, mut first) = (0u32, 0u32, usize::MAX);
            for (it, _) in items.iter().zip(finest).filter(|(_, &blk)| blk == b) {
                if it.gold {
                    g |= it.mask;
                } else {
                    p |= it.mask;
                }
                first = first.min(it.start);
            }
            let score = ratio(
                (p & g).count_ones(),
                (p & !g).count_ones(),
                (g & !p).count_ones(),
                alpha,
            );
            (first, score)
        })
        .collect();
    blocks.sort_by_key(|b| b.0);
    let sum: f64 = blocks.iter().map(|b| b.1).sum();
    (sum / blocks.len() as f64, candidates.len())
}

/// Cuts `0..n` at random points and keeps a random subset of the pieces,
/// giving disjoint, possibly adjacent spans.
pub fn random_spans(rng: &mut impl rand::Rng, n: usize) -> Vec<Span> {
    let mut cuts: Vec<usize> = (1..n).filter(|_| rng.random_bool(0.35)).collect();
    cuts.insert(0, 0);
    cuts.push(n);
    cuts.windows(2)
        .filter(|_| rng.random_bool(0.4))
        .map(|w| Span::new(w[0], w[1]))
        .collect()
}
