//! Deterministic skip-gram training loop.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use super::corpus::build_vocab;
use super::sgns::SgnsModel;
use super::table::EmbeddingTable;
use super::EmbedError;
use crate::seed;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f64,
    pub min_lr: f64,
    pub noise_exponent: f64,
    pub min_token_count: u64,
    /// Frequency threshold for word2vec-style subsampling; off by default.
    pub subsample: Option<f64>,
    pub rng_seed: u64,
    /// Sequential, seed-reproducible, bit-stable run.
    pub deterministic: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            min_lr: 1e-4,
            noise_exponent: 0.75,
            min_token_count: 1,
            subsample: None,
            rng_seed: 0,
            deterministic: true,
        }
    }
}

fn validate(cfg: &TrainConfig) -> Result<(), EmbedError> {
    let bad = |m| Err(EmbedError::InvalidConfig(m));
    if cfg.dim < 1 {
        return bad("dim must be >= 1");
    }
    if cfg.window < 1 {
        return bad("window must be >= 1");
    }
    if cfg.negatives < 1 {
        return bad("negatives must be >= 1");
    }
    if cfg.epochs < 1 {
        return bad("epochs must be >= 1");
    }
    if !(cfg.min_lr > 0.0 && cfg.min_lr <= cfg.initial_lr) {
        return bad("learning rates must satisfy 0 < min_lr <= initial_lr");
    }
    if !cfg.noise_exponent.is_finite() {
        return bad("noise_exponent must be finite");
    }
    Ok(())
}

/// Cumulative unigram^exponent weights; sampling is a binary search.
struct NoiseTable {
    cumulative: Vec<f64>,
}

impl NoiseTable {
    fn new(counts: &[u64], exponent: f64) -> NoiseTable {
        let mut cumulative = Vec::with_capacity(counts.len());
        let mut acc = 0.0;
        for &c in counts {
            acc += (c as f64).powf(exponent);
            cumulative.push(acc);
        }
        NoiseTable { cumulative }
    }

    fn sample(&self, rng: &mut ChaCha12Rng) -> usize {
        let total = *self.cumulative.last().expect("nonempty vocab");
        let r = rng.random::<f64>() * total;
        self.cumulative.partition_point(|&c| c <= r).min(self.cumulative.len() - 1)
    }
}

#[derive(Debug, Clone, Default)]
pub struct TrainReport {
    pub epoch_mean_loss: Vec<f64>,
    pub pairs_trained: u64,
}

fn corpus_fingerprint(sentences: &[Vec<String>]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    for sentence in sentences {
        for token in sentence {
            eat(token.as_bytes());
            eat(b" ");
        }
        eat(b"\n");
    }
    h
}

pub fn train(sentences: &[Vec<String>], cfg: &TrainConfig) -> Result<EmbeddingTable, EmbedError> {
    train_with_report(sentences, cfg).map(|(table, _)| table)
}

/// The learning rate decays linearly per center position, hitting `min_lr`
/// at the final position of the final epoch. A subsampled-out position
/// still consumes its schedule slot.
pub fn train_with_report(
    sentences: &[Vec<String>],
    cfg: &TrainConfig,
) -> Result<(EmbeddingTable, TrainReport), EmbedError> {
    validate(cfg)?;
    let vocab = build_vocab(sentences, cfg.min_token_count)?;
    let encoded: Vec<Vec<usize>> = sentences.iter().map(|s| vocab.encode(s)).collect();
    let total_tokens: u64 = vocab.counts.iter().sum();
    let positions_per_epoch: usize = encoded.iter().map(Vec::len).sum();
    let total_positions = (cfg.epochs * positions_per_epoch) as u64;

    let noise = NoiseTable::new(&vocab.counts, cfg.noise_exponent);
    let mut model = SgnsModel::new(
        vocab.len(),
        cfg.dim,
        seed::derive(cfg.rng_seed, "embedding-init"),
    );
    let mut rng = ChaCha12Rng::seed_from_u64(seed::derive(cfg.rng_seed, "embedding-train"));

    let mut report = TrainReport::default();
    let mut position: u64 = 0;
    let lr_at = |position: u64| {
        if total_positions <= 1 {
            return cfg.initial_lr;
        }
        let t = position as f64 / (total_positions - 1) as f64;
        cfg.initial_lr - (cfg.initial_lr - cfg.min_lr) * t
    };

    for _ in 0..cfg.epochs {
        let mut epoch_loss = 0.0;
        let mut epoch_pairs = 0u64;
        for sentence in &encoded {
            let kept: Vec<usize> = match cfg.subsample {
                None => sentence.clone(),
                Some(threshold) => sentence
                    .iter()
                    .copied()
                    .filter(|&w| {
                        let f = vocab.counts[w] as f64 / total_tokens as f64;
                        let keep = ((threshold / f).sqrt() + threshold / f).min(1.0);
                        rng.random::<f64>() < keep
                    })
                    .collect(),
            };
            for (i, &center) in kept.iter().enumerate() {
                let lr = lr_at(position);
                position += 1;
                let b = rng.random_range(1..=cfg.window);
                let lo = i.saturating_sub(b);
                let hi = (i + b).min(kept.len().saturating_sub(1));
                for j in lo..=hi {
                    if j == i {
                        continue;
                    }
                    let context = kept[j];
                    let mut negatives = Vec::with_capacity(cfg.negatives);
                    for _ in 0..cfg.negatives {
                        let mut pick = noise.sample(&mut rng);
                        let mut tries = 0;
                        while pick == context && tries < 100 {
                            pick = noise.sample(&mut rng);
                            tries += 1;
                        }
                        negatives.push(pick);
                    }
                    epoch_loss += model.step(center, context, &negatives, lr);
                    epoch_pairs += 1;
                }
            }
            // a subsample pass that kept nothing still burns its slots
            position += (sentence.len() - kept.len()) as u64;
        }
        report
            .epoch_mean_loss
            .push(if epoch_pairs == 0 { 0.0 } else { epoch_loss / epoch_pairs as f64 });
        report.pairs_trained += epoch_pairs;
    }

    if model.input.iter().chain(model.output.iter()).any(|x| !x.is_finite()) {
        return Err(EmbedError::NonFinite("trained embedding table"));
    }

    let table = EmbeddingTable {
        dim: cfg.dim,
        index: vocab
            .tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect(),
        tokens: vocab.tokens,
        counts: vocab.counts,
        is_label: vocab.is_label,
        input: model.input,
        output: model.output,
        corpus_fingerprint: corpus_fingerprint(sentences),
        config: Some(cfg.clone()),
    };
    Ok((table, report))
}
