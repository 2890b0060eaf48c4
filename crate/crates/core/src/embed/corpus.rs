//! Vocabulary construction over sentence corpora.

use std::collections::HashMap;

use super::EmbedError;

/// Token inventory ordered by (count desc, token asc); indices are dense.
#[derive(Debug, Clone)]
pub struct Vocab {
    pub tokens: Vec<String>,
    pub counts: Vec<u64>,
    pub index: HashMap<String, usize>,
    /// True for tokens seen in an edge-label position (odd 0-based offset
    /// in an alternating walk sentence).
    pub is_label: Vec<bool>,
}

impl Vocab {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Sentence tokens mapped to indices; out-of-vocab tokens drop out.
    pub fn encode(&self, sentence: &[String]) -> Vec<usize> {
        sentence
            .iter()
            .filter_map(|t| self.index.get(t).copied())
            .collect()
    }
}

/// One sentence per line, tokens split on single spaces.
pub fn sentences_from_text(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(' ').map(str::to_string).collect())
        .collect()
}

/// Exact counts; tokens under `min_token_count` are dropped.
pub fn build_vocab(sentences: &[Vec<String>], min_token_count: u64) -> Result<Vocab, EmbedError> {
    if sentences.iter().all(|s| s.is_empty()) {
        return Err(EmbedError::EmptyCorpus);
    }
    let mut counts: HashMap<&str, u64> = HashMap::new();
    let mut label_seen: HashMap<&str, bool> = HashMap::new();
    for sentence in sentences {
        for (pos, token) in sentence.iter().enumerate() {
            *counts.entry(token).or_insert(0) += 1;
            let flag = label_seen.entry(token).or_insert(false);
            *flag = *flag || pos % 2 == 1;
        }
    }
    let mut kept: Vec<(&str, u64)> = counts
        .into_iter()
        .filter(|&(_, c)| c >= min_token_count)
        .collect();
    if kept.is_empty() {
        return Err(EmbedError::EmptyVocab);
    }
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let tokens: Vec<String> = kept.iter().map(|(t, _)| t.to_string()).collect();
    let index = tokens
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    Ok(Vocab {
        is_label: kept.iter().map(|(t, _)| label_seen[t]).collect(),
        counts: kept.iter().map(|&(_, c)| c).collect(),
        tokens,
        index,
    })
}
