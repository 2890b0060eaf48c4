//! Random-walk corpus generation.
//!
//! A walk is an alternating token sequence `node, label, node, ..., node`;
//! outgoing edges contribute their forward label, incoming edges (direction
//! `both`) their inverse label. Steps choose uniformly among the available
//! edge traversals. Each start node draws from its own RNG stream derived
//! from (seed, node id), so walk output is independent of scheduling.
//!
//! Exported corpora are space-delimited, one walk per line; spaces inside
//! names become `_` and a token table keeps the reverse mapping. Two names
//! that mangle to the same token are both written to the table; loading
//! such a table reports the collision.

use std::collections::BTreeMap;
use std::io::Write;

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use crate::graph::{Direction, KnowledgeGraph, NodeId};
use crate::seed;

#[derive(Debug, Clone)]
pub struct WalkConfig {
    pub walks_per_node: usize,
    /// Node tokens per walk; the token list has 2n-1 entries when no dead
    /// end is hit.
    pub walk_length_nodes: usize,
    pub direction: Direction,
    pub rng_seed: u64,
    /// On a dead end before full length, retry the walk from its start node
    /// (bounded) instead of keeping the first truncation.
    pub restart_on_deadend: bool,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            walks_per_node: 10,
            walk_length_nodes: 20,
            direction: Direction::Both,
            rng_seed: 0,
            restart_on_deadend: false,
        }
    }
}

const RESTART_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct Walk {
    pub tokens: Vec<String>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum WalkError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("bad walk config: {0}")]
    InvalidConfig(&'static str),
}

fn validate_config(cfg: &WalkConfig) -> Result<(), WalkError> {
    if cfg.walks_per_node < 1 {
        return Err(WalkError::InvalidConfig("walks_per_node must be >= 1"));
    }
    if cfg.walk_length_nodes < 1 {
        return Err(WalkError::InvalidConfig("walk_length_nodes must be >= 1"));
    }
    if cfg.direction == Direction::In {
        return Err(WalkError::InvalidConfig(
            "walk direction must be `out` or `both`",
        ));
    }
    Ok(())
}

fn walk_once(
    g: &KnowledgeGraph,
    cfg: &WalkConfig,
    start: NodeId,
    rng: &mut ChaCha12Rng,
) -> Walk {
    let mut tokens = vec![g.node(start).name.clone()];
    let mut current = start;
    for _ in 1..cfg.walk_length_nodes {
        let options = g.neighbors(current, cfg.direction);
        if options.is_empty() {
            break;
        }
        let (label, next) = &options[rng.random_range(0..options.len())];
        tokens.push(label.to_string());
        tokens.push(g.node(*next).name.clone());
        current = *next;
    }
    Walk { tokens }
}

/// Exactly `walks_per_node * node_count` walks, grouped by start node in id
/// order. Deterministic for a given (graph, config).
pub fn generate_walks(g: &KnowledgeGraph, cfg: &WalkConfig) -> Result<Vec<Walk>, WalkError> {
    validate_config(cfg)?;
    if g.node_count() == 0 {
        return Err(WalkError::EmptyGraph);
    }
    let full_len = 2 * cfg.walk_length_nodes - 1;
    let mut corpus = Vec::with_capacity(cfg.walks_per_node * g.node_count());
    for start in g.node_ids() {
        let mut rng =
            ChaCha12Rng::seed_from_u64(seed::derive_indexed(cfg.rng_seed, "walks", start.0 as u64));
        for _ in 0..cfg.walks_per_node {
            let mut walk = walk_once(g, cfg, start, &mut rng);
            if cfg.restart_on_deadend {
                let mut attempts = 1;
                while walk.tokens.len() < full_len && attempts < RESTART_ATTEMPTS {
                    walk = walk_once(g, cfg, start, &mut rng);
                    attempts += 1;
                }
            }
            corpus.push(walk);
        }
    }
    Ok(corpus)
}

/// Checks alternation and that every (node, label, node) triple is a real
/// edge traversal allowed by `direction`. Returns violation descriptions.
pub fn validate_corpus(g: &KnowledgeGraph, corpus: &[Walk], direction: Direction) -> Vec<String> {
    let mut violations = Vec::new();
    for (w, walk) in corpus.iter().enumerate() {
        if walk.tokens.len() % 2 == 0 {
            violations.push(format!("walk {w}: even token count"));
            continue;
        }
        for (t, pair) in walk.tokens.windows(3).step_by(2).enumerate() {
            let (here, label, there) = (&pair[0], &pair[1], &pair[2]);
            let id = match g.resolve(here) {
                Ok(id) => id,
                Err(e) => {
                    violations.push(format!("walk {w} step {t}: {e}"));
                    continue;
                }
            };
            let hit = g
                .neighbors(id, direction)
                .iter()
                .any(|(l, n)| l == label && &g.node(*n).name == there);
            if !hit {
                violations.push(format!(
                    "walk {w} step {t}: `{here} {label} {there}` is not an edge traversal"
                ));
            }
        }
    }
    violations
}

/// Space-delimited corpus token: inner spaces become underscores.
pub fn mangle_token(token: &str) -> String {
    token.replace(' ', "_")
}

/// One walk per line, tokens space-separated and mangled. Returns bytes
/// written.
pub fn export_corpus<W: Write>(corpus: &[Walk], sink: &mut W) -> std::io::Result<u64> {
    let mut bytes = 0u64;
    for walk in corpus {
        let line = walk
            .tokens
            .iter()
            .map(|t| mangle_token(t))
            .collect::<Vec<_>>()
            .join(" ");
        sink.write_all(line.as_bytes())?;
        sink.write_all(b"\n")?;
        bytes += line.len() as u64 + 1;
    }
    Ok(bytes)
}

/// `mangled<TAB>original` for every distinct token, sorted by mangled form.
pub fn write_token_table<W: Write>(corpus: &[Walk], sink: &mut W) -> std::io::Result<u64> {
    let mut rows: BTreeMap<String, Vec<&str>> = BTreeMap::new();
    for walk in corpus {
        for token in &walk.tokens {
            let mangled = mangle_token(token);
            let originals = rows.entry(mangled).or_default();
            if !originals.iter().any(|o| *o == token) {
                originals.push(token);
            }
        }
    }
    let mut bytes = 0u64;
    for (mangled, originals) in &rows {
        for original in originals {
            let line = format!("{mangled}\t{original}\n");
            sink.write_all(line.as_bytes())?;
            bytes += line.len() as u64;
        }
    }
    Ok(bytes)
}

/// Inverse of [`write_token_table`]. A mangled form mapped to two distinct
/// originals is unrecoverable and reported as an error.
pub fn load_token_table(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut table = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (mangled, original) = line
            .split_once('\t')
            .ok_or_else(|| format!("token table line {}: missing tab", idx + 1))?;
        if let Some(previous) = table.insert(mangled.to_string(), original.to_string()) {
            if previous != original {
                return Err(format!(
                    "token `{mangled}` maps to both `{previous}` and `{original}`"
                ));
            }
        }
    }
    Ok(table)
}
