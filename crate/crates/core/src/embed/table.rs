//! Embedding table artifact: lookup, cosine queries, and the text format.
//!
//! File format, bit-exact across save/load cycles:
//!
//! ```text
//! <vocab_size> <dim>
//! token v1 v2 ... vdim
//! ```
//!
//! Floats print as the shortest decimal that parses back to the same bits.
//! Only input vectors are persisted; a vocabulary sidecar
//! (`token<TAB>count<TAB>node|label`) restores counts and label flags.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;

use super::trainer::TrainConfig;
use super::EmbedError;
use crate::walk::mangle_token;

#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    pub dim: usize,
    pub tokens: Vec<String>,
    pub index: HashMap<String, usize>,
    pub counts: Vec<u64>,
    pub is_label: Vec<bool>,
    /// vocab x dim row-major; the vectors all queries use.
    pub input: Vec<f64>,
    /// Context-side vectors; empty on tables loaded from disk.
    pub output: Vec<f64>,
    /// Zero on tables loaded from disk.
    pub corpus_fingerprint: u64,
    pub config: Option<TrainConfig>,
}

impl EmbeddingTable {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn row(&self, index: usize) -> &[f64] {
        &self.input[index * self.dim..(index + 1) * self.dim]
    }

    /// Input vector of a token; lookup never silently falls back.
    pub fn vector(&self, token: &str) -> Result<&[f64], EmbedError> {
        self.index
            .get(token)
            .map(|&i| self.row(i))
            .ok_or_else(|| EmbedError::UnknownToken(token.to_string()))
    }

    /// Lookup by original node name, applying corpus mangling.
    pub fn vector_by_name(&self, name: &str) -> Result<&[f64], EmbedError> {
        self.vector(&mangle_token(name))
    }

    pub fn index_by_name(&self, name: &str) -> Result<usize, EmbedError> {
        let mangled = mangle_token(name);
        self.index
            .get(mangled.as_str())
            .copied()
            .ok_or(EmbedError::UnknownToken(mangled))
    }

    /// Cosine of the query against every vocabulary row, by index. A zero
    /// norm on either side yields 0.
    pub fn cosines(&self, query: &[f64]) -> Vec<f64> {
        let qnorm = norm(query);
        (0..self.len())
            .map(|i| {
                let row = self.row(i);
                let rnorm = norm(row);
                if qnorm < 1e-12 || rnorm < 1e-12 {
                    0.0
                } else {
                    dot(query, row) / (qnorm * rnorm)
                }
            })
            .collect()
    }

    /// Top-k by descending cosine, ties broken by vocabulary index.
    /// `exclude` names tokens to omit; `nodes_only` also omits edge-label
    /// tokens.
    pub fn nearest(
        &self,
        query: &[f64],
        k: usize,
        exclude: &BTreeSet<String>,
        nodes_only: bool,
    ) -> Vec<(String, f64)> {
        let cosines = self.cosines(query);
        let mut ranked: Vec<(usize, f64)> = (0..self.len())
            .filter(|&i| !(nodes_only && self.is_label[i]))
            .filter(|&i| !exclude.contains(&self.tokens[i]))
            .map(|i| (i, cosines[i]))
            .collect();
        ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        ranked
            .into_iter()
            .take(k)
            .map(|(i, c)| (self.tokens[i].clone(), c))
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn writable_token(token: &str) -> std::io::Result<&str> {
    if token.is_empty() || token.contains(' ') || token.contains('\n') || token.contains('\t') {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("token `{token}` cannot appear in a table file"),
        ));
    }
    Ok(token)
}

/// Writes the pinned text format; returns bytes written.
pub fn save_table<W: Write>(table: &EmbeddingTable, sink: &mut W) -> std::io::Result<u64> {
    let mut bytes = 0u64;
    let mut put = |sink: &mut W, line: String| -> std::io::Result<()> {
        sink.write_all(line.as_bytes())?;
        bytes += line.len() as u64;
        Ok(())
    };
    put(sink, format!("{} {}\n", table.len(), table.dim))?;
    for (i, token) in table.tokens.iter().enumerate() {
        let mut line = writable_token(token)?.to_string();
        for v in table.row(i) {
            line.push(' ');
            line.push_str(&v.to_string());
        }
        line.push('\n');
        put(sink, line)?;
    }
    Ok(bytes)
}

pub fn load_table(text: &str) -> Result<EmbeddingTable, EmbedError> {
    let bad = |line: usize, message: String| EmbedError::BadFormat { line, message };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| bad(1, "missing header".to_string()))?;
    let parts: Vec<&str> = header.split(' ').collect();
    let [vocab_size, dim] = parts.as_slice() else {
        return Err(bad(1, format!("header `{header}` is not `<vocab> <dim>`")));
    };
    let vocab_size: usize = vocab_size
        .parse()
        .map_err(|_| bad(1, format!("bad vocab size `{vocab_size}`")))?;
    let dim: usize = dim.parse().map_err(|_| bad(1, format!("bad dim `{dim}`")))?;

    let mut tokens = Vec::with_capacity(vocab_size);
    let mut input = Vec::with_capacity(vocab_size * dim);
    for (idx, line) in lines {
        let lineno = idx + 1;
        let mut fields = line.split(' ');
        let token = fields
            .next()
            .filter(|t| !t.is_empty())
            .ok_or_else(|| bad(lineno, "empty token".to_string()))?;
        tokens.push(token.to_string());
        let mut read = 0;
        for field in fields {
            let v: f64 = field
                .parse()
                .map_err(|_| bad(lineno, format!("bad float `{field}`")))?;
            if !v.is_finite() {
                return Err(EmbedError::NonFinite("embedding file"));
            }
            input.push(v);
            read += 1;
        }
        if read != dim {
            return Err(bad(lineno, format!("expected {dim} floats, found {read}")));
        }
    }
    if tokens.len() != vocab_size {
        return Err(bad(
            1,
            format!("header promises {vocab_size} rows, file has {}", tokens.len()),
        ));
    }
    let n = tokens.len();
    Ok(EmbeddingTable {
        dim,
        index: tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect(),
        tokens,
        counts: vec![0; n],
        is_label: vec![false; n],
        input,
        output: Vec::new(),
        corpus_fingerprint: 0,
        config: None,
    })
}

/// Vocabulary sidecar: `token<TAB>count<TAB>node|label` per row, vocabulary
/// order.
pub fn save_vocab_meta<W: Write>(table: &EmbeddingTable, sink: &mut W) -> std::io::Result<u64> {
    let mut bytes = 0u64;
    for (i, token) in table.tokens.iter().enumerate() {
        let kind = if table.is_label[i] { "label" } else { "node" };
        let line = format!("{}\t{}\t{}\n", writable_token(token)?, table.counts[i], kind);
        sink.write_all(line.as_bytes())?;
        bytes += line.len() as u64;
    }
    Ok(bytes)
}

/// Restores counts and label flags onto a loaded table. Every table token
/// must appear in the sidecar.
pub fn load_vocab_meta(table: &mut EmbeddingTable, text: &str) -> Result<(), EmbedError> {
    let mut rows: HashMap<&str, (u64, bool)> = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let bad = |message: String| EmbedError::BadFormat {
            line: idx + 1,
            message,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        let [token, count, kind] = fields.as_slice() else {
            return Err(bad(format!("expected 3 fields, found {}", fields.len())));
        };
        let count: u64 = count
            .parse()
            .map_err(|_| bad(format!("bad count `{count}`")))?;
        let is_label = match *kind {
            "node" => false,
            "label" => true,
            other => return Err(bad(format!("bad kind `{other}`"))),
        };
        rows.insert(token, (count, is_label));
    }
    for (i, token) in table.tokens.iter().enumerate() {
        let (count, is_label) = rows
            .get(token.as_str())
            .ok_or_else(|| EmbedError::UnknownToken(token.clone()))?;
        table.counts[i] = *count;
        table.is_label[i] = *is_label;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_table() -> EmbeddingTable {
        let tokens: Vec<String> = ["alpha", "beta", "gamma", "linkish", "plasma_membrane"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let n = tokens.len();
        let dim = 3;
        let mut input = Vec::new();
        for i in 0..n {
            for d in 0..dim {
                input.push(((i * dim + d) as f64 * 0.7310000001).sin());
            }
        }
        EmbeddingTable {
            dim,
            index: tokens
                .iter()
                .enumerate()
                .map(|(i, t)| (t.clone(), i))
                .collect(),
            tokens,
            counts: vec![9, 7, 5, 3, 2],
            is_label: vec![false, false, false, true, false],
            input,
            output: Vec::new(),
            corpus_fingerprint: 0xabcd,
            config: None,
        }
    }

    #[test]
    fn vector_lookup_is_explicit() {
        let t = toy_table();
        assert_eq!(t.vector("alpha").unwrap().len(), 3);
        assert_eq!(
            t.vector("missing").unwrap_err(),
            EmbedError::UnknownToken("missing".to_string())
        );
        // names with spaces resolve through mangling
        assert_eq!(
            t.vector_by_name("plasma membrane").unwrap(),
            t.vector("plasma_membrane").unwrap()
        );
    }

    #[test]
    fn nearest_self_is_top_unless_excluded() {
        let t = toy_table();
        let query = t.vector("beta").unwrap().to_vec();
        let hits = t.nearest(&query, 3, &BTreeSet::new(), false);
        assert_eq!(hits[0].0, "beta");
        assert!((hits[0].1 - 1.0).abs() < 1e-12);
        let excluded = t.nearest(
            &query,
            3,
            &BTreeSet::from(["beta".to_string()]),
            false,
        );
        assert_ne!(excluded[0].0, "beta");
    }

    #[test]
    fn nodes_only_drops_label_tokens() {
        let t = toy_table();
        let query = t.vector("linkish").unwrap().to_vec();
        let hits = t.nearest(&query, t.len(), &BTreeSet::new(), true);
        assert!(hits.iter().all(|(token, _)| token != "linkish"));
        assert_eq!(hits.len(), t.len() - 1);
    }

    #[test]
    fn nearest_matches_brute_force_scan() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(13);
        let n = 50;
        let dim = 7;
        let tokens: Vec<String> = (0..n).map(|i| format!("t{i:02}")).collect();
        let input: Vec<f64> = (0..n * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let t = EmbeddingTable {
            dim,
            index: tokens
                .iter()
                .enumerate()
                .map(|(i, t)| (t.clone(), i))
                .collect(),
            tokens,
            counts: vec![1; n],
            is_label: vec![false; n],
            input,
            output: Vec::new(),
            corpus_fingerprint: 0,
            config: None,
        };
        let query: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        for k in [1, 3, n] {
            let fast = t.nearest(&query, k, &BTreeSet::new(), false);
            // oracle: repeatedly pick the best remaining row by linear scan
            let mut remaining: Vec<usize> = (0..n).collect();
            let cosines = t.cosines(&query);
            let mut slow = Vec::new();
            while slow.len() < k && !remaining.is_empty() {
                let best = *remaining
                    .iter()
                    .min_by(|&&a, &&b| {
                        cosines[b]
                            .partial_cmp(&cosines[a])
                            .unwrap()
                            .then(a.cmp(&b))
                    })
                    .unwrap();
                remaining.retain(|&i| i != best);
                slow.push((t.tokens[best].clone(), cosines[best]));
            }
            assert_eq!(fast, slow, "k={k}");
        }
    }

    #[test]
    fn zero_query_has_zero_cosines() {
        let t = toy_table();
        assert!(t.cosines(&[0.0, 0.0, 0.0]).iter().all(|&c| c == 0.0));
    }

    #[test]
    fn save_load_save_is_byte_identical() {
        let t = toy_table();
        let mut first = Vec::new();
        save_table(&t, &mut first).unwrap();
        let loaded = load_table(std::str::from_utf8(&first).unwrap()).unwrap();
        let mut second = Vec::new();
        save_table(&loaded, &mut second).unwrap();
        assert_eq!(first, second);
        assert_eq!(loaded.input, t.input);
        assert_eq!(loaded.tokens, t.tokens);
    }

    #[test]
    fn load_rejects_malformed_files() {
        assert!(matches!(
            load_table(""),
            Err(EmbedError::BadFormat { line: 1, .. })
        ));
        assert!(matches!(
            load_table("2 3\na 1 2 3\n"),
            Err(EmbedError::BadFormat { line: 1, .. })
        ));
        assert!(matches!(
            load_table("1 3\na 1 2\n"),
            Err(EmbedError::BadFormat { line: 2, .. })
        ));
        assert!(matches!(
            load_table("1 2\na 1 x\n"),
            Err(EmbedError::BadFormat { line: 2, .. })
        ));
        assert!(matches!(
            load_table("1 2\na inf 0\n"),
            Err(EmbedError::NonFinite(_))
        ));
    }

    #[test]
    fn vocab_meta_round_trips_counts_and_flags() {
        let t = toy_table();
        let mut meta = Vec::new();
        save_vocab_meta(&t, &mut meta).unwrap();
        let mut table_bytes = Vec::new();
        save_table(&t, &mut table_bytes).unwrap();
        let mut reloaded = load_table(std::str::from_utf8(&table_bytes).unwrap()).unwrap();
        load_vocab_meta(&mut reloaded, std::str::from_utf8(&meta).unwrap()).unwrap();
        assert_eq!(reloaded.counts, t.counts);
        assert_eq!(reloaded.is_label, t.is_label);
        let missing = load_vocab_meta(&mut reloaded, "alpha\t9\tnode\n");
        assert!(matches!(missing, Err(EmbedError::UnknownToken(_))));
    }

    #[test]
    fn tokens_with_spaces_refuse_to_serialize() {
        let mut t = toy_table();
        t.tokens[0] = "has space".to_string();
        assert!(save_table(&t, &mut Vec::new()).is_err());
    }
}
