//! Quantifies how well embedding-space differences track logic-space
//! differences over quadruples (ax, bx, ay, by).
//!
//! Per quad: the residual and cosine between the two difference vectors
//! V(ax)-V(bx) and V(ay)-V(by), the 3CosAdd rank of `by`, and the fuzzy
//! similarity of the two intensional differences. Per batch: Spearman
//! rank correlation between vector cosine and logic similarity, a
//! permutation null for it, and a residual baseline over random quads
//! drawn from the same node pool.

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use crate::embed::{EmbedError, EmbeddingTable};
use crate::graph::{GraphError, KnowledgeGraph};
use crate::intensional::{PatConfig, PatEvaluator};
use crate::seed;
use crate::walk::mangle_token;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadSource {
    Planted,
    User,
    Sampled,
}

impl QuadSource {
    pub fn name(self) -> &'static str {
        match self {
            QuadSource::Planted => "planted",
            QuadSource::User => "user",
            QuadSource::Sampled => "sampled",
        }
    }
}

/// Four node names; reads as "ax is to bx what ay is to by".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quadruple {
    pub ax: String,
    pub bx: String,
    pub ay: String,
    pub by: String,
    pub source: QuadSource,
}

impl Quadruple {
    pub fn new(ax: &str, bx: &str, ay: &str, by: &str, source: QuadSource) -> Quadruple {
        Quadruple {
            ax: ax.to_string(),
            bx: bx.to_string(),
            ay: ay.to_string(),
            by: by.to_string(),
            source,
        }
    }

    pub fn names(&self) -> [&str; 4] {
        [&self.ax, &self.bx, &self.ay, &self.by]
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AlignError {
    #[error("need at least {need} quadruples, got {found}")]
    InsufficientQuads { need: usize, found: usize },
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("bad quadruple file: {0}")]
    BadQuadFile(String),
}

const NORM_FLOOR: f64 = 1e-12;

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Residual and cosine between the quad's two difference vectors.
pub fn vec_scores(table: &EmbeddingTable, quad: &Quadruple) -> Result<(f64, f64), EmbedError> {
    let d1 = sub(
        table.vector_by_name(&quad.ax)?,
        table.vector_by_name(&quad.bx)?,
    );
    let d2 = sub(
        table.vector_by_name(&quad.ay)?,
        table.vector_by_name(&quad.by)?,
    );
    let (n1, n2) = (norm(&d1), norm(&d2));
    let residual = norm(&sub(&d1, &d2)) / n1.max(n2).max(NORM_FLOOR);
    let cosine = if n1 < NORM_FLOOR || n2 < NORM_FLOOR {
        0.0
    } else {
        dot(&d1, &d2) / (n1 * n2)
    };
    Ok((residual, cosine))
}

/// 3CosAdd rank of `by` among node tokens by cosine to
/// V(bx) - V(ax) + V(ay), with ax, bx, ay excluded as candidates (the
/// target itself is never excluded). Ties break toward the
/// lexicographically smaller token. Rank 1 is best.
pub fn analogy_rank(table: &EmbeddingTable, quad: &Quadruple) -> Result<usize, EmbedError> {
    let vax = table.vector_by_name(&quad.ax)?;
    let vbx = table.vector_by_name(&quad.bx)?;
    let vay = table.vector_by_name(&quad.ay)?;
    let query: Vec<f64> = vbx
        .iter()
        .zip(vax)
        .zip(vay)
        .map(|((b, a), y)| b - a + y)
        .collect();
    let target = mangle_token(&quad.by);
    let target_idx = table.index_by_name(&quad.by)?;
    let cosines = table.cosines(&query);
    let target_cos = cosines[target_idx];
    let mut excluded: BTreeSet<String> = [&quad.ax, &quad.bx, &quad.ay]
        .iter()
        .map(|n| mangle_token(n))
        .collect();
    excluded.remove(&target);
    let mut rank = 1;
    for (i, token) in table.tokens.iter().enumerate() {
        if i == target_idx || table.is_label[i] || excluded.contains(token) {
            continue;
        }
        if cosines[i] > target_cos || (cosines[i] == target_cos && token.as_str() < target.as_str())
        {
            rank += 1;
        }
    }
    Ok(rank)
}

/// One evaluated quadruple.
#[derive(Debug, Clone)]
pub struct AlignmentRecord {
    pub quad: Quadruple,
    pub vec_residual: f64,
    pub vec_cosine: f64,
    pub logic_similarity: f64,
    pub analogy_rank: usize,
}

#[derive(Debug, Clone)]
pub struct AlignmentSummary {
    /// None when either score column is constant.
    pub spearman: Option<f64>,
    pub degenerate: bool,
    pub mean_residual: f64,
    /// None when the pooled names cannot form a baseline quad.
    pub baseline_mean_residual: Option<f64>,
    /// Spearman under random relabelings of the logic column.
    pub null_spearman: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub pat: PatConfig,
    pub rng_seed: u64,
    /// Baseline quad count; defaults to the evaluated quad count.
    pub baseline_size: Option<usize>,
    pub permutations: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            pat: PatConfig::default(),
            rng_seed: 0,
            baseline_size: None,
            permutations: 100,
        }
    }
}

pub const MIN_QUADS: usize = 5;

/// Average ranks (ties averaged), then Pearson on the ranks. None when
/// either side has zero variance.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len());
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    pearson(&rx, &ry)
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&i, &j| v[i].partial_cmp(&v[j]).unwrap());
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        // ranks are 1-based; tie group shares the average slot
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Scores every quad, then summarizes correlation, a permutation null,
/// and a random-quad residual baseline over the same name pool.
pub fn evaluate_alignment(
    g: &KnowledgeGraph,
    table: &EmbeddingTable,
    quads: &[Quadruple],
    cfg: &EvalConfig,
) -> Result<(Vec<AlignmentRecord>, AlignmentSummary), AlignError> {
    if quads.len() < MIN_QUADS {
        return Err(AlignError::InsufficientQuads {
            need: MIN_QUADS,
            found: quads.len(),
        });
    }
    let ev = PatEvaluator::new(g, cfg.pat);
    let mut records = Vec::with_capacity(quads.len());
    for quad in quads {
        let (vec_residual, vec_cosine) = vec_scores(table, quad)?;
        let rank = analogy_rank(table, quad)?;
        let ids = [
            g.resolve(&quad.ax)?,
            g.resolve(&quad.bx)?,
            g.resolve(&quad.ay)?,
            g.resolve(&quad.by)?,
        ];
        let logic_similarity = ev.diff_similarity(ids[0], ids[1], ids[2], ids[3]);
        records.push(AlignmentRecord {
            quad: quad.clone(),
            vec_residual,
            vec_cosine,
            logic_similarity,
            analogy_rank: rank,
        });
    }

    let cosines: Vec<f64> = records.iter().map(|r| r.vec_cosine).collect();
    let logic: Vec<f64> = records.iter().map(|r| r.logic_similarity).collect();
    let rho = spearman(&cosines, &logic);
    let mean_residual =
        records.iter().map(|r| r.vec_residual).sum::<f64>() / records.len() as f64;

    let mut null_spearman = Vec::with_capacity(cfg.permutations);
    for p in 0..cfg.permutations {
        let mut shuffled = logic.clone();
        let mut rng = ChaCha12Rng::seed_from_u64(seed::derive_indexed(
            cfg.rng_seed,
            "align-null",
            p as u64,
        ));
        shuffled.shuffle(&mut rng);
        null_spearman.push(spearman(&cosines, &shuffled).unwrap_or(0.0));
    }

    let pool: Vec<String> = quads
        .iter()
        .flat_map(|q| q.names().map(str::to_string))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let baseline_size = cfg.baseline_size.unwrap_or(quads.len());
    let baseline_mean_residual = if pool.len() < 4 || baseline_size == 0 {
        None
    } else {
        let mut rng =
            ChaCha12Rng::seed_from_u64(seed::derive(cfg.rng_seed, "align-baseline"));
        let mut total = 0.0;
        for _ in 0..baseline_size {
            let mut picked: Vec<&str> = Vec::with_capacity(4);
            while picked.len() < 4 {
                let name = pool[rng.random_range(0..pool.len())].as_str();
                if !picked.contains(&name) {
                    picked.push(name);
                }
            }
            let q = Quadruple::new(picked[0], picked[1], picked[2], picked[3], QuadSource::Sampled);
            total += vec_scores(table, &q)?.0;
        }
        Some(total / baseline_size as f64)
    };

    Ok((
        records,
        AlignmentSummary {
            degenerate: rho.is_none(),
            spearman: rho,
            mean_residual,
            baseline_mean_residual,
            null_spearman,
        },
    ))
}

/// Reads `ax,bx,ay,by` rows (header required).
pub fn read_quads_csv(text: &str) -> Result<Vec<Quadruple>, AlignError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| AlignError::BadQuadFile(e.to_string()))?
        .clone();
    let expected = ["ax", "bx", "ay", "by"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(AlignError::BadQuadFile(format!(
            "expected header ax,bx,ay,by, got {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| AlignError::BadQuadFile(e.to_string()))?;
        if row.len() != 4 {
            return Err(AlignError::BadQuadFile(format!(
                "row {} has {} fields",
                i + 2,
                row.len()
            )));
        }
        out.push(Quadruple::new(
            &row[0],
            &row[1],
            &row[2],
            &row[3],
            QuadSource::User,
        ));
    }
    Ok(out)
}

/// Per-quad scores as CSV.
pub fn write_records_csv(records: &[AlignmentRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "ax",
        "bx",
        "ay",
        "by",
        "source",
        "vec_residual",
        "vec_cosine",
        "logic_similarity",
        "analogy_rank",
    ])
    .unwrap();
    for r in records {
        w.write_record([
            r.quad.ax.as_str(),
            r.quad.bx.as_str(),
            r.quad.ay.as_str(),
            r.quad.by.as_str(),
            r.quad.source.name(),
            r.vec_residual.to_string().as_str(),
            r.vec_cosine.to_string().as_str(),
            r.logic_similarity.to_string().as_str(),
            r.analogy_rank.to_string().as_str(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// Scatter rows `vec_cosine<TAB>logic_similarity`, one per quad.
pub fn write_scatter(records: &[AlignmentRecord]) -> String {
    let mut out = String::from("# vec_cosine\tlogic_similarity\n");
    for r in records {
        out.push_str(&format!("{}\t{}\n", r.vec_cosine, r.logic_similarity));
    }
    out
}

pub fn render_summary(records: &[AlignmentRecord], summary: &AlignmentSummary) -> String {
    let mut out = String::new();
    out.push_str(&format!("quads evaluated: {}\n", records.len()));
    match summary.spearman {
        Some(rho) => out.push_str(&format!("spearman(vec_cosine, logic_similarity): {rho:.6}\n")),
        None => out.push_str("spearman(vec_cosine, logic_similarity): degenerate (constant input)\n"),
    }
    let within = summary
        .null_spearman
        .iter()
        .filter(|r| r.abs() < 0.3)
        .count();
    out.push_str(&format!(
        "permutation null: {} draws, {} with |rho| < 0.3\n",
        summary.null_spearman.len(),
        within
    ));
    out.push_str(&format!("mean residual: {:.6}\n", summary.mean_residual));
    match summary.baseline_mean_residual {
        Some(b) => out.push_str(&format!("random-quad mean residual: {b:.6}\n")),
        None => out.push_str("random-quad mean residual: unavailable (name pool too small)\n"),
    }
    let ranked: Vec<usize> = records.iter().map(|r| r.analogy_rank).collect();
    let top5 = ranked.iter().filter(|&&r| r <= 5).count();
    out.push_str(&format!(
        "analogy rank <= 5: {}/{}\n",
        top5,
        ranked.len()
    ));
    out
}
