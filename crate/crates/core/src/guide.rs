//! Vector-guided premise selection: walk the line from the premises'
//! mean vector to the conclusion vector and report nearby node tokens at
//! each interior point.
//!
//! Candidates are node tokens only; edge-label tokens and (optionally)
//! the endpoints themselves are excluded. Pure function of the embedding
//! table and request.

use std::collections::BTreeSet;

use crate::embed::{EmbedError, EmbeddingTable};
use crate::walk::mangle_token;

#[derive(Debug, Clone, PartialEq)]
pub struct GuideRequest {
    pub premises: Vec<String>,
    pub conclusion: String,
    /// Interior interpolation points.
    pub steps: usize,
    /// Candidates reported per point.
    pub k: usize,
    pub exclude_endpoints: bool,
}

impl GuideRequest {
    pub fn new(premises: &[&str], conclusion: &str) -> GuideRequest {
        GuideRequest {
            premises: premises.iter().map(|s| s.to_string()).collect(),
            conclusion: conclusion.to_string(),
            steps: 5,
            k: 5,
            exclude_endpoints: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GuideStep {
    pub t: f64,
    /// (token, cosine), best first.
    pub candidates: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GuidePath {
    pub steps: Vec<GuideStep>,
    /// Each distinct candidate with the t where it first appeared.
    pub first_appearance: Vec<(String, f64)>,
}

#[derive(Debug, thiserror::Error)]
pub enum GuideError {
    #[error("invalid request: {0}")]
    InvalidRequest(&'static str),
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

/// Arithmetic mean of the premises' vectors.
pub fn premises_vector(
    table: &EmbeddingTable,
    premises: &[String],
) -> Result<Vec<f64>, GuideError> {
    if premises.is_empty() {
        return Err(GuideError::InvalidRequest("no premises"));
    }
    let mut mean = vec![0.0; table.dim];
    for name in premises {
        for (slot, x) in mean.iter_mut().zip(table.vector_by_name(name)?) {
            *slot += x;
        }
    }
    for slot in &mut mean {
        *slot /= premises.len() as f64;
    }
    Ok(mean)
}

fn interpolate(p: &[f64], c: &[f64], t: f64) -> Vec<f64> {
    p.iter().zip(c).map(|(a, b)| (1.0 - t) * a + t * b).collect()
}

fn candidates_at(
    table: &EmbeddingTable,
    p: &[f64],
    c: &[f64],
    t: f64,
    k: usize,
    exclude: &BTreeSet<String>,
) -> Vec<(String, f64)> {
    table.nearest(&interpolate(p, c, t), k, exclude, true)
}

/// Interior candidates at t = i/(steps+1) for i in 1..=steps.
pub fn guide(table: &EmbeddingTable, req: &GuideRequest) -> Result<GuidePath, GuideError> {
    if req.steps == 0 {
        return Err(GuideError::InvalidRequest("steps must be positive"));
    }
    if req.k == 0 {
        return Err(GuideError::InvalidRequest("k must be positive"));
    }
    let p = premises_vector(table, &req.premises)?;
    let c = table.vector_by_name(&req.conclusion)?.to_vec();
    let mut exclude = BTreeSet::new();
    if req.exclude_endpoints {
        for name in &req.premises {
            exclude.insert(mangle_token(name));
        }
        exclude.insert(mangle_token(&req.conclusion));
    }
    let mut steps = Vec::with_capacity(req.steps);
    let mut first_appearance: Vec<(String, f64)> = Vec::new();
    let mut seen = BTreeSet::new();
    for i in 1..=req.steps {
        let t = i as f64 / (req.steps + 1) as f64;
        let candidates = candidates_at(table, &p, &c, t, req.k, &exclude);
        for (token, _) in &candidates {
            if seen.insert(token.clone()) {
                first_appearance.push((token.clone(), t));
            }
        }
        steps.push(GuideStep { t, candidates });
    }
    Ok(GuidePath {
        steps,
        first_appearance,
    })
}

pub fn render_path(path: &GuidePath) -> String {
    let mut out = String::new();
    for step in &path.steps {
        out.push_str(&format!("t={:.4}\n", step.t));
        for (token, cosine) in &step.candidates {
            out.push_str(&format!("  {token}\t{cosine:.6}\n"));
        }
    }
    out.push_str("first appearance:\n");
    for (token, t) in &path.first_appearance {
        out.push_str(&format!("  {token}\tt={t:.4}\n"));
    }
    out
}
