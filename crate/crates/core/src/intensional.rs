//! Fuzzy property sets and intensional measures over a frozen graph.
//!
//! `Pat(A)` collects the property tokens of A's members; a property's
//! degree combines how common it is among members with how informative
//! possessing it is graph-wide. Two degree models:
//!
//! * `info_content`: cond(p) * min(1, -log2 P(p) / -log2(1/N))
//! * `surprise_ratio`: max(0, (cond(p) - P(p)) / (1 - P(p)))
//!
//! where cond(p) is the fraction of members possessing p, P(p) the fraction
//! of all nodes possessing p, and N the node count. A property possessed by
//! every node scores 0 under both models.
//!
//! Set ops check provenance: both operands must come from the same graph
//! and degree model.

use std::collections::{BTreeMap, HashMap};

use crate::graph::{KnowledgeGraph, NodeId, PropertyToken};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegreeModel {
    #[default]
    InfoContent,
    SurpriseRatio,
}

impl DegreeModel {
    pub fn name(self) -> &'static str {
        match self {
            DegreeModel::InfoContent => "info_content",
            DegreeModel::SurpriseRatio => "surprise_ratio",
        }
    }
}

impl std::str::FromStr for DegreeModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "info_content" => Ok(DegreeModel::InfoContent),
            "surprise_ratio" => Ok(DegreeModel::SurpriseRatio),
            other => Err(format!("unknown degree model `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PatConfig {
    pub degree_model: DegreeModel,
}

/// Identifies the (graph, degree model) a fuzzy set was computed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub graph_fingerprint: u64,
    pub degree_model: DegreeModel,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum IntensionalError {
    #[error("fuzzy sets come from different graphs or degree models")]
    ProvenanceMismatch,
}

/// Sparse fuzzy set over property tokens; only degrees in (0,1] are stored,
/// iteration order is token order.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzySet {
    provenance: Provenance,
    degrees: BTreeMap<PropertyToken, f64>,
}

impl FuzzySet {
    pub fn from_entries(
        provenance: Provenance,
        entries: impl IntoIterator<Item = (PropertyToken, f64)>,
    ) -> FuzzySet {
        FuzzySet {
            provenance,
            degrees: entries.into_iter().filter(|&(_, d)| d > 0.0).collect(),
        }
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn degrees(&self) -> &BTreeMap<PropertyToken, f64> {
        &self.degrees
    }

    pub fn degree(&self, token: &PropertyToken) -> f64 {
        self.degrees.get(token).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    /// CSV rows `label,target,degree` in token order; targets are node
    /// names.
    pub fn write_csv(&self, g: &KnowledgeGraph) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["label", "target", "degree"]).unwrap();
        for (token, degree) in &self.degrees {
            w.write_record([
                token.label.as_str(),
                g.node(token.neighbor).name.as_str(),
                degree.to_string().as_str(),
            ])
            .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

fn check(a: &FuzzySet, b: &FuzzySet) -> Result<(), IntensionalError> {
    if a.provenance != b.provenance {
        return Err(IntensionalError::ProvenanceMismatch);
    }
    Ok(())
}

/// Bounded pointwise difference max(0, pa - pb).
pub fn int_difference(pa: &FuzzySet, pb: &FuzzySet) -> Result<FuzzySet, IntensionalError> {
    check(pa, pb)?;
    Ok(FuzzySet::from_entries(
        pa.provenance,
        pa.degrees
            .iter()
            .map(|(t, &d)| (t.clone(), d - pb.degree(t))),
    ))
}

/// Sum-min over sum of antecedent degrees; 0 for an empty antecedent.
pub fn fuzzy_inheritance(sa: &FuzzySet, sb: &FuzzySet) -> Result<f64, IntensionalError> {
    check(sa, sb)?;
    let denominator: f64 = sa.degrees.values().sum();
    if denominator == 0.0 {
        return Ok(0.0);
    }
    let numerator: f64 = sa
        .degrees
        .iter()
        .map(|(t, &d)| d.min(sb.degree(t)))
        .sum();
    Ok(numerator / denominator)
}

/// Fuzzy Jaccard sum-min / sum-max; 1 when both sets are empty.
pub fn fuzzy_similarity(sa: &FuzzySet, sb: &FuzzySet) -> Result<f64, IntensionalError> {
    check(sa, sb)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, &d) in &sa.degrees {
        let other = sb.degree(t);
        num += d.min(other);
        den += d.max(other);
    }
    for (t, &d) in &sb.degrees {
        if !sa.degrees.contains_key(t) {
            den += d;
        }
    }
    if den == 0.0 {
        return Ok(1.0);
    }
    Ok(num / den)
}

/// Precomputes graph-wide property probabilities once; all Pat queries
/// share them.
pub struct PatEvaluator<'g> {
    graph: &'g KnowledgeGraph,
    cfg: PatConfig,
    prob: HashMap<PropertyToken, f64>,
}

impl<'g> PatEvaluator<'g> {
    pub fn new(graph: &'g KnowledgeGraph, cfg: PatConfig) -> PatEvaluator<'g> {
        let mut possessed: HashMap<PropertyToken, usize> = HashMap::new();
        for node in graph.node_ids() {
            for token in graph.property_tokens_of(node) {
                *possessed.entry(token).or_insert(0) += 1;
            }
        }
        let n = graph.node_count() as f64;
        PatEvaluator {
            graph,
            cfg,
            prob: possessed
                .into_iter()
                .map(|(t, c)| (t, c as f64 / n))
                .collect(),
        }
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            graph_fingerprint: self.graph.fingerprint(),
            degree_model: self.cfg.degree_model,
        }
    }

    fn degree(&self, cond: f64, p: f64) -> f64 {
        if p >= 1.0 {
            return 0.0;
        }
        match self.cfg.degree_model {
            DegreeModel::InfoContent => {
                let info = -p.log2();
                let worst = (self.graph.node_count() as f64).log2();
                if worst <= 0.0 {
                    0.0
                } else {
                    cond * (info / worst).min(1.0)
                }
            }
            DegreeModel::SurpriseRatio => ((cond - p) / (1.0 - p)).max(0.0),
        }
    }

    pub fn pat(&self, node: NodeId) -> FuzzySet {
        let members = self.graph.members_of(node);
        let mut counts: BTreeMap<PropertyToken, usize> = BTreeMap::new();
        for &member in &members {
            for token in self.graph.property_tokens_of(member) {
                *counts.entry(token).or_insert(0) += 1;
            }
        }
        let member_count = members.len() as f64;
        FuzzySet::from_entries(
            self.provenance(),
            counts.into_iter().map(|(token, c)| {
                let cond = c as f64 / member_count;
                let degree = self.degree(cond, self.prob[&token]);
                (token, degree)
            }),
        )
    }

    pub fn intensional_similarity(&self, a: NodeId, b: NodeId) -> f64 {
        fuzzy_similarity(&self.pat(a), &self.pat(b)).expect("same provenance")
    }

    /// Similarity of the two bounded differences of a quadruple
    /// (ax, bx, ay, by).
    pub fn diff_similarity(&self, ax: NodeId, bx: NodeId, ay: NodeId, by: NodeId) -> f64 {
        let d1 = int_difference(&self.pat(ax), &self.pat(bx)).expect("same provenance");
        let d2 = int_difference(&self.pat(ay), &self.pat(by)).expect("same provenance");
        fuzzy_similarity(&d1, &d2).expect("same provenance")
    }
}

/// Fraction of all nodes possessing `p`.
pub fn prop_prob(g: &KnowledgeGraph, p: &PropertyToken) -> f64 {
    let possessing = g
        .node_ids()
        .filter(|&n| g.property_tokens_of(n).contains(p))
        .count();
    possessing as f64 / g.node_count() as f64
}

pub fn pat(g: &KnowledgeGraph, node: NodeId, cfg: PatConfig) -> FuzzySet {
    PatEvaluator::new(g, cfg).pat(node)
}

pub fn intensional_similarity(g: &KnowledgeGraph, a: NodeId, b: NodeId, cfg: PatConfig) -> f64 {
    PatEvaluator::new(g, cfg).intensional_similarity(a, b)
}

pub fn diff_similarity(
    g: &KnowledgeGraph,
    quad: (NodeId, NodeId, NodeId, NodeId),
    cfg: PatConfig,
) -> f64 {
    PatEvaluator::new(g, cfg).diff_similarity(quad.0, quad.1, quad.2, quad.3)
}
