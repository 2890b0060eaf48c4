//! Brute-force reference implementations used to cross-check the library.
//!
//! Everything here recomputes results from raw edge scans keyed by node
//! name, deliberately avoiding the library's adjacency lists, id spaces,
//! and cached probabilities.

use std::collections::{BTreeMap, BTreeSet};

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use veclogic::graph::{GraphBuilder, KnowledgeGraph, PredicateRegistry};
use veclogic::intensional::{DegreeModel, FuzzySet};
use veclogic::parse::{NodeRef, ParsedStatement};

/// (edge label as seen from the possessor, neighbor node name)
pub type Key = (String, String);

pub fn node_name(g: &KnowledgeGraph, id: veclogic::NodeId) -> String {
    g.node(id).name.clone()
}

/// Property tokens of one node, by full edge scan.
pub fn possessions_of(g: &KnowledgeGraph, name: &str) -> BTreeSet<Key> {
    let mut out = BTreeSet::new();
    for e in g.edges() {
        let info = g.predicate(&e.predicate).unwrap();
        if !info.is_property {
            continue;
        }
        if node_name(g, e.src) == name {
            out.insert((info.forward_label.clone(), node_name(g, e.dst)));
        }
        if node_name(g, e.dst) == name {
            out.insert((info.inverse_label.clone(), node_name(g, e.src)));
        }
    }
    out
}

/// Member names of a concept, by full edge scan; falls back to the
/// singleton when no membership edge points at it.
pub fn members_of(g: &KnowledgeGraph, concept: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for e in g.edges() {
        let info = g.predicate(&e.predicate).unwrap();
        if !info.is_membership {
            continue;
        }
        let (member, owner) = if info.member_is_dst {
            (e.dst, e.src)
        } else {
            (e.src, e.dst)
        };
        if node_name(g, owner) == concept {
            out.insert(node_name(g, member));
        }
    }
    if out.is_empty() {
        out.insert(concept.to_string());
    }
    out
}

/// Fraction of all nodes possessing the token.
pub fn prob(g: &KnowledgeGraph, key: &Key) -> f64 {
    let possessing = g
        .node_ids()
        .filter(|&n| possessions_of(g, &node_name(g, n)).contains(key))
        .count();
    possessing as f64 / g.node_count() as f64
}

pub fn pat(g: &KnowledgeGraph, concept: &str, model: DegreeModel) -> BTreeMap<Key, f64> {
    let members = members_of(g, concept);
    let mut counts: BTreeMap<Key, usize> = BTreeMap::new();
    for m in &members {
        for key in possessions_of(g, m) {
            *counts.entry(key).or_insert(0) += 1;
        }
    }
    let mut out = BTreeMap::new();
    for (key, c) in counts {
        let cond = c as f64 / members.len() as f64;
        let p = prob(g, &key);
        let degree = if p >= 1.0 {
            0.0
        } else {
            match model {
                DegreeModel::InfoContent => {
                    let worst = (g.node_count() as f64).log2();
                    if worst <= 0.0 {
                        0.0
                    } else {
                        cond * ((-p.log2()) / worst).min(1.0)
                    }
                }
                DegreeModel::SurpriseRatio => ((cond - p) / (1.0 - p)).max(0.0),
            }
        };
        if degree > 0.0 {
            out.insert(key, degree);
        }
    }
    out
}

pub fn difference(a: &BTreeMap<Key, f64>, b: &BTreeMap<Key, f64>) -> BTreeMap<Key, f64> {
    let mut out = BTreeMap::new();
    for (k, &d) in a {
        let r = d - b.get(k).copied().unwrap_or(0.0);
        if r > 0.0 {
            out.insert(k.clone(), r);
        }
    }
    out
}

pub fn similarity(a: &BTreeMap<Key, f64>, b: &BTreeMap<Key, f64>) -> f64 {
    let keys: BTreeSet<&Key> = a.keys().chain(b.keys()).collect();
    let mut num = 0.0;
    let mut den = 0.0;
    for k in keys {
        let da = a.get(k).copied().unwrap_or(0.0);
        let db = b.get(k).copied().unwrap_or(0.0);
        num += da.min(db);
        den += da.max(db);
    }
    if den == 0.0 { 1.0 } else { num / den }
}

pub fn inheritance(a: &BTreeMap<Key, f64>, b: &BTreeMap<Key, f64>) -> f64 {
    let den: f64 = a.values().sum();
    if den == 0.0 {
        return 0.0;
    }
    let num: f64 = a
        .iter()
        .map(|(k, &d)| d.min(b.get(k).copied().unwrap_or(0.0)))
        .sum();
    num / den
}

/// Library fuzzy set re-keyed by (label, neighbor name) for comparison.
pub fn rekey(g: &KnowledgeGraph, fs: &FuzzySet) -> BTreeMap<Key, f64> {
    fs.degrees()
        .iter()
        .map(|(t, &d)| ((t.label.clone(), node_name(g, t.neighbor)), d))
        .collect()
}

/// Small random graph with membership and plain predicates mixed in.
pub fn random_graph(seed: u64) -> KnowledgeGraph {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let node_count = rng.random_range(2..=20usize);
    let edge_count = rng.random_range(1..=40usize);
    let preds = ["MemberLink", "p0", "p1", "p2"];
    let mut statements = Vec::new();
    for e in 0..edge_count {
        let _ = e;
        let src = rng.random_range(0..node_count);
        let dst = rng.random_range(0..node_count);
        let pred = preds[rng.random_range(0..preds.len())];
        statements.push(ParsedStatement::LinkDecl {
            link_type: pred.to_string(),
            src: NodeRef {
                node_type: "ConceptNode".to_string(),
                name: format!("n{src}"),
                tv: None,
            },
            dst: NodeRef {
                node_type: "ConceptNode".to_string(),
                name: format!("n{dst}"),
                tv: None,
            },
            tv: None,
        });
    }
    let mut registry = PredicateRegistry::default();
    let mut excludes = vec!["MemberLink".to_string()];
    if seed % 2 == 0 {
        excludes.push("p2".to_string());
    }
    registry.set_property_exclude(excludes);
    let mut b = GraphBuilder::new(registry);
    b.add_statements(&statements);
    b.freeze().unwrap()
}
