//! Synthetic benchmark graphs with a known relational structure planted
//! in them.
//!
//! For each category pair i and context j the generator creates concepts
//! `a{i}-ctx{j}` and `b{i}-ctx{j}`, each with its own members. Members
//! carry two kinds of property edges: a side block (`prop-a{i}-*` or
//! `prop-b{i}-*`) shared by that side of the pair across every context,
//! and a context block (`prop-ctx{j}-*`) shared by everyone in that
//! context. The a-vs-b contrast is therefore the same in every context,
//! so the quadruple (a{i}-ctx{j}, b{i}-ctx{j}, a{i}-ctx{l}, b{i}-ctx{l})
//! has matching intensional differences by construction. Noise adds
//! uniform member-property edges on top.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use crate::align::{QuadSource, Quadruple};
use crate::graph::{GraphBuilder, GraphError, KnowledgeGraph, PredicateRegistry};
use crate::parse::{NodeRef, ParsedStatement};
use crate::seed;

pub const MEMBER_PRED: &str = "MemberLink";
pub const PROPERTY_PRED: &str = "has-prop";

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedGraphSpec {
    pub category_pairs: usize,
    pub contexts: usize,
    pub members_per_concept: usize,
    pub props_per_block: usize,
    /// Probability of each extra member-property edge, in [0, 1).
    pub noise: f64,
    pub rng_seed: u64,
}

impl Default for PlantedGraphSpec {
    fn default() -> Self {
        PlantedGraphSpec {
            category_pairs: 4,
            contexts: 2,
            members_per_concept: 6,
            props_per_block: 5,
            noise: 0.05,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PlantedError {
    #[error("planted spec too small: {0}")]
    SpecTooSmall(&'static str),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn concept_name(side: char, pair: usize, ctx: usize) -> String {
    format!("{side}{pair}-ctx{ctx}")
}

fn node_ref(name: String) -> NodeRef {
    NodeRef {
        node_type: "ConceptNode".to_string(),
        name,
        tv: None,
    }
}

fn link(pred: &str, src: String, dst: String) -> ParsedStatement {
    ParsedStatement::LinkDecl {
        link_type: pred.to_string(),
        src: node_ref(src),
        dst: node_ref(dst),
        tv: None,
    }
}

/// Builds the graph and its planted quadruples (one per category pair and
/// unordered context pair).
pub fn generate_planted_graph(
    spec: &PlantedGraphSpec,
) -> Result<(KnowledgeGraph, Vec<Quadruple>), PlantedError> {
    if spec.category_pairs == 0 {
        return Err(PlantedError::SpecTooSmall("need at least one category pair"));
    }
    if spec.contexts < 2 {
        return Err(PlantedError::SpecTooSmall("need at least two contexts"));
    }
    if spec.members_per_concept == 0 {
        return Err(PlantedError::SpecTooSmall("need at least one member per concept"));
    }
    if spec.props_per_block == 0 {
        return Err(PlantedError::SpecTooSmall("need at least one property per block"));
    }
    if !(0.0..1.0).contains(&spec.noise) {
        return Err(PlantedError::SpecTooSmall("noise must lie in [0, 1)"));
    }

    let mut statements = Vec::new();
    let mut members = Vec::new();
    let mut props = Vec::new();

    for i in 0..spec.category_pairs {
        for side in ['a', 'b'] {
            for t in 0..spec.props_per_block {
                props.push(format!("prop-{side}{i}-{t}"));
            }
        }
    }
    for j in 0..spec.contexts {
        for t in 0..spec.props_per_block {
            props.push(format!("prop-ctx{j}-{t}"));
        }
    }

    for i in 0..spec.category_pairs {
        for side in ['a', 'b'] {
            for j in 0..spec.contexts {
                let concept = concept_name(side, i, j);
                for n in 0..spec.members_per_concept {
                    let member = format!("m-{side}{i}-ctx{j}-{n}");
                    statements.push(link(MEMBER_PRED, member.clone(), concept.clone()));
                    for t in 0..spec.props_per_block {
                        statements.push(link(
                            PROPERTY_PRED,
                            member.clone(),
                            format!("prop-{side}{i}-{t}"),
                        ));
                        statements.push(link(
                            PROPERTY_PRED,
                            member.clone(),
                            format!("prop-ctx{j}-{t}"),
                        ));
                    }
                    members.push(member);
                }
            }
        }
    }

    // noise: independent coin per (member, property) pair, in creation order
    if spec.noise > 0.0 {
        let mut rng = ChaCha12Rng::seed_from_u64(seed::derive(spec.rng_seed, "planted"));
        for member in &members {
            for prop in &props {
                if rng.random::<f64>() < spec.noise {
                    statements.push(link(PROPERTY_PRED, member.clone(), prop.clone()));
                }
            }
        }
    }

    let mut registry = PredicateRegistry::default();
    registry.set_property_exclude(vec![MEMBER_PRED.to_string()]);
    let mut builder = GraphBuilder::new(registry);
    builder.add_statements(&statements);
    let graph = builder.freeze()?;

    let mut quads = Vec::new();
    for i in 0..spec.category_pairs {
        for j in 0..spec.contexts {
            for l in (j + 1)..spec.contexts {
                quads.push(Quadruple::new(
                    &concept_name('a', i, j),
                    &concept_name('b', i, j),
                    &concept_name('a', i, l),
                    &concept_name('b', i, l),
                    QuadSource::Planted,
                ));
            }
        }
    }
    Ok((graph, quads))
}

/// Seeded random quads over the planted concepts, for null comparisons.
pub fn sample_random_quads(
    g: &KnowledgeGraph,
    count: usize,
    rng_seed: u64,
) -> Vec<Quadruple> {
    let mut concepts: Vec<&str> = g
        .nodes()
        .iter()
        .map(|n| n.name.as_str())
        .filter(|n| n.starts_with('a') || n.starts_with('b'))
        .collect();
    concepts.sort_unstable();
    let mut rng = ChaCha12Rng::seed_from_u64(seed::derive(rng_seed, "planted-random-quads"));
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut picked: Vec<&str> = Vec::with_capacity(4);
        while picked.len() < 4 {
            let name = concepts[rng.random_range(0..concepts.len())];
            if !picked.contains(&name) {
                picked.push(name);
            }
        }
        out.push(Quadruple::new(
            picked[0],
            picked[1],
            picked[2],
            picked[3],
            QuadSource::Sampled,
        ));
    }
    out
}
