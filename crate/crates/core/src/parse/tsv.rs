//! Tab-separated graph format.
//!
//! ```text
//! # comment
//! @node<TAB>name<TAB>type<TAB>strength<TAB>confidence
//! src<TAB>predicate<TAB>dst
//! ```
//!
//! Triple endpoints that never get an `@node` line become implicit
//! `ConceptNode` declarations with the default truth value. `@node` lines
//! may appear anywhere; their type applies to every mention of the name.

use std::collections::{HashMap, HashSet};

use super::lower::{NodeRef, ParsedStatement};
use crate::graph::KnowledgeGraph;
use crate::truth::TruthValue;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TsvError {
    #[error("line {line}: expected {expected} tab-separated fields, found {found}")]
    BadColumnCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: bad truth value `{text}`")]
    BadTruthValue { line: usize, text: String },
    #[error("name `{0}` cannot appear in the tab-separated format")]
    Unrepresentable(String),
}

const IMPLICIT_TYPE: &str = "ConceptNode";

fn is_skippable(line: &str) -> bool {
    line.trim().is_empty() || line.starts_with('#')
}

fn is_node_line(fields: &[&str]) -> bool {
    fields.first() == Some(&"@node")
}

/// One statement per `@node` line, one implicit declaration per endpoint at
/// first sight, one link per triple, in line order.
pub fn parse_graph_tsv(text: &str) -> Result<Vec<ParsedStatement>, TsvError> {
    // First pass: node types, so triples before their @node line still
    // reference the declared type.
    let mut declared: HashMap<&str, &str> = HashMap::new();
    for line in text.lines() {
        if is_skippable(line) {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if is_node_line(&fields) && fields.len() == 5 {
            declared.entry(fields[1]).or_insert(fields[2]);
        }
    }

    let node_type = |name: &str| declared.get(name).copied().unwrap_or(IMPLICIT_TYPE);
    let mut seen: HashSet<&str> = HashSet::new();
    let mut statements = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if is_skippable(line) {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split('\t').collect();
        if is_node_line(&fields) {
            if fields.len() != 5 {
                return Err(TsvError::BadColumnCount {
                    line: lineno,
                    expected: 5,
                    found: fields.len(),
                });
            }
            let parse = |text: &str| -> Result<f64, TsvError> {
                text.parse().map_err(|_| TsvError::BadTruthValue {
                    line: lineno,
                    text: text.to_string(),
                })
            };
            let strength = parse(fields[3])?;
            let confidence = parse(fields[4])?;
            let tv =
                TruthValue::new(strength, confidence).ok_or_else(|| TsvError::BadTruthValue {
                    line: lineno,
                    text: format!("{} {}", fields[3], fields[4]),
                })?;
            statements.push(ParsedStatement::NodeDecl {
                node_type: fields[2].to_string(),
                name: fields[1].to_string(),
                tv: Some(tv),
            });
            seen.insert(fields[1]);
            continue;
        }
        if fields.len() != 3 {
            return Err(TsvError::BadColumnCount {
                line: lineno,
                expected: 3,
                found: fields.len(),
            });
        }
        let (src, predicate, dst) = (fields[0], fields[1], fields[2]);
        for endpoint in [src, dst] {
            if seen.insert(endpoint) {
                statements.push(ParsedStatement::NodeDecl {
                    node_type: node_type(endpoint).to_string(),
                    name: endpoint.to_string(),
                    tv: None,
                });
            }
        }
        let endpoint_ref = |name: &str| NodeRef {
            node_type: node_type(name).to_string(),
            name: name.to_string(),
            tv: None,
        };
        statements.push(ParsedStatement::LinkDecl {
            link_type: predicate.to_string(),
            src: endpoint_ref(src),
            dst: endpoint_ref(dst),
            tv: None,
        });
    }
    Ok(statements)
}

fn exportable(name: &str) -> Result<&str, TsvError> {
    let reserved = name == "@node" || name.starts_with('#');
    if reserved || name.contains('\t') || name.contains('\n') || name.contains('\r') {
        return Err(TsvError::Unrepresentable(name.to_string()));
    }
    Ok(name)
}

/// Every node as an `@node` line in id order, then every edge in id order.
/// Reparsing with the same registry reproduces the graph exactly.
pub fn export_graph_tsv(graph: &KnowledgeGraph) -> Result<String, TsvError> {
    let mut out = String::new();
    for node in graph.nodes() {
        out.push_str(&format!(
            "@node\t{}\t{}\t{}\t{}\n",
            exportable(&node.name)?,
            exportable(&node.node_type)?,
            node.tv.strength,
            node.tv.confidence
        ));
    }
    for edge in graph.edges() {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            exportable(&graph.node(edge.src).name)?,
            exportable(&edge.predicate)?,
            exportable(&graph.node(edge.dst).name)?
        ));
    }
    Ok(out)
}
