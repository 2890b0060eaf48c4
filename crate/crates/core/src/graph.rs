//! Truth-valued knowledge graph over labeled binary edges.
//!
//! Construction goes through [`GraphBuilder`] (single writer); `freeze`
//! produces an immutable [`KnowledgeGraph`] that is safe to share across
//! threads. Edge labels come from a [`PredicateRegistry`] that assigns each
//! predicate a forward and an inverse label and flags it as membership
//! and/or property.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::parse::ParsedStatement;
use crate::truth::TruthValue;

/// Dense node handle. Valid only for the graph that issued it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub(crate) u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Dense edge handle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub(crate) u32);

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeRecord {
    pub id: NodeId,
    pub name: String,
    pub node_type: String,
    pub tv: TruthValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    pub id: EdgeId,
    pub predicate: String,
    pub src: NodeId,
    pub dst: NodeId,
    pub tv: TruthValue,
}

/// Registry-derived facts about one predicate.
#[derive(Debug, Clone, PartialEq)]
pub struct PredicateInfo {
    pub forward_label: String,
    pub inverse_label: String,
    pub is_membership: bool,
    /// For membership predicates: true when the member sits on the dst side
    /// (concept→member edges such as `has-gene-ontology-member`).
    pub member_is_dst: bool,
    pub is_property: bool,
}

/// Traversal direction for adjacency queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
    Both,
}

/// Classifies predicates by name. Patterns use `*` as a wildcard; membership
/// patterns prefixed `inv:` mark predicates whose member is the edge dst.
#[derive(Debug, Clone)]
pub struct PredicateRegistry {
    membership: Vec<String>,
    property_exclude: Vec<String>,
    inverse_overrides: HashMap<String, String>,
}

impl Default for PredicateRegistry {
    fn default() -> Self {
        PredicateRegistry {
            membership: vec!["MemberLink".to_string(), "inv:has-*-member".to_string()],
            property_exclude: Vec::new(),
            inverse_overrides: HashMap::new(),
        }
    }
}

impl PredicateRegistry {
    pub fn set_membership(&mut self, patterns: Vec<String>) {
        self.membership = patterns;
    }

    pub fn set_property_exclude(&mut self, patterns: Vec<String>) {
        self.property_exclude = patterns;
    }

    pub fn set_inverse(&mut self, predicate: &str, label: &str) {
        self.inverse_overrides
            .insert(predicate.to_string(), label.to_string());
    }

    pub fn membership_patterns(&self) -> &[String] {
        &self.membership
    }

    pub fn property_exclude_patterns(&self) -> &[String] {
        &self.property_exclude
    }

    fn classify(&self, predicate: &str) -> PredicateInfo {
        let inverse_label = self
            .inverse_overrides
            .get(predicate)
            .cloned()
            .unwrap_or_else(|| format!("{predicate}-inverse"));
        let mut is_membership = false;
        let mut member_is_dst = false;
        for pattern in &self.membership {
            let (inv, pat) = match pattern.strip_prefix("inv:") {
                Some(rest) => (true, rest),
                None => (false, pattern.as_str()),
            };
            if glob_match(pat, predicate) {
                is_membership = true;
                member_is_dst = inv;
                break;
            }
        }
        let is_property = !self
            .property_exclude
            .iter()
            .any(|p| glob_match(p, predicate));
        PredicateInfo {
            forward_label: predicate.to_string(),
            inverse_label,
            is_membership,
            member_is_dst,
            is_property,
        }
    }
}

/// `*` matches any substring, other characters match literally.
fn glob_match(pattern: &str, text: &str) -> bool {
    let segments: Vec<&str> = pattern.split('*').collect();
    if segments.len() == 1 {
        return pattern == text;
    }
    let mut rest = match text.strip_prefix(segments[0]) {
        Some(r) => r,
        None => return false,
    };
    for segment in &segments[1..segments.len() - 1] {
        if segment.is_empty() {
            continue;
        }
        match rest.find(segment) {
            Some(i) => rest = &rest[i + segment.len()..],
            None => return false,
        }
    }
    let last = segments[segments.len() - 1];
    rest.ends_with(last)
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GraphError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("name `{name}` matches {count} nodes; qualify with a node type")]
    AmbiguousName { name: String, count: usize },
    #[error("edge label `{0}` is claimed by more than one predicate direction")]
    LabelClash(String),
}

/// Per-call ingest counters.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct IngestReport {
    pub nodes_added: usize,
    pub edges_added: usize,
    pub duplicate_edges: usize,
}

impl fmt::Display for IngestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "nodes={} edges={} dups={}",
            self.nodes_added, self.edges_added, self.duplicate_edges
        )
    }
}

/// One edge attribute of a node: the label seen from the node plus the
/// neighbor at the far end.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropertyToken {
    pub label: String,
    pub neighbor: NodeId,
}

#[derive(Debug, Default)]
pub struct AuditReport {
    pub violations: Vec<String>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Mutable accumulation stage. Duplicate declarations merge truth values:
/// an explicit tv replaces a defaulted one, otherwise higher confidence
/// wins and ties keep the stored value.
pub struct GraphBuilder {
    registry: PredicateRegistry,
    nodes: Vec<NodeRecord>,
    node_tv_explicit: Vec<bool>,
    node_index: HashMap<(String, String), NodeId>,
    name_index: HashMap<String, Vec<NodeId>>,
    edges: Vec<EdgeRecord>,
    edge_tv_explicit: Vec<bool>,
    edge_index: HashMap<(NodeId, NodeId, String), EdgeId>,
    predicate_order: Vec<String>,
    predicate_seen: HashSet<String>,
}

impl Default for GraphBuilder {
    fn default() -> Self {
        GraphBuilder::new(PredicateRegistry::default())
    }
}

impl GraphBuilder {
    pub fn new(registry: PredicateRegistry) -> Self {
        GraphBuilder {
            registry,
            nodes: Vec::new(),
            node_tv_explicit: Vec::new(),
            node_index: HashMap::new(),
            name_index: HashMap::new(),
            edges: Vec::new(),
            edge_tv_explicit: Vec::new(),
            edge_index: HashMap::new(),
            predicate_order: Vec::new(),
            predicate_seen: HashSet::new(),
        }
    }

    pub fn add_statements(&mut self, stmts: &[ParsedStatement]) -> IngestReport {
        let mut report = IngestReport::default();
        for stmt in stmts {
            match stmt {
                ParsedStatement::NodeDecl {
                    node_type,
                    name,
                    tv,
                } => {
                    self.upsert_node(name, node_type, *tv, &mut report);
                }
                ParsedStatement::LinkDecl {
                    link_type,
                    src,
                    dst,
                    tv,
                } => {
                    let s = self.upsert_node(&src.name, &src.node_type, src.tv, &mut report);
                    let d = self.upsert_node(&dst.name, &dst.node_type, dst.tv, &mut report);
                    self.upsert_edge(s, d, link_type, *tv, &mut report);
                }
            }
        }
        report
    }

    fn upsert_node(
        &mut self,
        name: &str,
        node_type: &str,
        tv: Option<TruthValue>,
        report: &mut IngestReport,
    ) -> NodeId {
        let key = (name.to_string(), node_type.to_string());
        if let Some(&id) = self.node_index.get(&key) {
            let record = &mut self.nodes[id.index()];
            merge_tv(&mut record.tv, &mut self.node_tv_explicit[id.index()], tv);
            return id;
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(NodeRecord {
            id,
            name: name.to_string(),
            node_type: node_type.to_string(),
            tv: tv.unwrap_or(TruthValue::DEFAULT),
        });
        self.node_tv_explicit.push(tv.is_some());
        self.node_index.insert(key, id);
        self.name_index.entry(name.to_string()).or_default().push(id);
        report.nodes_added += 1;
        id
    }

    fn upsert_edge(
        &mut self,
        src: NodeId,
        dst: NodeId,
        predicate: &str,
        tv: Option<TruthValue>,
        report: &mut IngestReport,
    ) {
        let key = (src, dst, predicate.to_string());
        if let Some(&id) = self.edge_index.get(&key) {
            let record = &mut self.edges[id.index()];
            merge_tv(&mut record.tv, &mut self.edge_tv_explicit[id.index()], tv);
            report.duplicate_edges += 1;
            return;
        }
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push(EdgeRecord {
            id,
            predicate: predicate.to_string(),
            src,
            dst,
            tv: tv.unwrap_or(TruthValue::DEFAULT),
        });
        self.edge_tv_explicit.push(tv.is_some());
        self.edge_index.insert(key, id);
        if self.predicate_seen.insert(predicate.to_string()) {
            self.predicate_order.push(predicate.to_string());
        }
        report.edges_added += 1;
    }

    /// Classifies predicates, builds adjacency, and seals the graph.
    pub fn freeze(self) -> Result<KnowledgeGraph, GraphError> {
        let predicates: Vec<PredicateInfo> = self
            .predicate_order
            .iter()
            .map(|p| self.registry.classify(p))
            .collect();
        let mut labels = HashSet::new();
        for info in &predicates {
            for label in [&info.forward_label, &info.inverse_label] {
                if !labels.insert(label.clone()) {
                    return Err(GraphError::LabelClash(label.clone()));
                }
            }
        }
        let predicate_index = predicates
            .iter()
            .enumerate()
            .map(|(i, p)| (p.forward_label.clone(), i))
            .collect();

        let mut outgoing = vec![Vec::new(); self.nodes.len()];
        let mut incoming = vec![Vec::new(); self.nodes.len()];
        for edge in &self.edges {
            outgoing[edge.src.index()].push(edge.id);
            incoming[edge.dst.index()].push(edge.id);
        }

        let mut graph = KnowledgeGraph {
            nodes: self.nodes,
            edges: self.edges,
            predicates,
            predicate_index,
            outgoing,
            incoming,
            node_index: self.node_index,
            name_index: self.name_index,
            fingerprint: 0,
        };
        graph.fingerprint = graph.compute_fingerprint();
        Ok(graph)
    }
}

fn merge_tv(stored: &mut TruthValue, stored_explicit: &mut bool, incoming: Option<TruthValue>) {
    if let Some(tv) = incoming {
        if !*stored_explicit || tv.confidence > stored.confidence {
            *stored = tv;
        }
        *stored_explicit = true;
    }
}

/// Frozen graph. All queries take ids issued by this graph; passing ids
/// from another graph panics on out-of-range access.
#[derive(Debug)]
pub struct KnowledgeGraph {
    nodes: Vec<NodeRecord>,
    edges: Vec<EdgeRecord>,
    predicates: Vec<PredicateInfo>,
    predicate_index: HashMap<String, usize>,
    outgoing: Vec<Vec<EdgeId>>,
    incoming: Vec<Vec<EdgeId>>,
    node_index: HashMap<(String, String), NodeId>,
    name_index: HashMap<String, Vec<NodeId>>,
    fingerprint: u64,
}

impl KnowledgeGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn predicate_count(&self) -> usize {
        self.predicates.len()
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn predicates(&self) -> &[PredicateInfo] {
        &self.predicates
    }

    pub fn node(&self, id: NodeId) -> &NodeRecord {
        &self.nodes[id.index()]
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    /// FNV-1a digest over nodes, edges, and predicate labels; stable across
    /// runs for identical content.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Resolves a bare name. Errors when the name is absent or shared by
    /// nodes of different types.
    pub fn resolve(&self, name: &str) -> Result<NodeId, GraphError> {
        match self.name_index.get(name).map(Vec::as_slice) {
            None | Some([]) => Err(GraphError::UnknownNode(name.to_string())),
            Some([id]) => Ok(*id),
            Some(ids) => Err(GraphError::AmbiguousName {
                name: name.to_string(),
                count: ids.len(),
            }),
        }
    }

    pub fn resolve_typed(&self, name: &str, node_type: &str) -> Result<NodeId, GraphError> {
        self.node_index
            .get(&(name.to_string(), node_type.to_string()))
            .copied()
            .ok_or_else(|| GraphError::UnknownNode(format!("{node_type} `{name}`")))
    }

    pub fn predicate(&self, forward_label: &str) -> Option<&PredicateInfo> {
        self.predicate_index
            .get(forward_label)
            .map(|&i| &self.predicates[i])
    }

    fn pred_info(&self, forward_label: &str) -> &PredicateInfo {
        &self.predicates[self.predicate_index[forward_label]]
    }

    /// Edge-label/neighbor pairs in edge-id order. Outgoing edges carry the
    /// forward label, incoming the inverse label.
    pub fn neighbors(&self, node: NodeId, direction: Direction) -> Vec<(&str, NodeId)> {
        let mut picks: Vec<(EdgeId, bool)> = Vec::new();
        if matches!(direction, Direction::Out | Direction::Both) {
            picks.extend(self.outgoing[node.index()].iter().map(|&e| (e, true)));
        }
        if matches!(direction, Direction::In | Direction::Both) {
            picks.extend(self.incoming[node.index()].iter().map(|&e| (e, false)));
        }
        picks.sort_by_key(|&(e, _)| e);
        picks
            .into_iter()
            .map(|(e, is_out)| {
                let edge = &self.edges[e.index()];
                let info = self.pred_info(&edge.predicate);
                if is_out {
                    (info.forward_label.as_str(), edge.dst)
                } else {
                    (info.inverse_label.as_str(), edge.src)
                }
            })
            .collect()
    }

    /// Member set of a concept via membership-flagged predicates. A node
    /// with no members is the singleton concept containing itself.
    pub fn members_of(&self, concept: NodeId) -> BTreeSet<NodeId> {
        let mut members = BTreeSet::new();
        for &e in &self.incoming[concept.index()] {
            let edge = &self.edges[e.index()];
            let info = self.pred_info(&edge.predicate);
            if info.is_membership && !info.member_is_dst {
                members.insert(edge.src);
            }
        }
        for &e in &self.outgoing[concept.index()] {
            let edge = &self.edges[e.index()];
            let info = self.pred_info(&edge.predicate);
            if info.is_membership && info.member_is_dst {
                members.insert(edge.dst);
            }
        }
        if members.is_empty() {
            members.insert(concept);
        }
        members
    }

    /// Properties of a node: (label, neighbor) over property-flagged edges
    /// in both directions.
    pub fn property_tokens_of(&self, node: NodeId) -> BTreeSet<PropertyToken> {
        let mut tokens = BTreeSet::new();
        for &e in &self.outgoing[node.index()] {
            let edge = &self.edges[e.index()];
            let info = self.pred_info(&edge.predicate);
            if info.is_property {
                tokens.insert(PropertyToken {
                    label: info.forward_label.clone(),
                    neighbor: edge.dst,
                });
            }
        }
        for &e in &self.incoming[node.index()] {
            let edge = &self.edges[e.index()];
            let info = self.pred_info(&edge.predicate);
            if info.is_property {
                tokens.insert(PropertyToken {
                    label: info.inverse_label.clone(),
                    neighbor: edge.src,
                });
            }
        }
        tokens
    }

    /// Cross-checks adjacency against the edge table and label uniqueness.
    pub fn audit(&self) -> AuditReport {
        let mut report = AuditReport::default();
        let mut out_seen = vec![0usize; self.edges.len()];
        let mut in_seen = vec![0usize; self.edges.len()];
        for (n, list) in self.outgoing.iter().enumerate() {
            for &e in list {
                match self.edges.get(e.index()) {
                    Some(edge) if edge.src.index() == n => out_seen[e.index()] += 1,
                    _ => report
                        .violations
                        .push(format!("outgoing list of n{n} holds foreign edge {e:?}")),
                }
            }
        }
        for (n, list) in self.incoming.iter().enumerate() {
            for &e in list {
                match self.edges.get(e.index()) {
                    Some(edge) if edge.dst.index() == n => in_seen[e.index()] += 1,
                    _ => report
                        .violations
                        .push(format!("incoming list of n{n} holds foreign edge {e:?}")),
                }
            }
        }
        for edge in &self.edges {
            if out_seen[edge.id.index()] != 1 {
                report.violations.push(format!(
                    "edge {:?} appears {} times in outgoing lists",
                    edge.id,
                    out_seen[edge.id.index()]
                ));
            }
            if in_seen[edge.id.index()] != 1 {
                report.violations.push(format!(
                    "edge {:?} appears {} times in incoming lists",
                    edge.id,
                    in_seen[edge.id.index()]
                ));
            }
        }
        let mut labels = HashSet::new();
        for info in &self.predicates {
            for label in [&info.forward_label, &info.inverse_label] {
                if !labels.insert(label) {
                    report
                        .violations
                        .push(format!("label `{label}` used twice across the registry"));
                }
            }
        }
        if self.node_index.len() != self.nodes.len() {
            report
                .violations
                .push("node index size differs from node table".to_string());
        }
        report
    }

    fn compute_fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        for node in &self.nodes {
            eat(b"N");
            eat(node.name.as_bytes());
            eat(b"\x1f");
            eat(node.node_type.as_bytes());
            eat(&node.tv.strength.to_bits().to_le_bytes());
            eat(&node.tv.confidence.to_bits().to_le_bytes());
        }
        for edge in &self.edges {
            eat(b"E");
            eat(&edge.src.0.to_le_bytes());
            eat(&edge.dst.0.to_le_bytes());
            eat(edge.predicate.as_bytes());
            eat(&edge.tv.strength.to_bits().to_le_bytes());
            eat(&edge.tv.confidence.to_bits().to_le_bytes());
        }
        for info in &self.predicates {
            eat(b"P");
            eat(info.forward_label.as_bytes());
            eat(b"\x1f");
            eat(info.inverse_label.as_bytes());
        }
        h
    }
}
