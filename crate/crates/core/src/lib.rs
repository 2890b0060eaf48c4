//! Embed the nodes of a truth-valued labeled knowledge graph with random-walk
//! skip-gram training, compute fuzzy intensional-logic measures over the same
//! graph, and quantify how well vector differences track logic differences.
//!
//! The pipeline runs in stages, each usable on its own:
//!
//! 1. [`parse`] loads graphs from an s-expression dialect or a TSV triple format.
//! 2. [`graph`] holds the frozen in-memory graph with adjacency and predicate registry.
//! 3. [`walk`] generates random-walk corpora whose tokens alternate node names
//!    and edge labels.
//! 4. [`embed`] trains skip-gram-with-negative-sampling token embeddings.
//! 5. [`intensional`] computes fuzzy property sets and intensional
//!    inheritance / similarity / difference measures.
//! 6. [`align`] scores quadruples of nodes on both the vector side and the
//!    logic side and summarizes their agreement; [`planted`] generates
//!    synthetic graphs with known analogy structure for benchmarking.
//! 7. [`guide`] walks the embedding segment between premises and a conclusion
//!    and proposes intermediate nodes.

pub mod align;
pub mod embed;
pub mod graph;
pub mod guide;
pub mod intensional;
pub mod parse;
pub mod planted;
pub mod seed;
pub mod truth;
pub mod walk;

pub use graph::{GraphBuilder, KnowledgeGraph, NodeId, PropertyToken};
pub use truth::TruthValue;
