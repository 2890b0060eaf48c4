//! Skip-gram-with-negative-sampling embeddings over walk corpora.
//!
//! The trainer consumes the exported corpus form: space-free tokens, one
//! sentence per line. Node names containing spaces are looked up through
//! their mangled form (see [`crate::walk::mangle_token`]).
//!
//! Deterministic mode is strictly sequential and bit-stable for a given
//! (corpus, config); all vectors are f64 so analytic gradients can be
//! checked against central finite differences.

mod corpus;
mod sgns;
mod table;
mod trainer;

pub use corpus::{build_vocab, sentences_from_text, Vocab};
pub use sgns::{SgnsGradients, SgnsModel};
pub use table::{load_table, load_vocab_meta, save_table, save_vocab_meta, EmbeddingTable};
pub use trainer::{train, train_with_report, TrainConfig, TrainReport};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EmbedError {
    #[error("corpus has no sentences")]
    EmptyCorpus,
    #[error("no token reaches min_token_count")]
    EmptyVocab,
    #[error("unknown token `{0}`")]
    UnknownToken(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("bad train config: {0}")]
    InvalidConfig(&'static str),
    #[error("embedding file line {line}: {message}")]
    BadFormat { line: usize, message: String },
}
