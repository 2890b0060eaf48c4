//! Loading graphs from text: a small s-expression dialect and a TSV triple
//! format, both lowered to the same [`ParsedStatement`] stream.

mod lower;
mod sexpr;
mod tsv;

pub use lower::{
    lower_to_statements, LowerDiagnostic, LowerErrorKind, LowerOutcome, NodeRef, ParsedStatement,
};
pub use sexpr::{parse_sexpr, pretty_print, SExpr, SExprKind, SexprError};
pub use tsv::{export_graph_tsv, parse_graph_tsv, TsvError};
