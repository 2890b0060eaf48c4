//! Lowering parsed s-expressions to node and link statements.
//!
//! Recognized shapes:
//!
//! ```text
//! (<TypeNode> "name" [stv])            node declaration
//! (<TypeLink> [stv] child child)       link declaration, children node-shaped
//! ```
//!
//! The head symbol's `Node`/`Link` suffix decides the kind, so unknown types
//! such as `EvaluationLink` still lower. Links must have exactly two
//! endpoints; n-ary forms (e.g. `ListLink` inference trails) are rejected
//! with a diagnostic rather than flattened. Lowering is total: every
//! top-level expression yields exactly one statement or one diagnostic.

use super::sexpr::SExpr;
use crate::truth::TruthValue;

/// Reference to a node from a link endpoint: the nested declaration
/// `(GeneNode "ITPR3")`, with any truth value it carried.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeRef {
    pub node_type: String,
    pub name: String,
    pub tv: Option<TruthValue>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedStatement {
    NodeDecl {
        node_type: String,
        name: String,
        /// `None` means the declaration carried no `stv`; stores substitute
        /// [`TruthValue::DEFAULT`].
        tv: Option<TruthValue>,
    },
    LinkDecl {
        link_type: String,
        src: NodeRef,
        dst: NodeRef,
        tv: Option<TruthValue>,
    },
}

impl ParsedStatement {
    pub fn node(node_type: &str, name: &str, tv: Option<TruthValue>) -> ParsedStatement {
        ParsedStatement::NodeDecl {
            node_type: node_type.to_string(),
            name: name.to_string(),
            tv,
        }
    }

    pub fn tv_or_default(&self) -> TruthValue {
        match self {
            ParsedStatement::NodeDecl { tv, .. } | ParsedStatement::LinkDecl { tv, .. } => {
                tv.unwrap_or(TruthValue::DEFAULT)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LowerErrorKind {
    /// An `stv` form that is not two in-range numbers, or more than one stv.
    MalformedStv,
    /// A link with a number of endpoints other than two.
    ArityError { link_type: String, found: usize },
    /// Anything not matching a node or link shape.
    UnknownShape,
}

/// One diagnostic for one top-level expression that failed to lower.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerDiagnostic {
    pub kind: LowerErrorKind,
    /// Byte position of the offending expression.
    pub pos: usize,
    pub message: String,
}

impl std::fmt::Display for LowerDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (at byte {})", self.message, self.pos)
    }
}

/// Result of lowering a document: statements for the expressions that
/// matched a shape, diagnostics for the ones that did not.
#[derive(Debug, Default, Clone)]
pub struct LowerOutcome {
    pub statements: Vec<ParsedStatement>,
    pub diagnostics: Vec<LowerDiagnostic>,
}

fn diag(kind: LowerErrorKind, pos: usize, message: impl Into<String>) -> LowerDiagnostic {
    LowerDiagnostic {
        kind,
        pos,
        message: message.into(),
    }
}

fn is_stv_form(expr: &SExpr) -> bool {
    expr.as_list()
        .and_then(|items| items.first())
        .and_then(|head| head.as_atom())
        == Some("stv")
}

fn parse_stv(expr: &SExpr) -> Result<TruthValue, LowerDiagnostic> {
    let items = expr.as_list().expect("stv form is a list");
    let bad = |msg: String| diag(LowerErrorKind::MalformedStv, expr.pos, msg);
    if items.len() != 3 {
        return Err(bad(format!(
            "stv expects 2 components, found {}",
            items.len() - 1
        )));
    }
    let mut parts = [0.0_f64; 2];
    for (slot, item) in parts.iter_mut().zip(&items[1..]) {
        let text = item
            .as_atom()
            .ok_or_else(|| bad("stv component is not a number".to_string()))?;
        *slot = text
            .parse::<f64>()
            .map_err(|_| bad(format!("stv component `{text}` is not a number")))?;
    }
    TruthValue::new(parts[0], parts[1])
        .ok_or_else(|| bad(format!("stv ({} {}) outside [0,1]", parts[0], parts[1])))
}

enum HeadKind {
    Node,
    Link,
}

fn head_kind(symbol: &str) -> Option<HeadKind> {
    if symbol.ends_with("Node") {
        Some(HeadKind::Node)
    } else if symbol.ends_with("Link") {
        Some(HeadKind::Link)
    } else {
        None
    }
}

/// Split children into at most one stv and the remaining items.
fn split_stv(items: &[SExpr]) -> Result<(Option<TruthValue>, Vec<&SExpr>), LowerDiagnostic> {
    let mut tv = None;
    let mut rest = Vec::new();
    for item in items {
        if is_stv_form(item) {
            if tv.is_some() {
                return Err(diag(
                    LowerErrorKind::MalformedStv,
                    item.pos,
                    "more than one stv on a single declaration",
                ));
            }
            tv = Some(parse_stv(item)?);
        } else {
            rest.push(item);
        }
    }
    Ok((tv, rest))
}

fn lower_node_ref(expr: &SExpr) -> Result<NodeRef, LowerDiagnostic> {
    let unknown = |msg: String| diag(LowerErrorKind::UnknownShape, expr.pos, msg);
    let items = expr
        .as_list()
        .ok_or_else(|| unknown("link endpoint must be a node declaration".to_string()))?;
    let head = items
        .first()
        .and_then(|h| h.as_atom())
        .ok_or_else(|| unknown("endpoint has no head symbol".to_string()))?;
    match head_kind(head) {
        Some(HeadKind::Node) => {}
        _ => return Err(unknown(format!("endpoint head `{head}` is not a node type"))),
    }
    let (tv, rest) = split_stv(&items[1..])?;
    match rest.as_slice() {
        [name] => {
            let name = name
                .as_atom()
                .ok_or_else(|| unknown("node name must be an atom".to_string()))?;
            Ok(NodeRef {
                node_type: head.to_string(),
                name: name.to_string(),
                tv,
            })
        }
        other => Err(unknown(format!(
            "node declaration expects a single name, found {} items",
            other.len()
        ))),
    }
}

fn lower_expr(expr: &SExpr) -> Result<ParsedStatement, LowerDiagnostic> {
    let unknown = |msg: String| diag(LowerErrorKind::UnknownShape, expr.pos, msg);
    let items = expr
        .as_list()
        .ok_or_else(|| unknown("top-level expression is not a list".to_string()))?;
    let head = items
        .first()
        .and_then(|h| h.as_atom())
        .ok_or_else(|| unknown("expression has no head symbol".to_string()))?;

    match head_kind(head) {
        Some(HeadKind::Node) => {
            let node = lower_node_ref(expr)?;
            Ok(ParsedStatement::NodeDecl {
                node_type: node.node_type,
                name: node.name,
                tv: node.tv,
            })
        }
        Some(HeadKind::Link) => {
            let (tv, endpoints) = split_stv(&items[1..])?;
            if endpoints.len() != 2 {
                return Err(diag(
                    LowerErrorKind::ArityError {
                        link_type: head.to_string(),
                        found: endpoints.len(),
                    },
                    expr.pos,
                    format!(
                        "{head} expects exactly 2 endpoints, found {}",
                        endpoints.len()
                    ),
                ));
            }
            let src = lower_node_ref(endpoints[0])?;
            let dst = lower_node_ref(endpoints[1])?;
            Ok(ParsedStatement::LinkDecl {
                link_type: head.to_string(),
                src,
                dst,
                tv,
            })
        }
        None => Err(unknown(format!(
            "head `{head}` has neither Node nor Link suffix"
        ))),
    }
}

/// Lower every top-level expression; nothing is silently dropped.
pub fn lower_to_statements(exprs: &[SExpr]) -> LowerOutcome {
    let mut out = LowerOutcome::default();
    for expr in exprs {
        match lower_expr(expr) {
            Ok(stmt) => out.statements.push(stmt),
            Err(d) => out.diagnostics.push(d),
        }
    }
    out
}
