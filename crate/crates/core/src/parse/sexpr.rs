//! S-expression reader producing an `Atom | List` tree with byte positions.
//!
//! The dialect is deliberately small: parenthesized lists, bare atoms,
//! double-quoted strings with `\"` and `\\` escapes, and `;` line comments.
//! Quoted strings preserve interior spaces. Whether an atom was written
//! quoted is not recorded; the printer re-quotes any atom that needs it, so
//! print-then-parse preserves structure.

use std::fmt;
use thiserror::Error;

/// One node of the parsed tree. Equality is structural and ignores positions.
#[derive(Debug, Clone)]
pub struct SExpr {
    pub kind: SExprKind,
    /// Byte offset of the first character of this expression in the input.
    pub pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SExprKind {
    Atom(String),
    List(Vec<SExpr>),
}

impl PartialEq for SExpr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl SExpr {
    pub fn atom(text: &str, pos: usize) -> SExpr {
        SExpr {
            kind: SExprKind::Atom(text.to_string()),
            pos,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match &self.kind {
            SExprKind::Atom(s) => Some(s),
            SExprKind::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match &self.kind {
            SExprKind::Atom(_) => None,
            SExprKind::List(items) => Some(items),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SexprError {
    #[error("unbalanced parenthesis at byte {pos} (line {line}, column {col})")]
    UnbalancedParen { pos: usize, line: usize, col: usize },
    #[error("unterminated string starting at byte {pos} (line {line}, column {col})")]
    UnterminatedString { pos: usize, line: usize, col: usize },
}

fn line_col(text: &str, pos: usize) -> (usize, usize) {
    let upto = &text.as_bytes()[..pos.min(text.len())];
    let line = upto.iter().filter(|&&b| b == b'\n').count() + 1;
    let col = pos - upto.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

fn is_delimiter(c: char) -> bool {
    c.is_whitespace() || matches!(c, '(' | ')' | '"' | ';')
}

/// Parse a document into its top-level expression sequence.
///
/// Empty input (or input that is all whitespace and comments) parses to an
/// empty list. Bare atoms are accepted at top level; shape enforcement is
/// the lowering pass's job.
pub fn parse_sexpr(text: &str) -> Result<Vec<SExpr>, SexprError> {
    let mut chars = text.char_indices().peekable();
    // Stack of open lists; each entry is (position of '(', children so far).
    let mut stack: Vec<(usize, Vec<SExpr>)> = Vec::new();
    let mut top: Vec<SExpr> = Vec::new();

    let err_unbalanced = |pos| {
        let (line, col) = line_col(text, pos);
        SexprError::UnbalancedParen { pos, line, col }
    };

    while let Some(&(pos, c)) = chars.peek() {
        match c {
            _ if c.is_whitespace() => {
                chars.next();
            }
            ';' => {
                for (_, c) in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '(' => {
                chars.next();
                stack.push((pos, Vec::new()));
            }
            ')' => {
                chars.next();
                let (open_pos, items) = stack.pop().ok_or_else(|| err_unbalanced(pos))?;
                let expr = SExpr {
                    kind: SExprKind::List(items),
                    pos: open_pos,
                };
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(expr),
                    None => top.push(expr),
                }
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                let mut closed = false;
                while let Some((_, c)) = chars.next() {
                    match c {
                        '"' => {
                            closed = true;
                            break;
                        }
                        '\\' => match chars.next() {
                            Some((_, '"')) => s.push('"'),
                            Some((_, '\\')) => s.push('\\'),
                            Some((_, other)) => {
                                s.push('\\');
                                s.push(other);
                            }
                            None => break,
                        },
                        other => s.push(other),
                    }
                }
                if !closed {
                    let (line, col) = line_col(text, pos);
                    return Err(SexprError::UnterminatedString { pos, line, col });
                }
                let expr = SExpr {
                    kind: SExprKind::Atom(s),
                    pos,
                };
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(expr),
                    None => top.push(expr),
                }
            }
            _ => {
                let mut s = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if is_delimiter(c) {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                let expr = SExpr {
                    kind: SExprKind::Atom(s),
                    pos,
                };
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(expr),
                    None => top.push(expr),
                }
            }
        }
    }

    if let Some(&(open_pos, _)) = stack.last() {
        return Err(err_unbalanced(open_pos));
    }
    Ok(top)
}

fn needs_quoting(atom: &str) -> bool {
    atom.is_empty() || atom.chars().any(|c| is_delimiter(c) || c == '\\')
}

fn write_expr(out: &mut String, expr: &SExpr) {
    match &expr.kind {
        SExprKind::Atom(s) => {
            if needs_quoting(s) {
                out.push('"');
                for c in s.chars() {
                    if c == '"' || c == '\\' {
                        out.push('\\');
                    }
                    out.push(c);
                }
                out.push('"');
            } else {
                out.push_str(s);
            }
        }
        SExprKind::List(items) => {
            out.push('(');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write_expr(out, item);
            }
            out.push(')');
        }
    }
}

/// Print a document one top-level expression per line. Reparsing the output
/// yields a structurally identical tree.
pub fn pretty_print(exprs: &[SExpr]) -> String {
    let mut out = String::new();
    for expr in exprs {
        write_expr(&mut out, expr);
        out.push('\n');
    }
    out
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(&mut s, self);
        f.write_str(&s)
    }
}
