//! Formula source text: tokens, syntax tree, parser and static dependency
//! extraction.

mod ast;
mod lexer;
mod parser;

pub use ast::{BinaryOp, Expr, RefTarget, UnaryOp};
pub use lexer::{tokenize, LexError, Token, TokenKind};
pub use parser::{parse_formula, FormulaError};

use crate::address::Reference;
use crate::builtins;

/// What a formula reads, as far as can be known before evaluating it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StaticDeps {
    pub refs: Vec<Reference>,
    /// Uses INDIRECT or OFFSET, whose targets are only known at run time.
    pub volatile: bool,
    /// Defined names that did not resolve; the formula evaluates to #NAME?.
    pub unresolved_names: Vec<String>,
}

/// Collects every reference in `expr`. Defined names are looked up with
/// `resolve_name(workbook_qualifier, name)`.
pub fn static_dependencies(expr: &Expr, resolve_name: &dyn Fn(Option<&str>, &str) -> Option<Reference>) -> StaticDeps {
    let mut deps = StaticDeps::default();
    expr.walk(&mut |node| match node {
        Expr::Ref(RefTarget::Cell(c)) => push_unique(&mut deps.refs, Reference::Cell(c.clone())),
        Expr::Ref(RefTarget::Range(r)) => push_unique(&mut deps.refs, Reference::Range(r.clone())),
        Expr::Ref(RefTarget::Name { workbook, name }) => match resolve_name(workbook.as_deref(), name) {
            Some(target) => push_unique(&mut deps.refs, target),
            None => deps.unresolved_names.push(name.clone()),
        },
        Expr::Call(name, _) if builtins::is_volatile(name) => deps.volatile = true,
        _ => {}
    });
    deps
}

fn push_unique(refs: &mut Vec<Reference>, r: Reference) {
    if !refs.contains(&r) {
        refs.push(r);
    }
}
