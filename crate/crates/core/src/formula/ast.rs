use std::fmt;

use crate::address::{format_reference, CellAddress, RangeRef, RefStyle, Reference};
use crate::value::{render_number, Array, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Concat,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "^",
            BinaryOp::Concat => "&",
            BinaryOp::Eq => "=",
            BinaryOp::Ne => "<>",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
        }
    }

    pub(crate) fn from_symbol(s: &str) -> Option<BinaryOp> {
        Some(match s {
            "+" => BinaryOp::Add,
            "-" => BinaryOp::Sub,
            "*" => BinaryOp::Mul,
            "/" => BinaryOp::Div,
            "^" => BinaryOp::Pow,
            "&" => BinaryOp::Concat,
            "=" => BinaryOp::Eq,
            "<>" => BinaryOp::Ne,
            "<" => BinaryOp::Lt,
            "<=" => BinaryOp::Le,
            ">" => BinaryOp::Gt,
            ">=" => BinaryOp::Ge,
            _ => return None,
        })
    }
}

/// Target of a reference node.
#[derive(Debug, Clone, PartialEq)]
pub enum RefTarget {
    Cell(CellAddress),
    Range(RangeRef),
    /// A defined name, optionally qualified by the workbook that owns it.
    Name {
        workbook: Option<String>,
        name: String,
    },
}

impl From<Reference> for RefTarget {
    fn from(r: Reference) -> Self {
        match r {
            Reference::Cell(c) => RefTarget::Cell(c),
            Reference::Range(r) => RefTarget::Range(r),
        }
    }
}

/// Parsed formula expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// A scalar literal.
    Literal(Value),
    /// An argument slot left empty, as in `TABLE(,A2)`.
    Omitted,
    Ref(RefTarget),
    ArrayConst(Array),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    /// Function call; the name is stored upper-case.
    Call(String, Vec<Expr>),
}

impl Expr {
    /// Pre-order walk over every node.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Unary(_, e) => e.walk(f),
            Expr::Binary(_, l, r) => {
                l.walk(f);
                r.walk(f);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.walk(f)),
            _ => {}
        }
    }
}

fn write_literal(f: &mut fmt::Formatter<'_>, v: &Value) -> fmt::Result {
    match v {
        Value::Number(n) => f.write_str(&render_number(*n)),
        Value::Text(s) => write!(f, "\"{}\"", s.replace('"', "\"\"")),
        Value::Boolean(b) => f.write_str(if *b { "TRUE" } else { "FALSE" }),
        Value::Error(e) => f.write_str(e.as_str()),
        Value::Blank => Ok(()),
        Value::Array(_) => unreachable!("literals are scalar"),
    }
}

/// Unparses with every reference fully qualified and every operator
/// application parenthesized, so the output reparses to the same tree in
/// any context.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Literal(v) => write_literal(f, v),
            Expr::Omitted => Ok(()),
            Expr::Ref(RefTarget::Cell(c)) => {
                f.write_str(&format_reference(&Reference::Cell(c.clone()), RefStyle::Qualified))
            }
            Expr::Ref(RefTarget::Range(r)) => {
                // keep 1x1 ranges as ranges
                let text = format_reference(&Reference::Range(r.clone()), RefStyle::Qualified);
                if r.top_left == r.bottom_right {
                    write!(f, "{text}:{}", r.bottom_right.local())
                } else {
                    f.write_str(&text)
                }
            }
            Expr::Ref(RefTarget::Name { workbook, name }) => {
                if let Some(wb) = workbook {
                    write!(f, "[{wb}]")?;
                }
                f.write_str(name)
            }
            Expr::ArrayConst(a) => {
                f.write_str("{")?;
                for r in 0..a.rows() {
                    if r > 0 {
                        f.write_str(";")?;
                    }
                    for c in 0..a.cols() {
                        if c > 0 {
                            f.write_str(",")?;
                        }
                        write_literal(f, a.get(r, c).expect("in bounds"))?;
                    }
                }
                f.write_str("}")
            }
            Expr::Unary(op, e) => {
                let sym = if *op == UnaryOp::Neg { "-" } else { "+" };
                write!(f, "{sym}({e})")
            }
            Expr::Binary(op, l, r) => write!(f, "({l}{}{r})", op.symbol()),
            Expr::Call(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
