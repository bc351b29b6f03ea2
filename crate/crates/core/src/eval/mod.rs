//! Expression evaluation and recalculation.

pub(crate) mod graph;
pub(crate) mod plan;
mod recalc;

use std::time::Duration;

use crate::address::{CellAddress, RangeRef, Reference};
use crate::builtins;
use crate::formula::{BinaryOp, Expr, RefTarget, UnaryOp};
use crate::value::{coerce, compare_scalars, Array, Coercion, ErrorKind, Value};
use crate::workspace::{CellId, Workspace};
use graph::RangeKey;

/// Counters reported by one recalculation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EvalStats {
    /// Formula evaluations, including those inside table passes.
    pub cell_evaluations: u64,
    /// Input substitutions performed by data tables.
    pub body_passes: u64,
    /// Input restores performed by data tables (one per table evaluated).
    pub table_restores: u64,
    pub wall_time: Duration,
}

impl EvalStats {
    pub fn merge(&mut self, other: &EvalStats) {
        self.cell_evaluations += other.cell_evaluations;
        self.body_passes += other.body_passes;
        self.table_restores += other.table_restores;
        self.wall_time += other.wall_time;
    }
}

/// Largest range that will be materialized as an array.
const MAX_RANGE_CELLS: u64 = 4_000_000;
/// Function nesting limit.
pub const MAX_CALL_DEPTH: usize = 64;

/// Intermediate result: a value, a live reference, or an empty argument.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Operand {
    Value(Value),
    Ref(RangeKey),
    Omitted,
}

impl From<Value> for Operand {
    fn from(v: Value) -> Self {
        Operand::Value(v)
    }
}

impl From<ErrorKind> for Operand {
    fn from(e: ErrorKind) -> Self {
        Operand::Value(Value::Error(e))
    }
}

/// Evaluation context for one formula cell.
pub(crate) struct Evaluator<'a> {
    pub ws: &'a Workspace,
    pub cell: CellId,
    depth: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(ws: &'a Workspace, cell: CellId) -> Self {
        Evaluator { ws, cell, depth: 0 }
    }

    /// Qualified address of the cell being evaluated.
    pub fn context_address(&self) -> CellAddress {
        self.ws.address_of(self.cell)
    }

    /// Evaluates a formula to the value stored in its cell: references are
    /// read, arrays reduced to their top-left element, and a Blank result
    /// becomes empty text.
    pub fn evaluate_formula(&mut self, expr: &Expr) -> Value {
        match self.value(expr).into_scalar() {
            Value::Blank => Value::Text(String::new()),
            v => v,
        }
    }

    pub fn eval(&mut self, expr: &Expr) -> Operand {
        match expr {
            Expr::Literal(v) => Operand::Value(v.clone()),
            Expr::Omitted => Operand::Omitted,
            Expr::ArrayConst(a) => Operand::Value(Value::Array(a.clone())),
            Expr::Ref(target) => self.resolve_target(target),
            Expr::Unary(op, inner) => {
                let v = self.value(inner);
                let op = *op;
                Operand::Value(lift(&[v], &mut |args| unary(op, &args[0])))
            }
            Expr::Binary(op, l, r) => {
                let lv = self.value(l);
                let rv = self.value(r);
                let op = *op;
                Operand::Value(lift(&[lv, rv], &mut |args| binary(op, &args[0], &args[1])))
            }
            Expr::Call(name, args) => {
                let Some(spec) = builtins::lookup(name) else {
                    return ErrorKind::Name.into();
                };
                if args.len() < spec.min_args || args.len() > spec.max_args {
                    return ErrorKind::Value.into();
                }
                if self.depth >= MAX_CALL_DEPTH {
                    return ErrorKind::Num.into();
                }
                self.depth += 1;
                let out = (spec.implementation)(self, args);
                self.depth -= 1;
                out
            }
        }
    }

    /// Evaluates and reads through references.
    pub fn value(&mut self, expr: &Expr) -> Value {
        let op = self.eval(expr);
        self.deref(op)
    }

    /// Evaluates in scalar context.
    pub fn scalar(&mut self, expr: &Expr) -> Value {
        self.value(expr).into_scalar()
    }

    pub fn deref(&self, op: Operand) -> Value {
        match op {
            Operand::Value(v) => v,
            Operand::Omitted => Value::Blank,
            Operand::Ref(r) => self.read_range(&r),
        }
    }

    pub fn read_range(&self, r: &RangeKey) -> Value {
        if r.r1 == r.r2 && r.c1 == r.c2 {
            return self.read_cell(r.r1, r.c1, r);
        }
        if r.cell_count() > MAX_RANGE_CELLS {
            return Value::Error(ErrorKind::Num);
        }
        let rows = (r.r2 - r.r1 + 1) as usize;
        let cols = (r.c2 - r.c1 + 1) as usize;
        let mut data = Vec::with_capacity(rows * cols);
        for row in r.r1..=r.r2 {
            for col in r.c1..=r.c2 {
                data.push(self.read_cell(row, col, r));
            }
        }
        Value::Array(Array::new(rows, cols, data))
    }

    fn read_cell(&self, row: u32, col: u32, r: &RangeKey) -> Value {
        self.ws
            .cached_by_id(CellId {
                book: r.book,
                sheet: r.sheet,
                row,
                col,
            })
            .clone()
    }

    /// True if the cell at the top-left of `r` has no value.
    pub fn is_blank_ref(&self, r: &RangeKey) -> bool {
        matches!(self.read_cell(r.r1, r.c1, r), Value::Blank)
    }

    pub fn resolve_reference(&self, reference: &Reference) -> Operand {
        let range = reference.to_range();
        self.resolve_range(&range)
    }

    pub fn resolve_range(&self, range: &RangeRef) -> Operand {
        match self.ws.range_key(range) {
            Some(key) => Operand::Ref(key),
            None => ErrorKind::Ref.into(),
        }
    }

    fn resolve_target(&self, target: &RefTarget) -> Operand {
        match target {
            RefTarget::Cell(c) => self.resolve_reference(&Reference::Cell(c.clone())),
            RefTarget::Range(r) => self.resolve_range(r),
            RefTarget::Name { workbook, name } => match self.ws.resolve_name(workbook.as_deref(), name) {
                Some(target) => self.resolve_reference(target),
                None => ErrorKind::Name.into(),
            },
        }
    }

    /// Range back to a qualified reference, for XADR and friends.
    pub fn range_ref(&self, key: &RangeKey) -> RangeRef {
        let wb = &self.ws.workbooks[key.book as usize];
        let sheet = &wb.sheets[key.sheet as usize].name;
        let base = CellAddress::new(wb.name.clone(), sheet.clone(), key.c1, key.r1);
        RangeRef::new(base.clone(), base.with_coords(key.c2, key.r2))
    }
}

/// Applies `f` element-wise when any argument is an array with more than
/// one element; scalars (and 1x1 arrays) broadcast. Arrays of different
/// shapes produce an array of #VALUE! covering the larger extent.
pub(crate) fn lift(args: &[Value], f: &mut dyn FnMut(&[Value]) -> Value) -> Value {
    let mut dims: Option<(usize, usize)> = None;
    let mut mismatch = false;
    let mut extent = (1, 1);
    for a in args {
        if let Value::Array(arr) = a {
            if arr.dims() == (1, 1) {
                continue;
            }
            extent = (extent.0.max(arr.rows()), extent.1.max(arr.cols()));
            match dims {
                None => dims = Some(arr.dims()),
                Some(d) if d != arr.dims() => mismatch = true,
                Some(_) => {}
            }
        }
    }
    let Some((rows, cols)) = dims else {
        let scalars: Vec<Value> = args.iter().map(|a| a.as_scalar().clone()).collect();
        return f(&scalars);
    };
    if mismatch {
        return Value::Array(Array::filled(extent.0, extent.1, Value::Error(ErrorKind::Value)));
    }
    let mut data = Vec::with_capacity(rows * cols);
    let mut scratch = Vec::with_capacity(args.len());
    for r in 0..rows {
        for c in 0..cols {
            scratch.clear();
            for a in args {
                scratch.push(match a {
                    Value::Array(arr) if arr.dims() != (1, 1) => arr.get(r, c).expect("same dims").clone(),
                    other => other.as_scalar().clone(),
                });
            }
            data.push(f(&scratch).into_scalar());
        }
    }
    Value::Array(Array::new(rows, cols, data))
}

fn unary(op: UnaryOp, v: &Value) -> Value {
    match v.as_number() {
        Ok(n) => Value::Number(if op == UnaryOp::Neg { -n } else { n }),
        Err(e) => Value::Error(e),
    }
}

fn number_result(n: f64) -> Value {
    if n.is_finite() {
        Value::Number(if n == 0.0 { 0.0 } else { n })
    } else {
        Value::Error(ErrorKind::Num)
    }
}

pub(crate) fn binary(op: BinaryOp, l: &Value, r: &Value) -> Value {
    if let Value::Error(e) = l {
        return Value::Error(*e);
    }
    if let Value::Error(e) = r {
        return Value::Error(*e);
    }
    match op {
        BinaryOp::Concat => match (coerce(l, Coercion::Text), coerce(r, Coercion::Text)) {
            (Value::Text(a), Value::Text(b)) => Value::Text(a + &b),
            _ => Value::Error(ErrorKind::Value),
        },
        BinaryOp::Eq | BinaryOp::Ne | BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => {
            let ord = compare_scalars(l, r);
            Value::Boolean(match op {
                BinaryOp::Eq => ord.is_eq(),
                BinaryOp::Ne => ord.is_ne(),
                BinaryOp::Lt => ord.is_lt(),
                BinaryOp::Le => ord.is_le(),
                BinaryOp::Gt => ord.is_gt(),
                _ => ord.is_ge(),
            })
        }
        _ => {
            let a = match l.as_number() {
                Ok(a) => a,
                Err(e) => return Value::Error(e),
            };
            let b = match r.as_number() {
                Ok(b) => b,
                Err(e) => return Value::Error(e),
            };
            match op {
                BinaryOp::Add => number_result(a + b),
                BinaryOp::Sub => number_result(a - b),
                BinaryOp::Mul => number_result(a * b),
                BinaryOp::Div if b == 0.0 => Value::Error(ErrorKind::Div0),
                BinaryOp::Div => number_result(a / b),
                BinaryOp::Pow if a == 0.0 && b < 0.0 => Value::Error(ErrorKind::Div0),
                BinaryOp::Pow => number_result(a.powf(b)),
                _ => unreachable!(),
            }
        }
    }
}

/// Evaluates a standalone formula in the context of `cell` without
/// storing anything.
pub fn evaluate_in(ws: &Workspace, cell: &CellAddress, source: &str) -> Result<Value, crate::ModelError> {
    let id = ws.require_id(cell)?;
    let context = ws.address_of(id);
    let ast = crate::formula::parse_formula(source, &context).map_err(|source| crate::ModelError::Formula {
        cell: context.to_string(),
        source,
    })?;
    Ok(Evaluator::new(ws, id).evaluate_formula(&ast))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ws() -> (Workspace, CellAddress) {
        let mut ws = Workspace::new();
        ws.add_workbook("Book").unwrap();
        ws.add_sheet("Book", "Sheet1").unwrap();
        (ws, CellAddress::new("Book", "Sheet1", 10, 10))
    }

    fn eval(src: &str) -> Value {
        let (ws, at) = ws();
        evaluate_in(&ws, &at, src).unwrap()
    }

    #[test]
    fn arithmetic_oracle() {
        // 0*10+2*9+0*8+1*7+0*6+3*5+8*4+0*3+1*2 = 74 for prefix "020103801"
        let sum: u32 = "020103801"
            .chars()
            .zip((2..=10).rev())
            .map(|(c, w)| c.to_digit(10).unwrap() * w)
            .sum();
        assert_eq!(sum, 74);
        assert_eq!(eval("12-MOD(74,11)"), Value::Number(4.0));
    }

    #[test]
    fn concat_coerces() {
        assert_eq!(eval("\"A\" & 5"), Value::text("A5"));
        assert_eq!(eval("1.5&TRUE"), Value::text("1.5TRUE"));
    }

    #[test]
    fn operators() {
        assert_eq!(eval("-2^2"), Value::Number(4.0));
        assert_eq!(eval("2+3*4"), Value::Number(14.0));
        assert_eq!(eval("1/0"), Value::Error(ErrorKind::Div0));
        assert_eq!(eval("\"x\"+1"), Value::Error(ErrorKind::Value));
        assert_eq!(eval("\"abc\"=\"ABC\""), Value::Boolean(true));
        assert_eq!(eval("\"3\"+1"), Value::Number(4.0));
        assert_eq!(eval("#N/A+1"), Value::Error(ErrorKind::NA));
        assert_eq!(eval("1<2"), Value::Boolean(true));
        assert_eq!(eval("10^400"), Value::Error(ErrorKind::Num));
    }

    #[test]
    fn blank_reference_yields_empty_text() {
        assert_eq!(eval("A1"), Value::text(""));
        assert_eq!(eval("A1+1"), Value::Number(1.0));
    }

    #[test]
    fn unknown_function_and_name() {
        assert_eq!(eval("NOPE(1)"), Value::Error(ErrorKind::Name));
        assert_eq!(eval("nothing_here"), Value::Error(ErrorKind::Name));
        assert_eq!(eval("[Elsewhere]Sheet1!A1"), Value::Error(ErrorKind::Ref));
    }

    #[test]
    fn array_top_left_in_scalar_context() {
        assert_eq!(eval("{7;8;9}"), Value::Number(7.0));
        assert_eq!(eval("{1;2}+{10;20}"), Value::Number(11.0));
    }

    #[test]
    fn lifting_shapes() {
        // {1;2} + {1;2;3}: every shape pair in 1..3 rows mismatches unless equal
        for a in 1..=3usize {
            for b in 1..=3usize {
                let x = Value::Array(Array::column((1..=a).map(|n| Value::Number(n as f64)).collect()));
                let y = Value::Array(Array::column((1..=b).map(|n| Value::Number(n as f64)).collect()));
                let out = lift(&[x, y], &mut |v| binary(BinaryOp::Add, &v[0], &v[1]));
                let Value::Array(out) = out else {
                    // both 1x1: broadcast to a scalar
                    assert_eq!((a, b), (1, 1));
                    continue;
                };
                assert_eq!(out.dims(), (a.max(b), 1));
                let all_err = out.values().iter().all(|v| *v == Value::Error(ErrorKind::Value));
                assert_eq!(all_err, a != b && a > 1 && b > 1, "shapes {a} and {b}");
            }
        }
    }

    #[test]
    fn call_depth_limit() {
        let (ws, at) = ws();
        let deep = format!("{}1{}", "SUM(".repeat(70), ")".repeat(70));
        assert_eq!(evaluate_in(&ws, &at, &deep).unwrap(), Value::Error(ErrorKind::Num));
        let ok = format!("{}1{}", "SUM(".repeat(60), ")".repeat(60));
        assert_eq!(evaluate_in(&ws, &at, &ok).unwrap(), Value::Number(1.0));
    }
}
