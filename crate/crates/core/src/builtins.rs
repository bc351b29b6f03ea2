//! The builtin function registry.

use crate::address::{
    column_to_letters, format_reference, format_sheet_name, RangeRef, RefStyle, Reference, MAX_COLUMNS, MAX_ROWS,
};
use crate::eval::graph::RangeKey;
use crate::eval::{lift, Evaluator, Operand};
use crate::formula::Expr;
use crate::value::{coerce, parse_number, Array, Coercion, ErrorKind, Value};

pub(crate) type Implementation = fn(&mut Evaluator, &[Expr]) -> Operand;

/// Registry entry for one builtin.
#[derive(Clone, Copy)]
pub struct BuiltinSpec {
    pub name: &'static str,
    pub min_args: usize,
    pub max_args: usize,
    /// Re-evaluated on every recalculation.
    pub volatile: bool,
    /// Arguments are evaluated on demand rather than up front.
    pub lazy: bool,
    pub(crate) implementation: Implementation,
}

impl std::fmt::Debug for BuiltinSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BuiltinSpec")
            .field("name", &self.name)
            .field("min_args", &self.min_args)
            .field("max_args", &self.max_args)
            .field("volatile", &self.volatile)
            .field("lazy", &self.lazy)
            .finish()
    }
}

const fn spec(name: &'static str, min_args: usize, max_args: usize, implementation: Implementation) -> BuiltinSpec {
    BuiltinSpec {
        name,
        min_args,
        max_args,
        volatile: false,
        lazy: false,
        implementation,
    }
}

const VARIADIC: usize = 255;

static REGISTRY: &[BuiltinSpec] = &[
    BuiltinSpec {
        lazy: true,
        ..spec("IF", 2, 3, fn_if)
    },
    spec("MOD", 2, 2, fn_mod),
    spec("SUMPRODUCT", 1, VARIADIC, fn_sumproduct),
    spec("VALUE", 1, 1, fn_value),
    spec("MID", 3, 3, fn_mid),
    spec("MATCH", 2, 3, fn_match),
    spec("RIGHT", 1, 2, fn_right),
    spec("LEN", 1, 1, fn_len),
    spec("ISBLANK", 1, 1, fn_isblank),
    spec("INDEX", 2, 3, fn_index),
    BuiltinSpec {
        volatile: true,
        ..spec("INDIRECT", 1, 2, fn_indirect)
    },
    BuiltinSpec {
        volatile: true,
        ..spec("OFFSET", 3, 5, fn_offset)
    },
    spec("ADDRESS", 2, 5, fn_address),
    spec("ROW", 0, 1, fn_row),
    spec("COLUMN", 0, 1, fn_column),
    spec("ROWS", 1, 1, fn_rows),
    spec("COLUMNS", 1, 1, fn_columns),
    spec("XADR", 1, 1, fn_xadr),
    spec("SUM", 1, VARIADIC, fn_sum),
];

/// Looks a function up by name, case-insensitively.
pub fn lookup(name: &str) -> Option<&'static BuiltinSpec> {
    REGISTRY.iter().find(|s| s.name.eq_ignore_ascii_case(name))
}

pub fn is_volatile(name: &str) -> bool {
    lookup(name).is_some_and(|s| s.volatile)
}

/// Every registered builtin.
pub fn all() -> &'static [BuiltinSpec] {
    REGISTRY
}

fn err(e: ErrorKind) -> Operand {
    Operand::Value(Value::Error(e))
}

fn val(v: Value) -> Operand {
    Operand::Value(v)
}

/// Evaluates every argument to a value; omitted ones become `None`.
fn values(ev: &mut Evaluator, args: &[Expr]) -> Vec<Option<Value>> {
    args.iter()
        .map(|a| match ev.eval(a) {
            Operand::Omitted => None,
            op => Some(ev.deref(op)),
        })
        .collect()
}

fn or_default(v: Option<Value>, default: Value) -> Value {
    v.unwrap_or(default)
}

fn number(v: &Value) -> Result<f64, ErrorKind> {
    v.as_number()
}

fn fn_if(ev: &mut Evaluator, args: &[Expr]) -> Operand {
    let cond = match ev.scalar(&args[0]) {
        Value::Error(e) => return err(e),
        v => v,
    };
    match cond.as_bool() {
        Ok(true) => ev.eval(&args[1]),
        Ok(false) => match args.get(2) {
            Some(e) => ev.eval(e),
            None => val(Value::Boolean(false)),
        },
        Err(e) => err(e),
    }
}

fn fn_mod(ev: &mut Evaluator, args: &[Expr]) -> Operand {
    let vs: Vec<Value> = values(ev, args)
        .into_iter()
        .map(|v| or_default(v, Value::Blank))
        .collect();
    val(lift(&vs, &mut |a| {
        let (x, y) = match (number(&a[0]), number(&a[1])) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(e), _) | (_, Err(e)) => return Value::Error(e),
        };
        if y == 0.0 {
            return Value::Error(ErrorKind::Div0);
        }
        let r = x - y * (x / y).floor();
        Value::Number(if r == 0.0 { 0.0 } else { r })
    }))
}

fn as_array(v: Value) -> Array {
    match v {
        Value::Array(a) => a,
        scalar => Array::new(1, 1, vec![scalar]),
    }
}

fn fn_sumproduct(ev: &mut Evaluator, args: &[Expr]) -> Operand {
    let arrays: Vec<Array> = values(ev, args)
        .into_iter()
        .map(|v| as_array(or_default(v, Value::Blank)))
        .collect();
    let dims = arrays[0].dims();
    if arrays.iter().any(|a| a.dims() != dims) {
        return err(ErrorKind::Value);
    }
    for a in &arrays {
        if let Some(e) = a.values().iter().find_map(Value::error) {
            return err(e);
        }
    }
    let n = dims.0 * dims.1;
    let total: f64 = (0..n)
        .map(|i| {
            arrays
                .iter()
                .map(|a| match a.values()[i] {
                    Value::Number(x) => x,
                    _ => 0.0,
                })
                .product::<f64>()
        })
        .sum();
    val(Value::Number(total))
}

fn fn_value(ev: &mut Evaluator, args: &[Expr]) -> Operand {
    let vs: Vec<Value> = values(ev, args)
        .into_iter()
        .map(|v| or_default(v, Value::Blank))
        .collect();
    val(lift(&vs, &mut |a| match &a[0] {
        Value::Number(n) => Value::Number(*n),
        Value::Blank => Value::Number(0.0),
        Value::Text(t) => parse_number(t).map_or(Value::Error(ErrorKind::Value), Value::Number),
        Value::Error(e) => Value::Error(*e),
        _ => Value::Error(ErrorKind::Value),
    }))
}

/// Truncated integer argument.
fn int(v: &Value) -> Result<i64, ErrorKind> {
    let n = number(v)?;
    if n.abs() > 1e15 {
        return Err(ErrorKind::Value);
    }
    Ok(n.trunc() as i64)
}

fn text(v: &Value) -> Result<String, ErrorKind> {
    v.as_text()
}

fn fn_mid(ev: &mut Evaluator, args: &[Expr]) -> Operand {
    let vs: Vec<Value> = values(ev, args)
        .into_iter()
        .map(|v| or_default(v, Value::Blank))
        .collect();
    val(lift(&vs, &mut |a| {
        let r = (|| {
            let s = text(&a[0])?;
            let start = int(&a[1])?;
            let len = int(&a[2])?;
            if start < 1 || len < 0 {
                return Err(ErrorKind::Value);
            }
            Ok(s.chars()
                .skip(start as usize - 1)
                .take(len as usize)
                .collect::<String>())
        })();
        r.map_or_else(Value::Error, Value::Text)
    }))
}

fn fn_right(ev: &mut Evaluator, args: &[Expr]) -> Operand {
    let mut vs: Vec<Value> = values(ev, args)
        .into_iter()
        .map(|v| or_default(v, Value::Blank))
        .collect();
    if vs.len() == 1 {
        vs.push(Value::Number(1.0));
    }
    val(lift(&vs, &mut |a| {
        let r = (|| {
            let s = text(&a[0])?;
            let n = int(&a[1])?;
            if n < 0 {
                return Err(ErrorKind::Value);
            }
            let count = s.chars().count();
            Ok(s.chars().skip(count.saturating_sub(n as usize)).collect::<String>())
        })();
        r.map_or_else(Value::Error, Value::Text)
    }))
}

fn fn_len(ev: &mut Evaluator, args: &[Expr]) -> Operand {
    let vs: Vec<Value> = values(ev, args)
        .into_iter()
        .map(|v| or_default(v, Value::Blank))
        .collect();
    val(lift(&vs, &mut |a| match text(&a[0]) {
        Ok(s) => Value::Number(s.chars().count() as f64),
        Err(e) => Value::Error(e),
    }))
}

fn matches_exactly(needle: &Value, candidate: &Value) -> bool {
    match (needle, candidate) {
        (Value::Number(a), Value::Number(b)) => a == b,
        (Value::Text(a), Value::Text(b)) => a.to_lowercase() == b.to_lowercase(),
        (Value::Boolean(a), Value::Boolean(b)) => a == b,
        _ => false,
    }
}

fn fn_match(ev: &mut Evaluator, args: &[Expr]) -> Operand {
    let needle = ev.scalar(&args[0]);
    if let Value::Error(e) = needle {
        return err(e);
    }
    let haystack = as_array(ev.value(&args[1]));
    let mode = match args.get(2).map(|a| ev.eval(a)) {
        None | Some(Operand::Omitted) => return err(ErrorKind::Value),
        Some(op) => ev.deref(op).into_scalar(),
    };
    match int(&mode) {
        Ok(0) => {}
        Ok(_) => return err(ErrorKind::Value),
        Err(e) => return err(e),
    }
    if haystack.rows() > 1 && haystack.cols() > 1 {
        return err(ErrorKind::NA);
    }
    haystack
        .values()
        .iter()
        .position(|c| matches_exactly(&needle, c))
        .map_or(err(ErrorKind::NA), |i| val(Value::Number((i + 1) as f64)))
}

fn fn_isblank(ev: &mut Evaluator, args: &[Expr]) -> Operand {
    let blank = match ev.eval(&args[0]) {
        Operand::Ref(r) => ev.is_blank_ref(&r),
        Operand::Omitted => true,
        Operand::Value(v) => matches!(v.as_scalar(), Value::Blank),
    };
    val(Value::Boolean(blank))
}

/// Positive 1-based index argument; zero and negatives are #REF!.
fn index_arg(ev: &mut Evaluator, expr: Option<&Expr>) -> Result<Option<usize>, ErrorKind> {
    let Some(expr) = expr else {
        return Ok(None);
    };
    let v = match ev.eval(expr) {
        Operand::Omitted => return Ok(None),
        op => ev.deref(op).into_scalar(),
    };
    let n = int(&v)?;
    if n < 1 {
        return Err(ErrorKind::Ref);
    }
    Ok(Some(n as usize))
}

fn fn_index(ev: &mut Evaluator, args: &[Expr]) -> Operand {
    let source = ev.eval(&args[0]);
    let first = match index_arg(ev, args.get(1)) {
        Ok(v) => v,
        Err(e) => return err(e),
    };
    let second = match index_arg(ev, args.get(2)) {
        Ok(v) => v,
        Err(e) => return err(e),
    };
    let (rows, cols) = match &source {
        Operand::Ref(r) => ((r.r2 - r.r1 + 1) as usize, (r.c2 - r.c1 + 1) as usize),
        Operand::Value(Value::Error(e)) => return err(*e),
        Operand::Value(Value::Array(a)) => a.dims(),
        Operand::Value(_) | Operand::Omitted => (1, 1),
    };
    // (row, column); None selects the whole dimension
    let (row, col) = match (first, second) {
        (Some(n), None) if rows == 1 => (Some(1), Some(n)),
        (Some(n), None) if cols == 1 => (Some(n), Some(1)),
        (Some(n), None) => (Some(n), None),
        (r, c) => (r, c),
    };
    if row.is_some_and(|r| r > rows) || col.is_some_and(|c| c > cols) {
        return err(ErrorKind::Ref);
    }
    let (r1, r2) = row.map_or((1, rows), |r| (r, r));
    let (c1, c2) = col.map_or((1, cols), |c| (c, c));
    match source {
        Operand::Ref(r) => Operand::Ref(RangeKey {
            r1: r.r1 + r1 as u32 - 1,
            r2: r.r1 + r2 as u32 - 1,
            c1: r.c1 + c1 as u32 - 1,
            c2: r.c1 + c2 as u32 - 1,
            ..r
        }),
        Operand::Value(Value::Array(a)) => {
            let mut data = Vec::new();
            for r in r1..=r2 {
                for c in c1..=c2 {
                    data.push(a.get(r - 1, c - 1).expect("bounds checked").clone());
                }
            }
            val(Value::Array(Array::new(r2 - r1 + 1, c2 - c1 + 1, data)).into_scalar_if_single())
        }
        Operand::Value(v) => val(v),
        Operand::Omitted => val(Value::Blank),
    }
}

trait SingleScalar {
    fn into_scalar_if_single(self) -> Value;
}

impl SingleScalar for Value {
    fn into_scalar_if_single(self) -> Value {
        match self {
            Value::Array(a) if a.dims() == (1, 1) => a.into_values().pop().expect("1x1"),
            v => v,
        }
    }
}

fn fn_indirect(ev: &mut Evaluator, args: &[Expr]) -> Operand {
    if let Some(a1) = args.get(1) {
        match ev.scalar(a1).as_bool() {
            Ok(true) => {}
            Ok(false) => return err(ErrorKind::Value),
            Err(e) => return err(e),
        }
    }
    let t = match ev.scalar(&args[0]) {
        Value::Error(e) => return err(e),
        v => match text(&v) {
            Ok(t) => t,
            Err(e) => return err(e),
        },
    };
    match crate::address::parse_address(t.trim(), &ev.context_address()) {
        Ok(r) => ev.resolve_reference(&r),
        Err(_) => err(ErrorKind::Ref),
    }
}

fn fn_offset(ev: &mut Evaluator, args: &[Expr]) -> Operand {
    let base = match ev.eval(&args[0]) {
        Operand::Ref(r) => r,
        Operand::Value(Value::Error(e)) => return err(e),
        _ => return err(ErrorKind::Value),
    };
    let mut nums = [0i64, 0, 1, 1];
    for (slot, expr) in nums.iter_mut().zip(&args[1..]) {
        match ev.eval(expr) {
            Operand::Omitted => {}
            op => match int(&ev.deref(op).into_scalar()) {
                Ok(n) => *slot = n,
                Err(e) => return err(e),
            },
        }
    }
    let [dr, dc, h, w] = nums;
    if h < 1 || w < 1 {
        return err(ErrorKind::Ref);
    }
    let r1 = i64::from(base.r1) + dr;
    let c1 = i64::from(base.c1) + dc;
    let r2 = r1 + h - 1;
    let c2 = c1 + w - 1;
    if r1 < 1 || c1 < 1 || r2 > i64::from(MAX_ROWS) || c2 > i64::from(MAX_COLUMNS) {
        return err(ErrorKind::Ref);
    }
    Operand::Ref(RangeKey {
        r1: r1 as u32,
        c1: c1 as u32,
        r2: r2 as u32,
        c2: c2 as u32,
        ..base
    })
}

fn fn_address(ev: &mut Evaluator, args: &[Expr]) -> Operand {
    let raw = values(ev, args);
    let mut vs: Vec<Value> = Vec::with_capacity(5);
    let defaults = [Value::Blank, Value::Blank, Value::Number(1.0), Value::Boolean(true)];
    for (i, v) in raw.into_iter().enumerate() {
        vs.push(v.unwrap_or_else(|| defaults.get(i).cloned().unwrap_or(Value::Blank)));
    }
    while vs.len() < 4 {
        vs.push(defaults[vs.len()].clone());
    }
    let has_sheet = vs.len() == 5;
    val(lift(&vs, &mut |a| {
        let r = (|| {
            let row = int(&a[0])?;
            let col = int(&a[1])?;
            let abs = int(&a[2])?;
            let a1 = a[3].as_bool()?;
            if !(1..=i64::from(MAX_ROWS)).contains(&row) || !(1..=i64::from(MAX_COLUMNS)).contains(&col) {
                return Err(ErrorKind::Value);
            }
            if !(1..=4).contains(&abs) || !a1 {
                return Err(ErrorKind::Value);
            }
            let (col_abs, row_abs) = match abs {
                1 => ("$", "$"),
                2 => ("", "$"),
                3 => ("$", ""),
                _ => ("", ""),
            };
            let mut out = String::new();
            if has_sheet {
                let sheet = text(&a[4])?;
                out.push_str(&format_sheet_name(&sheet));
                out.push('!');
            }
            out.push_str(&format!("{col_abs}{}{row_abs}{row}", column_to_letters(col as u32)));
            Ok(out)
        })();
        r.map_or_else(Value::Error, Value::Text)
    }))
}

fn coordinate_array(from: u32, to: u32, as_column: bool) -> Value {
    if from == to {
        return Value::Number(f64::from(from));
    }
    let items: Vec<Value> = (from..=to).map(|n| Value::Number(f64::from(n))).collect();
    Value::Array(if as_column {
        Array::column(items)
    } else {
        Array::row(items)
    })
}

fn fn_row(ev: &mut Evaluator, args: &[Expr]) -> Operand {
    match args.first().map(|a| ev.eval(a)) {
        None | Some(Operand::Omitted) => val(Value::Number(f64::from(ev.cell.row))),
        Some(Operand::Ref(r)) => val(coordinate_array(r.r1, r.r2, true)),
        Some(Operand::Value(Value::Error(e))) => err(e),
        Some(Operand::Value(_)) => err(ErrorKind::Value),
    }
}

fn fn_column(ev: &mut Evaluator, args: &[Expr]) -> Operand {
    match args.first().map(|a| ev.eval(a)) {
        None | Some(Operand::Omitted) => val(Value::Number(f64::from(ev.cell.col))),
        Some(Operand::Ref(r)) => val(coordinate_array(r.c1, r.c2, false)),
        Some(Operand::Value(Value::Error(e))) => err(e),
        Some(Operand::Value(_)) => err(ErrorKind::Value),
    }
}

fn extent(op: Operand) -> Result<(usize, usize), ErrorKind> {
    match op {
        Operand::Ref(r) => Ok(((r.r2 - r.r1 + 1) as usize, (r.c2 - r.c1 + 1) as usize)),
        Operand::Value(Value::Error(e)) => Err(e),
        Operand::Value(Value::Array(a)) => Ok(a.dims()),
        Operand::Value(_) | Operand::Omitted => Ok((1, 1)),
    }
}

fn fn_rows(ev: &mut Evaluator, args: &[Expr]) -> Operand {
    match extent(ev.eval(&args[0])) {
        Ok((r, _)) => val(Value::Number(r as f64)),
        Err(e) => err(e),
    }
}

fn fn_columns(ev: &mut Evaluator, args: &[Expr]) -> Operand {
    match extent(ev.eval(&args[0])) {
        Ok((_, c)) => val(Value::Number(c as f64)),
        Err(e) => err(e),
    }
}

fn fn_xadr(ev: &mut Evaluator, args: &[Expr]) -> Operand {
    match ev.eval(&args[0]) {
        Operand::Ref(r) => {
            let range: RangeRef = ev.range_ref(&r);
            val(Value::Text(format_reference(
                &Reference::Range(range),
                RefStyle::Qualified,
            )))
        }
        Operand::Value(Value::Error(e)) => err(e),
        _ => err(ErrorKind::Value),
    }
}

fn fn_sum(ev: &mut Evaluator, args: &[Expr]) -> Operand {
    let mut total = 0.0;
    for a in args {
        match ev.eval(a) {
            Operand::Omitted => {}
            Operand::Value(Value::Array(arr)) => {
                for v in arr.values() {
                    match v {
                        Value::Number(n) => total += n,
                        Value::Error(e) => return err(*e),
                        _ => {}
                    }
                }
            }
            Operand::Value(v) => match coerce(&v, Coercion::Number) {
                Value::Number(n) => total += n,
                Value::Error(e) => return err(e),
                _ => unreachable!(),
            },
            op @ Operand::Ref(_) => {
                let v = ev.deref(op);
                let items: Vec<Value> = match v {
                    Value::Array(arr) => arr.into_values(),
                    v => vec![v],
                };
                for v in items {
                    match v {
                        Value::Number(n) => total += n,
                        Value::Error(e) => return err(e),
                        _ => {}
                    }
                }
            }
        }
    }
    if !total.is_finite() {
        return err(ErrorKind::Num);
    }
    val(Value::Number(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::address::CellAddress;
    use crate::eval::evaluate_in;
    use crate::workspace::{CellInput, Workspace};

    fn ws() -> Workspace {
        let mut ws = Workspace::new();
        ws.add_workbook("Book2").unwrap();
        ws.add_sheet("Book2", "Sheet1").unwrap();
        ws.add_sheet("Book2", "Sheet2").unwrap();
        ws
    }

    fn at() -> CellAddress {
        CellAddress::new("Book2", "Sheet1", 26, 100)
    }

    fn eval_in(ws: &Workspace, src: &str) -> Value {
        evaluate_in(ws, &at(), src).unwrap()
    }

    fn eval(src: &str) -> Value {
        eval_in(&ws(), src)
    }

    fn put(ws: &mut Workspace, a1: &str, v: Value) {
        let r = crate::address::parse_address(a1, &at()).unwrap();
        ws.set_cell(r.top_left(), CellInput::Literal(v)).unwrap();
    }

    fn n(x: f64) -> Value {
        Value::Number(x)
    }

    fn t(s: &str) -> Value {
        Value::text(s)
    }

    fn e(k: ErrorKind) -> Value {
        Value::Error(k)
    }

    const DIGITS: &str = r#"{"0";"1";"2";"3";"4";"5";"6";"7";"8";"9";"X"}"#;

    #[test]
    fn registry_names_are_unique() {
        let mut names: Vec<&str> = all().iter().map(|s| s.name).collect();
        names.sort_unstable();
        let len = names.len();
        names.dedup();
        assert_eq!(names.len(), len);
        for f in [
            "IF",
            "MOD",
            "SUMPRODUCT",
            "VALUE",
            "MID",
            "MATCH",
            "RIGHT",
            "LEN",
            "ISBLANK",
            "INDEX",
            "INDIRECT",
            "OFFSET",
            "ADDRESS",
            "ROW",
            "COLUMN",
            "ROWS",
            "COLUMNS",
            "XADR",
            "SUM",
        ] {
            assert!(lookup(f).is_some(), "{f}");
        }
        assert!(is_volatile("indirect") && is_volatile("OFFSET") && !is_volatile("INDEX"));
    }

    #[test]
    fn arity_is_checked() {
        assert_eq!(eval("MOD(1)"), e(ErrorKind::Value));
        assert_eq!(eval("LEN(1,2)"), e(ErrorKind::Value));
    }

    #[test]
    fn if_is_lazy() {
        assert_eq!(eval("IF(TRUE,1,1/0)"), n(1.0));
        assert_eq!(eval("IF(FALSE,1/0,2)"), n(2.0));
        assert_eq!(eval("IF(FALSE,1)"), Value::Boolean(false));
        assert_eq!(eval("IF(1/0,1,2)"), e(ErrorKind::Div0));
        assert_eq!(eval("IF(\"x\",1,2)"), e(ErrorKind::Value));
    }

    #[test]
    fn mod_table() {
        // 8*10+3*9+2*8+0*7+4*6+2*5+5*4+3*3+9*2 = 204
        let dot: i32 = [8, 3, 2, 0, 4, 2, 5, 3, 9]
            .iter()
            .zip((2..=10).rev())
            .map(|(d, w)| d * w)
            .sum();
        assert_eq!(dot, 204);
        assert_eq!(eval("MOD(204,11)"), n(6.0));
        assert_eq!(eval("MOD(-3,5)"), n(2.0));
        assert_eq!(eval("MOD(3,-5)"), n(-2.0));
        assert_eq!(eval("MOD(1,0)"), e(ErrorKind::Div0));
    }

    #[test]
    fn sumproduct_table() {
        assert_eq!(eval("SUMPRODUCT({8;3;2;0;4;2;5;3;9},{10;9;8;7;6;5;4;3;2})"), n(204.0));
        let dot: i32 = [9, 7, 8, 0, 2, 0, 1, 1, 3, 4, 4, 7]
            .iter()
            .zip([1, 3].iter().cycle())
            .map(|(d, w)| d * w)
            .sum();
        assert_eq!(dot, 84);
        assert_eq!(
            eval("SUMPRODUCT({9;7;8;0;2;0;1;1;3;4;4;7},{1;3;1;3;1;3;1;3;1;3;1;3})"),
            n(84.0)
        );
        assert_eq!(eval("SUMPRODUCT({1},{1})"), n(1.0));
        assert_eq!(eval("SUMPRODUCT({1;2},{1;2;3})"), e(ErrorKind::Value));
        assert_eq!(eval("SUMPRODUCT({1;\"a\"},{1;1})"), n(1.0));
        assert_eq!(eval("SUMPRODUCT({1;#N/A},{1;1})"), e(ErrorKind::NA));
    }

    #[test]
    fn value_and_mid() {
        assert_eq!(eval("VALUE(MID(\"8320425395\",{1;2;3;4;5;6;7;8;9},1))"), n(8.0));
        let ws = ws();
        let id = ws.require_id(&at()).unwrap();
        let mut ev = Evaluator::new(&ws, id);
        let ast = crate::formula::parse_formula("VALUE(MID(\"8320425395\",{1;2;3;4;5;6;7;8;9},1))", &at()).unwrap();
        let digits = ev.value(&ast);
        let expected: Vec<Value> = "832042539".chars().map(|c| n(c.to_digit(10).unwrap().into())).collect();
        assert_eq!(digits, Value::Array(Array::column(expected)));
        let ast = crate::formula::parse_formula("MID(\"820\",{1;2;3},1)", &at()).unwrap();
        assert_eq!(
            ev.value(&ast),
            Value::Array(Array::column(vec![t("8"), t("2"), t("0")]))
        );

        assert_eq!(eval("VALUE(\"03803\")"), n(3803.0));
        assert_eq!(eval("VALUE(\"X\")"), e(ErrorKind::Value));
        assert_eq!(eval("VALUE(\"\")"), e(ErrorKind::Value));
        assert_eq!(eval("VALUE(TRUE)"), e(ErrorKind::Value));
        assert_eq!(eval("MID(\"abc\",3,5)"), t("c"));
        assert_eq!(eval("MID(\"abc\",9,1)"), t(""));
        assert_eq!(eval("MID(\"abc\",0,1)"), e(ErrorKind::Value));
        assert_eq!(eval("MID(\"żółw\",2,2)"), t("ół"));
    }

    #[test]
    fn lifting_commutes_with_composition() {
        let ws = ws();
        let id = ws.require_id(&at()).unwrap();
        let mut ev = Evaluator::new(&ws, id);
        let s = "020103803X";
        let whole = ev.value(
            &crate::formula::parse_formula(&format!("VALUE(MID(\"{s}\",{{1;2;3;4;5;6;7;8;9;10}},1))"), &at()).unwrap(),
        );
        let Value::Array(whole) = whole else { panic!() };
        for (i, v) in whole.values().iter().enumerate() {
            let one =
                ev.value(&crate::formula::parse_formula(&format!("VALUE(MID(\"{s}\",{},1))", i + 1), &at()).unwrap());
            assert_eq!(*v, one);
        }
    }

    #[test]
    fn right_len() {
        assert_eq!(eval("RIGHT(\"020103803X\")"), t("X"));
        assert_eq!(eval("RIGHT(\"abc\",2)"), t("bc"));
        assert_eq!(eval("RIGHT(\"abc\",10)"), t("abc"));
        assert_eq!(eval("RIGHT(12345)"), t("5"));
        assert_eq!(eval("LEN(\"9780201134476\")"), n(13.0));
        assert_eq!(eval("LEN(1.5)"), n(3.0));
        assert_eq!(eval("LEN(A1)"), n(0.0));
    }

    #[test]
    fn match_table() {
        assert_eq!(eval(&format!("MATCH(\"X\",{DIGITS},0)")), n(11.0));
        assert_eq!(eval(&format!("MATCH(\"x\",{DIGITS},0)")), n(11.0));
        assert_eq!(eval(&format!("MATCH(\"5\",{DIGITS},0)")), n(6.0));
        assert_eq!(eval("MATCH(\"q\",{\"0\";\"1\"},0)"), e(ErrorKind::NA));
        assert_eq!(eval("MATCH(5,{\"5\"},0)"), e(ErrorKind::NA));
        assert_eq!(eval("MATCH(5,{1,5},0)"), n(2.0));
        assert_eq!(eval("MATCH(5,{1,5},1)"), e(ErrorKind::Value));
        assert_eq!(eval("MATCH(5,{1,5})"), e(ErrorKind::Value));
    }

    #[test]
    fn isblank_distinguishes_empty_text() {
        let mut w = ws();
        assert_eq!(eval_in(&w, "ISBLANK(A2)"), Value::Boolean(true));
        put(&mut w, "A2", t(""));
        assert_eq!(eval_in(&w, "ISBLANK(A2)"), Value::Boolean(false));
        assert_eq!(eval_in(&w, "ISBLANK(1/0)"), Value::Boolean(false));
    }

    #[test]
    fn index_and_indirect() {
        let mut w = ws();
        put(&mut w, "A5", t("0"));
        put(&mut w, "B5", n(201.0));
        put(&mut w, "C5", t("03803"));
        put(&mut w, "D5", t("X"));
        put(&mut w, "A2", t("A5:D5"));
        assert_eq!(eval_in(&w, "INDEX(INDIRECT(A2),3)"), t("03803"));
        assert_eq!(
            eval_in(
                &w,
                "INDEX(INDIRECT(A2),1)&INDEX(INDIRECT(A2),2)&INDEX(INDIRECT(A2),3)&INDEX(INDIRECT(A2),4)"
            ),
            t("020103803X")
        );
        assert_eq!(eval_in(&w, "INDEX(INDIRECT(A2),0)"), e(ErrorKind::Ref));
        assert_eq!(eval_in(&w, "INDEX(INDIRECT(A2),5)"), e(ErrorKind::Ref));
        assert_eq!(eval_in(&w, "INDEX({10;20;30},2)"), n(20.0));
        assert_eq!(eval_in(&w, "INDEX({1,2;3,4},2,1)"), n(3.0));
        assert_eq!(eval_in(&w, "INDEX(7,1)"), n(7.0));
        assert_eq!(eval_in(&w, "ROWS(INDEX(A5:D6,2))"), n(1.0));
        assert_eq!(eval_in(&w, "COLUMNS(INDEX(A5:D6,2))"), n(4.0));
        assert_eq!(eval_in(&w, "INDIRECT(\"\")"), e(ErrorKind::Ref));
        assert_eq!(eval_in(&w, "INDIRECT(Z1)"), e(ErrorKind::Ref));
        assert_eq!(eval_in(&w, "INDEX(INDIRECT(Z1),1)"), e(ErrorKind::Ref));
        assert_eq!(eval_in(&w, "INDIRECT(\"[Nope]Sheet1!A1\")"), e(ErrorKind::Ref));
        assert_eq!(eval_in(&w, "INDIRECT(\"Sheet1!D5\")"), t("X"));
        assert_eq!(eval_in(&w, "INDIRECT(\"XFE1\")"), e(ErrorKind::Ref));
    }

    #[test]
    fn offset_table() {
        let mut w = ws();
        put(&mut w, "C3", n(9.0));
        assert_eq!(eval_in(&w, "OFFSET(A1,2,2)"), n(9.0));
        assert_eq!(eval_in(&w, "ROWS(OFFSET(A1,0,0,3,2))"), n(3.0));
        assert_eq!(eval_in(&w, "SUM(OFFSET(A1,0,0,3,3))"), n(9.0));
        assert_eq!(eval_in(&w, "OFFSET(A1,-1,0)"), e(ErrorKind::Ref));
        assert_eq!(eval_in(&w, "OFFSET(5,1,1)"), e(ErrorKind::Value));
    }

    #[test]
    fn address_table() {
        assert_eq!(eval("ADDRESS(1,1,4)"), t("A1"));
        assert_eq!(eval("ADDRESS(5,4,4)"), t("D5"));
        assert_eq!(eval("ADDRESS(1,1,1)"), t("$A$1"));
        assert_eq!(eval("ADDRESS(1,1)"), t("$A$1"));
        assert_eq!(eval("ADDRESS(3,28,2)"), t("AB$3"));
        assert_eq!(eval("ADDRESS(3,28,3)"), t("$AB3"));
        assert_eq!(eval("ADDRESS(1,1,5)"), e(ErrorKind::Value));
        assert_eq!(eval("ADDRESS(1,1,4,FALSE)"), e(ErrorKind::Value));
        assert_eq!(eval("ADDRESS(1,1,4,TRUE,\"Sheet1\")"), t("Sheet1!A1"));
        assert_eq!(eval("ADDRESS(1,1,4,,\"My Sheet\")"), t("'My Sheet'!A1"));
        assert_eq!(eval("ADDRESS(0,1)"), e(ErrorKind::Value));
    }

    #[test]
    fn row_column_counts() {
        assert_eq!(eval("ROW()"), n(100.0));
        assert_eq!(eval("COLUMN()"), n(26.0));
        assert_eq!(eval("ROW(C7)"), n(7.0));
        assert_eq!(eval("COLUMN(C7)"), n(3.0));
        assert_eq!(eval("ROW(A1:A5)"), n(1.0));
        assert_eq!(eval("ROWS(A1:A5)"), n(5.0));
        assert_eq!(eval("COLUMNS(A1:C5)"), n(3.0));
        assert_eq!(eval("ROWS({1;2;3})"), n(3.0));
        assert_eq!(eval("ROW(5)"), e(ErrorKind::Value));
    }

    #[test]
    fn xadr_and_workaround_agree() {
        assert_eq!(eval("XADR(A1:A5)"), t("[Book2]Sheet1!A1:A5"));
        assert_eq!(eval("XADR(A1)"), t("[Book2]Sheet1!A1"));
        assert_eq!(eval("XADR(A1:A1)"), t("[Book2]Sheet1!A1"));
        assert_eq!(eval("XADR(Sheet2!B2:C3)"), t("[Book2]Sheet2!B2:C3"));
        assert_eq!(eval("XADR(\"A1\")"), e(ErrorKind::Value));
        assert_eq!(
            eval(
                r#""[Book2]"&ADDRESS(ROW(A1:A5),COLUMN(A1:A5),4,TRUE,"Sheet1")&":"&ADDRESS(ROW(A1:A5)+ROWS(A1:A5)-1,COLUMN(A1:A5)+COLUMNS(A1:A5)-1,4)"#
            ),
            t("[Book2]Sheet1!A1:A5")
        );
        // as printed, the sheet text sits in the a1 slot
        assert_eq!(
            eval(
                r#""[Book2]"&ADDRESS(ROW(A1:A5),COLUMN(A1:A5),4,"Sheet1")&":"&ADDRESS(ROW(A1:A5)+ROWS(A1:A5)-1,COLUMN(A1:A5)+COLUMNS(A1:A5)-1,4)"#
            ),
            e(ErrorKind::Value)
        );
    }

    #[test]
    fn sum_skips_text_in_ranges() {
        let mut w = ws();
        put(&mut w, "A1", n(2.0));
        put(&mut w, "A2", t("x"));
        put(&mut w, "A3", n(3.0));
        assert_eq!(eval_in(&w, "SUM(A1:A3)"), n(5.0));
        assert_eq!(eval_in(&w, "SUM(A1,\"4\")"), n(6.0));
        assert_eq!(eval_in(&w, "SUM(A2)"), n(0.0));
        assert_eq!(eval_in(&w, "SUM(\"x\")"), e(ErrorKind::Value));
    }
}
