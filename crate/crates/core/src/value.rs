//! Cell values and the scalar coercion rules shared by operators and builtins.

use std::cmp::Ordering;
use std::fmt;

/// Spreadsheet error values. `Cycle` marks a circular reference when
/// iterative calculation is off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ErrorKind {
    Value,
    Ref,
    NA,
    Name,
    Div0,
    Num,
    Cycle,
}

impl ErrorKind {
    pub const ALL: [ErrorKind; 7] = [
        ErrorKind::Value,
        ErrorKind::Ref,
        ErrorKind::NA,
        ErrorKind::Name,
        ErrorKind::Div0,
        ErrorKind::Num,
        ErrorKind::Cycle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Value => "#VALUE!",
            ErrorKind::Ref => "#REF!",
            ErrorKind::NA => "#N/A",
            ErrorKind::Name => "#NAME?",
            ErrorKind::Div0 => "#DIV/0!",
            ErrorKind::Num => "#NUM!",
            ErrorKind::Cycle => "#CYCLE!",
        }
    }

    pub fn parse(text: &str) -> Option<ErrorKind> {
        ErrorKind::ALL
            .into_iter()
            .find(|e| e.as_str().eq_ignore_ascii_case(text))
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A rectangular block of scalars, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Array {
    rows: usize,
    cols: usize,
    data: Vec<Value>,
}

impl Array {
    /// Panics if the dimensions are zero, disagree with `data`, or if `data`
    /// contains a nested array.
    pub fn new(rows: usize, cols: usize, data: Vec<Value>) -> Self {
        assert!(rows >= 1 && cols >= 1, "arrays are at least 1x1");
        assert_eq!(rows * cols, data.len(), "array data does not match shape");
        assert!(data.iter().all(|v| !matches!(v, Value::Array(_))), "arrays never nest");
        Array { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, value: Value) -> Self {
        Array::new(rows, cols, vec![value; rows * cols])
    }

    /// A single column.
    pub fn column(values: Vec<Value>) -> Self {
        let n = values.len();
        Array::new(n, 1, values)
    }

    /// A single row.
    pub fn row(values: Vec<Value>) -> Self {
        let n = values.len();
        Array::new(1, n, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// 0-based access.
    pub fn get(&self, row: usize, col: usize) -> Option<&Value> {
        (row < self.rows && col < self.cols).then(|| &self.data[row * self.cols + col])
    }

    pub fn values(&self) -> &[Value] {
        &self.data
    }

    pub fn into_values(self) -> Vec<Value> {
        self.data
    }

    pub fn map(&self, mut f: impl FnMut(&Value) -> Value) -> Array {
        Array::new(self.rows, self.cols, self.data.iter().map(&mut f).collect())
    }
}

/// The result of evaluating anything.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Text(String),
    Boolean(bool),
    Blank,
    Error(ErrorKind),
    Array(Array),
}

/// Target type for [`coerce`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coercion {
    Number,
    Text,
    Boolean,
}

impl Value {
    pub fn text(s: impl Into<String>) -> Value {
        Value::Text(s.into())
    }

    pub fn is_error(&self) -> bool {
        matches!(self, Value::Error(_))
    }

    pub fn error(&self) -> Option<ErrorKind> {
        match self {
            Value::Error(e) => Some(*e),
            _ => None,
        }
    }

    /// Scalar-context view: arrays yield their top-left element.
    pub fn into_scalar(self) -> Value {
        match self {
            Value::Array(a) => a.into_values().into_iter().next().unwrap_or(Value::Blank),
            v => v,
        }
    }

    pub fn as_scalar(&self) -> &Value {
        match self {
            Value::Array(a) => &a.values()[0],
            v => v,
        }
    }

    /// Canonical display text. Blank renders empty; arrays render their
    /// top-left element.
    pub fn render(&self) -> String {
        match self {
            Value::Number(n) => render_number(*n),
            Value::Text(s) => s.clone(),
            Value::Boolean(true) => "TRUE".to_string(),
            Value::Boolean(false) => "FALSE".to_string(),
            Value::Blank => String::new(),
            Value::Error(e) => e.as_str().to_string(),
            Value::Array(a) => a.values()[0].render(),
        }
    }

    pub fn as_number(&self) -> Result<f64, ErrorKind> {
        match coerce(self, Coercion::Number) {
            Value::Number(n) => Ok(n),
            Value::Error(e) => Err(e),
            _ => unreachable!("number coercion yields a number or an error"),
        }
    }

    pub fn as_text(&self) -> Result<String, ErrorKind> {
        match coerce(self, Coercion::Text) {
            Value::Text(s) => Ok(s),
            Value::Error(e) => Err(e),
            _ => unreachable!("text coercion yields text or an error"),
        }
    }

    pub fn as_bool(&self) -> Result<bool, ErrorKind> {
        match coerce(self, Coercion::Boolean) {
            Value::Boolean(b) => Ok(b),
            Value::Error(e) => Err(e),
            _ => unreachable!("boolean coercion yields a boolean or an error"),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl From<f64> for Value {
    fn from(n: f64) -> Self {
        Value::Number(n)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Boolean(b)
    }
}

impl From<ErrorKind> for Value {
    fn from(e: ErrorKind) -> Self {
        Value::Error(e)
    }
}

const MAX_EXACT_INT: f64 = 9_007_199_254_740_992.0; // 2^53

/// Integers within +/-2^53 render without a fraction; everything else uses
/// the shortest decimal that round-trips.
pub fn render_number(n: f64) -> String {
    if n == 0.0 {
        return "0".to_string();
    }
    if n.fract() == 0.0 && n.abs() <= MAX_EXACT_INT {
        return format!("{}", n as i64);
    }
    format!("{n}")
}

/// Parses decimal text the way VALUE does. Surrounding spaces are ignored;
/// an empty string is not a number.
pub fn parse_number(text: &str) -> Option<f64> {
    let t = text.trim();
    if t.is_empty()
        || !t
            .bytes()
            .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'e' | b'E' | b'+' | b'-'))
        || !t.bytes().any(|b| b.is_ascii_digit())
    {
        return None;
    }
    t.parse::<f64>().ok().filter(|n| n.is_finite())
}

/// Converts a scalar to the target type. Errors pass through unchanged;
/// arrays are reduced to their top-left element first.
pub fn coerce(value: &Value, target: Coercion) -> Value {
    let value = value.as_scalar();
    if let Value::Error(e) = value {
        return Value::Error(*e);
    }
    match target {
        Coercion::Number => match value {
            Value::Number(n) => Value::Number(*n),
            Value::Blank => Value::Number(0.0),
            Value::Boolean(b) => Value::Number(if *b { 1.0 } else { 0.0 }),
            Value::Text(s) => parse_number(s).map_or(Value::Error(ErrorKind::Value), Value::Number),
            Value::Error(_) | Value::Array(_) => unreachable!(),
        },
        Coercion::Text => Value::Text(value.render()),
        Coercion::Boolean => match value {
            Value::Boolean(b) => Value::Boolean(*b),
            Value::Number(n) => Value::Boolean(*n != 0.0),
            Value::Blank => Value::Boolean(false),
            Value::Text(s) if s.eq_ignore_ascii_case("TRUE") => Value::Boolean(true),
            Value::Text(s) if s.eq_ignore_ascii_case("FALSE") => Value::Boolean(false),
            Value::Text(_) => Value::Error(ErrorKind::Value),
            Value::Error(_) | Value::Array(_) => unreachable!(),
        },
    }
}

/// Ordering used by comparison operators: numbers < text < booleans, text
/// compared case-insensitively. Blank takes the type of the other side.
pub fn compare_scalars(a: &Value, b: &Value) -> Ordering {
    fn rank(v: &Value) -> u8 {
        match v {
            Value::Number(_) => 0,
            Value::Text(_) => 1,
            Value::Boolean(_) => 2,
            _ => 3,
        }
    }
    let blank_as = |other: &Value| match other {
        Value::Text(_) => Value::Text(String::new()),
        Value::Boolean(_) => Value::Boolean(false),
        _ => Value::Number(0.0),
    };
    let (a, b) = match (a, b) {
        (Value::Blank, Value::Blank) => return Ordering::Equal,
        (Value::Blank, other) => (blank_as(other), other.clone()),
        (other, Value::Blank) => (other.clone(), blank_as(other)),
        (x, y) => (x.clone(), y.clone()),
    };
    match (&a, &b) {
        (Value::Number(x), Value::Number(y)) => x.partial_cmp(y).unwrap_or(Ordering::Equal),
        (Value::Text(x), Value::Text(y)) => x.to_lowercase().cmp(&y.to_lowercase()),
        (Value::Boolean(x), Value::Boolean(y)) => x.cmp(y),
        _ => rank(&a).cmp(&rank(&b)),
    }
}
