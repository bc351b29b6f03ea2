//! A1-style cell addresses and ranges, qualified by workbook and sheet.

use std::fmt;

use thiserror::Error;

/// Number of columns in a sheet (A..XFD).
pub const MAX_COLUMNS: u32 = 16_384;
/// Number of rows in a sheet.
pub const MAX_ROWS: u32 = 1_048_576;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AddressError {
    #[error("empty reference")]
    Empty,
    #[error("malformed reference `{0}`")]
    Malformed(String),
    #[error("reference `{0}` is outside the grid")]
    OutOfGrid(String),
    #[error("invalid workbook or sheet name `{0}`")]
    InvalidName(String),
}

/// A fully qualified cell coordinate. Columns and rows are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CellAddress {
    pub workbook: String,
    pub sheet: String,
    pub column: u32,
    pub row: u32,
}

impl CellAddress {
    pub fn new(workbook: impl Into<String>, sheet: impl Into<String>, column: u32, row: u32) -> Self {
        CellAddress {
            workbook: workbook.into(),
            sheet: sheet.into(),
            column,
            row,
        }
    }

    /// Same workbook and sheet, different coordinate.
    pub fn with_coords(&self, column: u32, row: u32) -> Self {
        CellAddress {
            workbook: self.workbook.clone(),
            sheet: self.sheet.clone(),
            column,
            row,
        }
    }

    pub fn same_sheet(&self, other: &CellAddress) -> bool {
        names_eq(&self.workbook, &other.workbook) && names_eq(&self.sheet, &other.sheet)
    }

    /// `A1` without qualification.
    pub fn local(&self) -> String {
        format!("{}{}", column_to_letters(self.column), self.row)
    }
}

impl fmt::Display for CellAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_reference(&Reference::Cell(self.clone()), RefStyle::Qualified))
    }
}

impl fmt::Display for RangeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_reference(&Reference::Range(self.clone()), RefStyle::Qualified))
    }
}

/// A rectangle on one sheet. Corners are normalized so that
/// `top_left <= bottom_right` on both axes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RangeRef {
    pub top_left: CellAddress,
    pub bottom_right: CellAddress,
}

impl RangeRef {
    /// Builds a range from two corners on the same sheet, in any order.
    pub fn new(a: CellAddress, b: CellAddress) -> Self {
        let (c1, c2) = (a.column.min(b.column), a.column.max(b.column));
        let (r1, r2) = (a.row.min(b.row), a.row.max(b.row));
        RangeRef {
            top_left: a.with_coords(c1, r1),
            bottom_right: a.with_coords(c2, r2),
        }
    }

    pub fn rows(&self) -> u32 {
        self.bottom_right.row - self.top_left.row + 1
    }

    pub fn columns(&self) -> u32 {
        self.bottom_right.column - self.top_left.column + 1
    }

    pub fn contains(&self, addr: &CellAddress) -> bool {
        self.top_left.same_sheet(addr)
            && (self.top_left.column..=self.bottom_right.column).contains(&addr.column)
            && (self.top_left.row..=self.bottom_right.row).contains(&addr.row)
    }
}

/// Either a single cell or a rectangle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Reference {
    Cell(CellAddress),
    Range(RangeRef),
}

impl Reference {
    pub fn top_left(&self) -> &CellAddress {
        match self {
            Reference::Cell(c) => c,
            Reference::Range(r) => &r.top_left,
        }
    }

    /// The reference as a range; a single cell becomes a 1x1 range.
    pub fn to_range(&self) -> RangeRef {
        match self {
            Reference::Cell(c) => RangeRef {
                top_left: c.clone(),
                bottom_right: c.clone(),
            },
            Reference::Range(r) => r.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefStyle {
    /// `A1` / `A1:A5`
    Local,
    /// `[Book]Sheet!A1` / `[Book]Sheet!A1:A5`
    Qualified,
}

/// Case-insensitive name comparison used for workbooks, sheets and defined names.
pub fn names_eq(a: &str, b: &str) -> bool {
    if a.is_ascii() && b.is_ascii() {
        a.eq_ignore_ascii_case(b)
    } else {
        a.to_lowercase() == b.to_lowercase()
    }
}

/// Workbook and sheet names are non-empty and avoid the reference punctuation.
pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name
            .chars()
            .any(|c| matches!(c, '[' | ']' | '!' | ':') || c.is_control())
}

/// Bijective base-26 column label: 1 -> A, 26 -> Z, 27 -> AA.
pub fn column_to_letters(mut column: u32) -> String {
    let mut out = Vec::new();
    while column > 0 {
        let rem = (column - 1) % 26;
        out.push(b'A' + rem as u8);
        column = (column - 1) / 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

/// Inverse of [`column_to_letters`]. Returns `None` for non-letters or
/// labels beyond the grid.
pub fn letters_to_column(letters: &str) -> Option<u32> {
    if letters.is_empty() || letters.len() > 3 {
        return None;
    }
    let mut col: u32 = 0;
    for b in letters.bytes() {
        if !b.is_ascii_alphabetic() {
            return None;
        }
        col = col * 26 + u32::from(b.to_ascii_uppercase() - b'A' + 1);
    }
    (col <= MAX_COLUMNS).then_some(col)
}

/// Parses the coordinate part `$A$1` into `(column, row)`; `$` markers are
/// accepted and dropped.
pub(crate) fn parse_cell_coords(text: &str) -> Option<(u32, u32)> {
    let s = text.strip_prefix('$').unwrap_or(text);
    let split = s.find(|c: char| !c.is_ascii_alphabetic())?;
    let (letters, rest) = s.split_at(split);
    let digits = rest.strip_prefix('$').unwrap_or(rest);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    let column = letters_to_column(letters)?;
    let row: u32 = digits.parse().ok()?;
    (row <= MAX_ROWS).then_some((column, row))
}

/// True if `text` has the shape of a coordinate (letters then digits), even
/// if it lies outside the grid.
pub(crate) fn looks_like_coords(text: &str) -> bool {
    let s = text.strip_prefix('$').unwrap_or(text);
    let Some(split) = s.find(|c: char| !c.is_ascii_alphabetic()) else {
        return false;
    };
    let (letters, rest) = s.split_at(split);
    let digits = rest.strip_prefix('$').unwrap_or(rest);
    !letters.is_empty() && letters.len() <= 3 && !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

/// Parses `A1`, `A1:D5`, `Sheet1!A1`, `[Book2]Sheet1!A1:A5` or
/// `'My sheet'!A1`. Unqualified parts inherit from `context`.
pub fn parse_address(text: &str, context: &CellAddress) -> Result<Reference, AddressError> {
    if text.is_empty() {
        return Err(AddressError::Empty);
    }
    let malformed = || AddressError::Malformed(text.to_string());

    let mut rest = text;
    let mut workbook = context.workbook.clone();
    let mut sheet = context.sheet.clone();

    if let Some(after) = rest.strip_prefix('[') {
        let end = after.find(']').ok_or_else(malformed)?;
        workbook = after[..end].to_string();
        if !is_valid_name(&workbook) {
            return Err(AddressError::InvalidName(workbook));
        }
        rest = &after[end + 1..];
        // a workbook qualifier always needs a sheet
        if !rest.contains('!') {
            return Err(malformed());
        }
    }

    if let Some(after) = rest.strip_prefix('\'') {
        let (name, consumed) = unquote_sheet(after).ok_or_else(malformed)?;
        let tail = &after[consumed..];
        rest = tail.strip_prefix('!').ok_or_else(malformed)?;
        sheet = name;
    } else if let Some(bang) = rest.find('!') {
        sheet = rest[..bang].to_string();
        rest = &rest[bang + 1..];
    }
    if !is_valid_name(&sheet) {
        return Err(AddressError::InvalidName(sheet));
    }

    let base = CellAddress::new(workbook, sheet, 0, 0);
    let coords = |part: &str| -> Result<(u32, u32), AddressError> {
        match parse_cell_coords(part) {
            Some(c) => Ok(c),
            None if looks_like_coords(part) => Err(AddressError::OutOfGrid(text.to_string())),
            None => Err(malformed()),
        }
    };
    match rest.split_once(':') {
        None => {
            let (c, r) = coords(rest)?;
            Ok(Reference::Cell(base.with_coords(c, r)))
        }
        Some((a, b)) => {
            let (c1, r1) = coords(a)?;
            let (c2, r2) = coords(b)?;
            Ok(Reference::Range(RangeRef::new(
                base.with_coords(c1, r1),
                base.with_coords(c2, r2),
            )))
        }
    }
}

/// Reads a quoted sheet name body (after the opening quote). Returns the
/// name and the number of bytes consumed including the closing quote.
fn unquote_sheet(s: &str) -> Option<(String, usize)> {
    let mut name = String::new();
    let mut chars = s.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c == '\'' {
            if let Some(&(_, '\'')) = chars.peek() {
                chars.next();
                name.push('\'');
            } else {
                return Some((name, i + 1));
            }
        } else {
            name.push(c);
        }
    }
    None
}

/// Sheet names that are not plain identifiers are wrapped in single quotes.
pub(crate) fn format_sheet_name(sheet: &str) -> String {
    let plain = sheet.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && sheet.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '.')
        && !looks_like_coords(sheet)
        && !sheet.eq_ignore_ascii_case("TRUE")
        && !sheet.eq_ignore_ascii_case("FALSE");
    if plain {
        sheet.to_string()
    } else {
        format!("'{}'", sheet.replace('\'', "''"))
    }
}

/// Renders a reference. Single-cell ranges collapse to one address.
pub fn format_reference(reference: &Reference, style: RefStyle) -> String {
    let range = reference.to_range();
    let mut out = String::new();
    if style == RefStyle::Qualified {
        out.push('[');
        out.push_str(&range.top_left.workbook);
        out.push(']');
        out.push_str(&format_sheet_name(&range.top_left.sheet));
        out.push('!');
    }
    out.push_str(&range.top_left.local());
    if range.top_left != range.bottom_right {
        out.push(':');
        out.push_str(&range.bottom_right.local());
    }
    out
}
