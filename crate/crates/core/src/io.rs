//! Plain-text workbook files.
//!
//! A `.gwb` file holds one workbook, one directive per line:
//!
//! ```text
//! # comment
//! sheet ISBNcheck
//! A1 : "ISBN"
//! A5 : 42
//! B2 = IF(ISBLANK(A2),"",B2)
//! B5 {=TABLE(,A2)}
//! name ISBNcheck = ISBNcheck!D2
//! table A4:B9 colinput=A2
//! ```
//!
//! A `.gws` file lists workbooks as `workbook <Name> <path>`, with paths
//! relative to the `.gws` file.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::address::{format_sheet_name, parse_address, parse_cell_coords, CellAddress, RangeRef, Reference};
use crate::tables::{Orientation, TableError};
use crate::value::{parse_number, render_number, ErrorKind, Value};
use crate::workspace::{CellContent, CellInput, ModelError, Workspace};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{file}:{line}: {message}")]
    Syntax { file: String, line: usize, message: String },
    #[error("{file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
}

impl LoadError {
    fn at(file: &str, line: usize, message: impl Into<String>) -> Self {
        LoadError::Syntax {
            file: file.to_string(),
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DumpFormat {
    Tsv,
    Source,
}

/// One workbook's source text, named.
#[derive(Debug, Clone)]
pub struct WorkbookSource {
    pub name: String,
    /// Shown in error messages.
    pub file: String,
    pub text: String,
}

impl WorkbookSource {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> Self {
        let name = name.into();
        WorkbookSource {
            file: format!("{name}.gwb"),
            name,
            text: text.into(),
        }
    }
}

enum Directive {
    Sheet(String),
    Cell {
        col: u32,
        row: u32,
        input: CellInput,
    },
    Body {
        col: u32,
        row: u32,
        text: String,
    },
    Name {
        name: String,
        target: String,
    },
    Table {
        range: String,
        orientation: Orientation,
        input: String,
    },
}

struct Line {
    number: usize,
    sheet: Option<String>,
    directive: Directive,
}

/// Reads workspace files: a single `.gws`, or any number of `.gwb` files
/// named after their file stems.
pub fn load_workspace<P: AsRef<Path>>(paths: &[P]) -> Result<Workspace, LoadError> {
    let mut sources = Vec::new();
    for p in paths {
        let p = p.as_ref();
        if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("gws")) {
            sources.extend(read_gws(p)?);
        } else {
            let name = p
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| LoadError::at(&p.display().to_string(), 0, "no workbook name"))?
                .to_string();
            sources.push(read_gwb(p, name)?);
        }
    }
    load_sources(&sources)
}

fn read_text(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        file: path.display().to_string(),
        source,
    })
}

fn read_gwb(path: &Path, name: String) -> Result<WorkbookSource, LoadError> {
    Ok(WorkbookSource {
        name,
        file: path.display().to_string(),
        text: read_text(path)?,
    })
}

fn read_gws(path: &Path) -> Result<Vec<WorkbookSource>, LoadError> {
    let file = path.display().to_string();
    let text = read_text(path)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.splitn(3, char::is_whitespace);
        let (Some("workbook"), Some(name), Some(rel)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(LoadError::at(&file, i + 1, "expected `workbook <Name> <path>`"));
        };
        let p: PathBuf = dir.join(rel.trim());
        out.push(read_gwb(&p, name.to_string())?);
    }
    Ok(out)
}

/// Builds a workspace from workbook sources already in memory.
pub fn load_sources(sources: &[WorkbookSource]) -> Result<Workspace, LoadError> {
    let mut ws = Workspace::new();
    let mut parsed = Vec::new();
    for src in sources {
        ws.add_workbook(&src.name)
            .map_err(|e| LoadError::at(&src.file, 0, e.to_string()))?;
        let lines = parse_lines(src)?;
        for l in &lines {
            if let Directive::Sheet(name) = &l.directive {
                ws.add_sheet(&src.name, name)
                    .map_err(|e| LoadError::at(&src.file, l.number, e.to_string()))?;
            }
        }
        parsed.push((src, lines));
    }

    // cells
    for (src, lines) in &parsed {
        let mut seen = std::collections::HashSet::new();
        for l in lines {
            let Directive::Cell { col, row, input } = &l.directive else {
                continue;
            };
            let fail = |m: String| LoadError::at(&src.file, l.number, m);
            let sheet = l
                .sheet
                .as_deref()
                .ok_or_else(|| fail("cell before any `sheet`".into()))?;
            let addr = CellAddress::new(src.name.clone(), sheet.to_string(), *col, *row);
            let id = ws.require_id(&addr).map_err(|e| fail(e.to_string()))?;
            if !seen.insert(id) {
                return Err(fail(format!("duplicate definition of {}", addr.local())));
            }
            let content =
                Workspace::make_content(&ws.address_of(id), input.clone()).map_err(|e| fail(e.to_string()))?;
            ws.put_content(id, content);
        }
    }

    // names
    for (src, lines) in &parsed {
        for l in lines {
            let Directive::Name { name, target } = &l.directive else {
                continue;
            };
            let fail = |m: String| LoadError::at(&src.file, l.number, m);
            let ctx = context(&ws, &src.name, l.sheet.as_deref());
            let target = parse_address(target, &ctx).map_err(|e| fail(e.to_string()))?;
            ws.define_name(name, &src.name, target)
                .map_err(|e: ModelError| fail(e.to_string()))?;
        }
    }
    ws.rebuild_graph();

    // tables, then body markers
    for (src, lines) in &parsed {
        for l in lines {
            let Directive::Table {
                range,
                orientation,
                input,
            } = &l.directive
            else {
                continue;
            };
            let fail = |m: String| LoadError::at(&src.file, l.number, m);
            let sheet = l
                .sheet
                .as_deref()
                .ok_or_else(|| fail("table before any `sheet`".into()))?;
            let ctx = context(&ws, &src.name, Some(sheet));
            let region = parse_address(range, &ctx).map_err(|e| fail(e.to_string()))?.to_range();
            let input = match parse_address(input, &ctx).map_err(|e| fail(e.to_string()))? {
                Reference::Cell(c) => c,
                Reference::Range(_) => return Err(fail("table input must be a single cell".into())),
            };
            ws.declare_table(region, *orientation, input)
                .map_err(|e: TableError| fail(e.to_string()))?;
        }
    }
    for (src, lines) in &parsed {
        for l in lines {
            let Directive::Body { col, row, text } = &l.directive else {
                continue;
            };
            let fail = |m: String| LoadError::at(&src.file, l.number, m);
            let sheet = l
                .sheet
                .as_deref()
                .ok_or_else(|| fail("cell before any `sheet`".into()))?;
            let addr = CellAddress::new(src.name.clone(), sheet.to_string(), *col, *row);
            match ws.table_at(&addr) {
                Some(t) if t.body_text().eq_ignore_ascii_case(text) => {}
                Some(t) => {
                    return Err(fail(format!(
                        "{} belongs to a table shown as {}",
                        addr.local(),
                        t.body_text()
                    )))
                }
                None => return Err(fail(format!("{} is not in a declared table body", addr.local()))),
            }
        }
    }
    Ok(ws)
}

fn context(ws: &Workspace, workbook: &str, sheet: Option<&str>) -> CellAddress {
    let sheet = sheet
        .map(str::to_string)
        .or_else(|| {
            ws.workbook(workbook)
                .and_then(|w| w.sheets.first())
                .map(|s| s.name.clone())
        })
        .unwrap_or_else(|| "Sheet1".to_string());
    CellAddress::new(workbook.to_string(), sheet, 1, 1)
}

fn parse_lines(src: &WorkbookSource) -> Result<Vec<Line>, LoadError> {
    let mut out = Vec::new();
    let mut sheet: Option<String> = None;
    for (i, raw) in src.text.lines().enumerate() {
        let number = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fail = |m: &str| LoadError::at(&src.file, number, m);
        let directive = if let Some(name) = keyword(line, "sheet") {
            if name.is_empty() {
                return Err(fail("missing sheet name"));
            }
            sheet = Some(name.to_string());
            Directive::Sheet(name.to_string())
        } else if let Some(rest) = keyword(line, "name") {
            let (name, target) = rest
                .split_once('=')
                .ok_or_else(|| fail("expected `name <Id> = <ref>`"))?;
            Directive::Name {
                name: name.trim().to_string(),
                target: target.trim().to_string(),
            }
        } else if let Some(rest) = keyword(line, "table") {
            parse_table(rest).map_err(|m| fail(&m))?
        } else {
            parse_cell_line(line).map_err(|m| fail(&m))?
        };
        out.push(Line {
            number,
            sheet: sheet.clone(),
            directive,
        });
    }
    Ok(out)
}

fn keyword<'a>(line: &'a str, kw: &str) -> Option<&'a str> {
    let rest = line.strip_prefix(kw)?;
    if rest.starts_with(char::is_whitespace) || rest.is_empty() {
        Some(rest.trim())
    } else {
        None
    }
}

fn parse_table(rest: &str) -> Result<Directive, String> {
    let mut parts = rest.split_whitespace();
    let range = parts.next().ok_or("missing table range")?.to_string();
    let mut found: Option<(Orientation, String)> = None;
    for p in parts {
        let (key, value) = p.split_once('=').ok_or_else(|| format!("unexpected `{p}`"))?;
        let orientation = match key.to_ascii_lowercase().as_str() {
            "colinput" => Orientation::ColumnInput,
            "rowinput" => Orientation::RowInput,
            _ => return Err(format!("unknown table option `{key}`")),
        };
        if found.is_some() {
            return Err(TableError::TwoInputs.to_string());
        }
        found = Some((orientation, value.to_string()));
    }
    let (orientation, input) = found.ok_or("table needs colinput= or rowinput=")?;
    Ok(Directive::Table {
        range,
        orientation,
        input,
    })
}

fn parse_cell_line(line: &str) -> Result<Directive, String> {
    let end = line
        .find(|c: char| !(c.is_ascii_alphanumeric() || c == '$'))
        .unwrap_or(line.len());
    let (addr, rest) = line.split_at(end);
    let (col, row) = parse_cell_coords(addr).ok_or_else(|| format!("bad cell address `{addr}`"))?;
    let rest = rest.trim_start();
    if let Some(formula) = rest.strip_prefix('=') {
        let formula = formula.trim();
        if formula.is_empty() {
            return Err("empty formula".into());
        }
        return Ok(Directive::Cell {
            col,
            row,
            input: CellInput::Formula(formula.to_string()),
        });
    }
    if let Some(lit) = rest.strip_prefix(':') {
        let value = parse_literal(lit.trim())?;
        return Ok(Directive::Cell {
            col,
            row,
            input: CellInput::Literal(value),
        });
    }
    if rest.starts_with('{') {
        return Ok(Directive::Body {
            col,
            row,
            text: rest.to_string(),
        });
    }
    Err("expected `:`, `=` or a table marker after the address".into())
}

fn parse_literal(text: &str) -> Result<Value, String> {
    if let Some(inner) = text.strip_prefix('"') {
        let body = inner.strip_suffix('"').ok_or("unterminated text")?;
        let mut out = String::new();
        let mut chars = body.chars().peekable();
        while let Some(c) = chars.next() {
            if c == '"' && chars.next() != Some('"') {
                return Err("unescaped quote in text".into());
            }
            out.push(c);
        }
        return Ok(Value::Text(out));
    }
    if text.eq_ignore_ascii_case("TRUE") {
        return Ok(Value::Boolean(true));
    }
    if text.eq_ignore_ascii_case("FALSE") {
        return Ok(Value::Boolean(false));
    }
    if let Some(e) = ErrorKind::parse(text) {
        return Ok(Value::Error(e));
    }
    parse_number(text)
        .map(Value::Number)
        .ok_or_else(|| format!("bad literal `{text}`"))
}

/// Reads a command-line cell edit. `=...` is a formula, the loader's literal
/// syntax is a literal, anything else is text and an empty string clears.
pub fn parse_cell_input(text: &str) -> CellInput {
    if text.is_empty() {
        return CellInput::Empty;
    }
    if let Some(src) = text.strip_prefix('=') {
        return CellInput::Formula(src.to_string());
    }
    match parse_literal(text.trim()) {
        Ok(v) => CellInput::Literal(v),
        Err(_) => CellInput::Literal(Value::Text(text.to_string())),
    }
}

fn literal_source(v: &Value) -> String {
    match v {
        Value::Text(s) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::Number(n) => render_number(*n),
        other => other.render(),
    }
}

/// Renders one sheet, either as tab-separated cached values or as `.gwb`
/// directives (cells and the tables anchored on the sheet).
pub fn dump_sheet(ws: &Workspace, workbook: &str, sheet: &str, format: DumpFormat) -> Result<String, ModelError> {
    let s = ws.sheet(workbook, sheet).ok_or_else(|| ModelError::UnknownSheet {
        workbook: workbook.to_string(),
        sheet: sheet.to_string(),
    })?;
    let mut out = String::new();
    match format {
        DumpFormat::Tsv => {
            let Some((cols, rows)) = s.extent() else {
                return Ok(out);
            };
            for row in 1..=rows {
                let fields: Vec<String> = (1..=cols)
                    .map(|col| s.cell(col, row).map_or(String::new(), |c| c.cached.render()))
                    .collect();
                out.push_str(&fields.join("\t"));
                out.push('\n');
            }
        }
        DumpFormat::Source => {
            let _ = writeln!(out, "sheet {}", s.name);
            let wb_name = &ws.workbook(workbook).expect("sheet found").name;
            for (col, row, cell) in s.cells() {
                let addr = CellAddress::new(wb_name.clone(), s.name.clone(), col, row);
                let local = addr.local();
                match &cell.content {
                    CellContent::Empty => {}
                    CellContent::Literal(v) => {
                        let _ = writeln!(out, "{local} : {}", literal_source(v));
                    }
                    CellContent::Formula(f) => {
                        let _ = writeln!(out, "{local} = {}", f.source);
                    }
                    CellContent::TableBody(id) => {
                        let text = ws.table(*id).map(|t| t.body_text()).unwrap_or_default();
                        let _ = writeln!(out, "{local} {text}");
                    }
                }
            }
            let mut tables: Vec<_> = ws
                .tables()
                .iter()
                .filter(|t| {
                    let tl = &t.region.top_left;
                    crate::address::names_eq(&tl.workbook, workbook) && crate::address::names_eq(&tl.sheet, sheet)
                })
                .collect();
            tables.sort_by_key(|t| (t.region.top_left.row, t.region.top_left.column));
            for t in tables {
                let key = match t.orientation {
                    Orientation::ColumnInput => "colinput",
                    Orientation::RowInput => "rowinput",
                };
                let _ = writeln!(out, "table {} {key}={}", range_local(&t.region), t.input.local());
            }
        }
    }
    Ok(out)
}

fn range_local(r: &RangeRef) -> String {
    format!("{}:{}", r.top_left.local(), r.bottom_right.local())
}

/// The whole workbook as `.gwb` source.
pub fn dump_workbook(ws: &Workspace, workbook: &str) -> Result<String, ModelError> {
    let wb = ws
        .workbook(workbook)
        .ok_or_else(|| ModelError::UnknownWorkbook(workbook.to_string()))?;
    let mut out = String::new();
    for s in &wb.sheets {
        out.push_str(&dump_sheet(ws, &wb.name, &s.name, DumpFormat::Source)?);
    }
    for n in ws
        .defined_names()
        .iter()
        .filter(|n| crate::address::names_eq(&n.workbook, &wb.name))
    {
        let range = n.target.to_range();
        let tl = &range.top_left;
        let mut target = String::new();
        if !crate::address::names_eq(&tl.workbook, &wb.name) {
            let _ = write!(target, "[{}]", tl.workbook);
        }
        let _ = write!(target, "{}!{}", format_sheet_name(&tl.sheet), tl.local());
        if range.top_left != range.bottom_right {
            let _ = write!(target, ":{}", range.bottom_right.local());
        }
        let _ = writeln!(out, "name {} = {target}", n.name);
    }
    Ok(out)
}

/// Every workbook of the workspace as sources, in workspace order.
pub fn dump_sources(ws: &Workspace) -> Vec<WorkbookSource> {
    ws.workbooks()
        .iter()
        .map(|wb| WorkbookSource::new(wb.name.clone(), dump_workbook(ws, &wb.name).expect("workbook exists")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<Workspace, LoadError> {
        load_sources(&[WorkbookSource::new("Book", text)])
    }

    #[test]
    fn cell_edits() {
        assert_eq!(parse_cell_input(""), CellInput::Empty);
        assert_eq!(parse_cell_input("=A1+1"), CellInput::Formula("A1+1".into()));
        assert_eq!(parse_cell_input("42"), CellInput::Literal(Value::Number(42.0)));
        assert_eq!(parse_cell_input("\"0201\""), CellInput::Literal(Value::text("0201")));
        assert_eq!(
            parse_cell_input("020103803X"),
            CellInput::Literal(Value::text("020103803X"))
        );
        assert_eq!(parse_cell_input("true"), CellInput::Literal(Value::Boolean(true)));
        assert_eq!(
            parse_cell_input("#N/A"),
            CellInput::Literal(Value::Error(ErrorKind::NA))
        );
    }

    fn err_line(text: &str) -> usize {
        match load(text) {
            Err(LoadError::Syntax { line, .. }) => line,
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }

    #[test]
    fn literals_and_formulas() {
        let mut ws = load(
            "# demo\nsheet S\nA1 : \"020103803X\"\nA2 = LEN(A1)\nA3 : 1.5\nA4 : TRUE\nA5 : #N/A\nA6 : \"say \"\"hi\"\"\"\n",
        )
        .unwrap();
        ws.full_recalc();
        assert_eq!(ws.get("A1"), Some(Value::text("020103803X")));
        assert_eq!(ws.get("A2"), Some(Value::Number(10.0)));
        assert_eq!(ws.get("A3"), Some(Value::Number(1.5)));
        assert_eq!(ws.get("A4"), Some(Value::Boolean(true)));
        assert_eq!(ws.get("A5"), Some(Value::Error(ErrorKind::NA)));
        assert_eq!(ws.get("A6"), Some(Value::text("say \"hi\"")));
    }

    #[test]
    fn syntax_errors_carry_lines() {
        assert_eq!(err_line("A1 : 1\n"), 1);
        assert_eq!(err_line("sheet S\n\nA1 : nope\n"), 3);
        assert_eq!(err_line("sheet S\nA1 : 1\nA1 : 2\n"), 3);
        assert_eq!(err_line("sheet S\nA1 = TABLE(,A2)\n"), 2);
        assert_eq!(err_line("sheet S\nA1 = (1\n"), 2);
        assert_eq!(err_line("sheet S\ntable A1:B2 colinput=C1 rowinput=C2\n"), 2);
        assert_eq!(err_line("sheet S\ntable A1:A5 colinput=C1\n"), 2);
        assert_eq!(err_line("sheet S\nB2 {=TABLE(,A1)}\n"), 2);
        assert_eq!(err_line("sheet S\nname SUM = S!A1\n"), 2);
        assert_eq!(err_line("sheet S\nXFE1 : 1\n"), 2);
    }

    #[test]
    fn tables_apply_after_cells() {
        let ws = load("sheet S\ntable A4:B5 colinput=A2\nB5 {=TABLE(,A2)}\nB4 = A2\nA5 : 3\n").unwrap();
        assert_eq!(ws.tables().len(), 1);
        assert!(matches!(
            load("sheet S\ntable A4:B5 colinput=A2\nB5 {=TABLE(,A3)}\n"),
            Err(LoadError::Syntax { line: 3, .. })
        ));
    }

    #[test]
    fn external_reference_to_missing_workbook_is_ref_error() {
        let mut ws = load("sheet S\nA1 = [Book2]Sheet1!A1\n").unwrap();
        ws.full_recalc();
        assert_eq!(ws.get("A1"), Some(Value::Error(ErrorKind::Ref)));
    }

    #[test]
    fn tsv_dump() {
        let mut ws = load("sheet S\nA1 : 1\nC2 : \"x\"\nB2 = A1/0\nsheet Empty\n").unwrap();
        ws.full_recalc();
        assert_eq!(
            dump_sheet(&ws, "Book", "S", DumpFormat::Tsv).unwrap(),
            "1\t\t\n\t#DIV/0!\tx\n"
        );
        assert_eq!(dump_sheet(&ws, "book", "empty", DumpFormat::Tsv).unwrap(), "");
        assert!(dump_sheet(&ws, "Book", "Nope", DumpFormat::Tsv).is_err());
    }

    #[test]
    fn source_round_trip() {
        let text = "sheet My Sheet\nA1 : \"a\"\"b\"\nB4 = A2*2\nA5 : 1\nA6 : -2.25\ntable A4:B6 colinput=A2\nsheet T\nC3 = SUM('My Sheet'!A1:A2)\nname Out = T!C3\n";
        let ws = load(text).unwrap();
        let once = dump_sources(&ws);
        let again = dump_sources(&load_sources(&once).unwrap());
        assert_eq!(once[0].text, again[0].text);
        assert!(once[0].text.contains("B5 {=TABLE(,A2)}"));
        assert!(once[0].text.contains("name Out = T!C3"));
    }
}
