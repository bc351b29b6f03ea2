//! Workbooks, sheets, cells and defined names.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::address::{
    is_valid_name, looks_like_coords, names_eq, CellAddress, RangeRef, Reference, MAX_COLUMNS, MAX_ROWS,
};
use crate::builtins;
use crate::eval::graph::{Dep, DependencyGraph, RangeKey};
use crate::eval::plan::Plan;
use crate::formula::{parse_formula, static_dependencies, Expr, FormulaError};
use crate::tables::{DataTable, TableId};
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableRecalc {
    #[default]
    Auto,
    Manual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalcConfig {
    pub table_recalc: TableRecalc,
    pub iterative: bool,
    pub max_iterations: u32,
    pub max_change: f64,
}

impl Default for CalcConfig {
    fn default() -> Self {
        CalcConfig {
            table_recalc: TableRecalc::Auto,
            iterative: false,
            max_iterations: 100,
            max_change: 0.001,
        }
    }
}

/// Internal coordinate of a cell: workbook index, sheet index, row, column.
/// Orders like addresses do within a workbook.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct CellId {
    pub book: u32,
    pub sheet: u32,
    pub row: u32,
    pub col: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Formula {
    /// Source as written, without the leading `=`.
    pub source: String,
    pub ast: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellContent {
    Empty,
    Literal(Value),
    Formula(Arc<Formula>),
    /// Interior of a data table; the value is written by the table.
    TableBody(TableId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub content: CellContent,
    pub cached: Value,
}

impl Cell {
    pub(crate) fn empty() -> Cell {
        Cell {
            content: CellContent::Empty,
            cached: Value::Blank,
        }
    }
}

/// New content for [`Workspace::set_cell`].
#[derive(Debug, Clone, PartialEq)]
pub enum CellInput {
    Empty,
    Literal(Value),
    /// Formula source without the leading `=`.
    Formula(String),
}

#[derive(Debug, Clone, Default)]
pub struct Sheet {
    pub name: String,
    /// Keyed by (row, column).
    pub(crate) cells: BTreeMap<(u32, u32), Cell>,
}

impl Sheet {
    pub fn cell(&self, column: u32, row: u32) -> Option<&Cell> {
        self.cells.get(&(row, column))
    }

    /// Cells in row-major order as `(column, row, cell)`.
    pub fn cells(&self) -> impl Iterator<Item = (u32, u32, &Cell)> {
        self.cells.iter().map(|(&(r, c), cell)| (c, r, cell))
    }

    /// Last used (column, row), or `None` for an empty sheet.
    pub fn extent(&self) -> Option<(u32, u32)> {
        let rows = self.cells.keys().next_back()?.0;
        let cols = self.cells.keys().map(|&(_, c)| c).max()?;
        Some((cols, rows))
    }
}

#[derive(Debug, Clone, Default)]
pub struct Workbook {
    pub name: String,
    pub sheets: Vec<Sheet>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefinedName {
    pub name: String,
    /// Workbook that declared the name.
    pub workbook: String,
    pub target: Reference,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error("workbook `{0}` already exists")]
    DuplicateWorkbook(String),
    #[error("no workbook named `{0}`")]
    UnknownWorkbook(String),
    #[error("no sheet `{sheet}` in workbook `{workbook}`")]
    UnknownSheet { workbook: String, sheet: String },
    #[error("defined name `{0}` already exists")]
    DuplicateName(String),
    #[error("defined name `{0}` collides with a builtin function")]
    BuiltinName(String),
    #[error("cell {0} is outside the grid")]
    OutOfGrid(String),
    #[error("cell {0} is part of a data table and cannot be edited")]
    TableIntegrity(String),
    #[error("formula in {cell}: {source}")]
    Formula {
        cell: String,
        #[source]
        source: FormulaError,
    },
}

/// Cells and tables marked for recomputation by an edit.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DirtySet {
    pub cells: Vec<CellAddress>,
    pub tables: Vec<TableId>,
}

/// A set of open workbooks plus everything needed to recalculate them.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    pub(crate) workbooks: Vec<Workbook>,
    pub(crate) names: Vec<DefinedName>,
    pub(crate) tables: Vec<DataTable>,
    pub(crate) config: CalcConfig,
    pub(crate) graph: DependencyGraph,
    pub(crate) dirty: BTreeSet<CellId>,
    pub(crate) tables_dirty: bool,
    pub(crate) plan_cache: HashMap<(CellId, bool), Arc<Plan>>,
    pub(crate) order_seed: Option<u64>,
}

impl Workspace {
    pub fn new() -> Self {
        Workspace::default()
    }

    pub fn with_config(config: CalcConfig) -> Self {
        Workspace {
            config,
            ..Workspace::default()
        }
    }

    pub fn config(&self) -> &CalcConfig {
        &self.config
    }

    pub fn config_mut(&mut self) -> &mut CalcConfig {
        &mut self.config
    }

    pub fn workbooks(&self) -> &[Workbook] {
        &self.workbooks
    }

    pub fn workbook(&self, name: &str) -> Option<&Workbook> {
        self.workbooks.iter().find(|w| names_eq(&w.name, name))
    }

    pub fn sheet(&self, workbook: &str, sheet: &str) -> Option<&Sheet> {
        self.workbook(workbook)?
            .sheets
            .iter()
            .find(|s| names_eq(&s.name, sheet))
    }

    pub fn defined_names(&self) -> &[DefinedName] {
        &self.names
    }

    /// Seeds the tie-breaking between independent cells during
    /// recalculation. `None` restores address order.
    pub fn set_order_seed(&mut self, seed: Option<u64>) {
        self.order_seed = seed;
        self.plan_cache.clear();
    }

    pub fn add_workbook(&mut self, name: &str) -> Result<(), ModelError> {
        if !is_valid_name(name) {
            return Err(ModelError::InvalidName(name.to_string()));
        }
        if self.workbook(name).is_some() {
            return Err(ModelError::DuplicateWorkbook(name.to_string()));
        }
        self.workbooks.push(Workbook {
            name: name.to_string(),
            sheets: Vec::new(),
        });
        self.structure_changed();
        Ok(())
    }

    /// Adds a sheet if it does not exist yet.
    pub fn add_sheet(&mut self, workbook: &str, sheet: &str) -> Result<(), ModelError> {
        if !is_valid_name(sheet) {
            return Err(ModelError::InvalidName(sheet.to_string()));
        }
        let wb = self
            .workbooks
            .iter_mut()
            .find(|w| names_eq(&w.name, workbook))
            .ok_or_else(|| ModelError::UnknownWorkbook(workbook.to_string()))?;
        if !wb.sheets.iter().any(|s| names_eq(&s.name, sheet)) {
            wb.sheets.push(Sheet {
                name: sheet.to_string(),
                cells: BTreeMap::new(),
            });
            self.structure_changed();
        }
        Ok(())
    }

    pub fn define_name(&mut self, name: &str, workbook: &str, target: Reference) -> Result<(), ModelError> {
        let valid = name.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '.')
            && !looks_like_coords(name)
            && !name.eq_ignore_ascii_case("TRUE")
            && !name.eq_ignore_ascii_case("FALSE");
        if !valid {
            return Err(ModelError::InvalidName(name.to_string()));
        }
        if builtins::lookup(name).is_some() || name.eq_ignore_ascii_case("TABLE") {
            return Err(ModelError::BuiltinName(name.to_string()));
        }
        if self.names.iter().any(|n| names_eq(&n.name, name)) {
            return Err(ModelError::DuplicateName(name.to_string()));
        }
        let owner = self
            .workbook(workbook)
            .ok_or_else(|| ModelError::UnknownWorkbook(workbook.to_string()))?
            .name
            .clone();
        self.names.push(DefinedName {
            name: name.to_string(),
            workbook: owner,
            target,
        });
        self.structure_changed();
        Ok(())
    }

    pub(crate) fn resolve_name(&self, workbook: Option<&str>, name: &str) -> Option<&Reference> {
        self.names
            .iter()
            .find(|n| names_eq(&n.name, name) && workbook.is_none_or(|w| names_eq(w, &n.workbook)))
            .map(|n| &n.target)
    }

    pub(crate) fn resolve_sheet(&self, workbook: &str, sheet: &str) -> Option<(u32, u32)> {
        let (bi, wb) = self
            .workbooks
            .iter()
            .enumerate()
            .find(|(_, w)| names_eq(&w.name, workbook))?;
        let si = wb.sheets.iter().position(|s| names_eq(&s.name, sheet))?;
        Some((bi as u32, si as u32))
    }

    pub(crate) fn cell_id(&self, addr: &CellAddress) -> Option<CellId> {
        let (book, sheet) = self.resolve_sheet(&addr.workbook, &addr.sheet)?;
        Some(CellId {
            book,
            sheet,
            row: addr.row,
            col: addr.column,
        })
    }

    pub(crate) fn range_key(&self, range: &RangeRef) -> Option<RangeKey> {
        let (book, sheet) = self.resolve_sheet(&range.top_left.workbook, &range.top_left.sheet)?;
        Some(RangeKey {
            book,
            sheet,
            r1: range.top_left.row,
            c1: range.top_left.column,
            r2: range.bottom_right.row,
            c2: range.bottom_right.column,
        })
    }

    pub(crate) fn address_of(&self, id: CellId) -> CellAddress {
        let wb = &self.workbooks[id.book as usize];
        CellAddress::new(
            wb.name.clone(),
            wb.sheets[id.sheet as usize].name.clone(),
            id.col,
            id.row,
        )
    }

    pub(crate) fn cell_by_id(&self, id: CellId) -> Option<&Cell> {
        self.workbooks[id.book as usize].sheets[id.sheet as usize]
            .cells
            .get(&(id.row, id.col))
    }

    pub(crate) fn cell_by_id_mut(&mut self, id: CellId) -> &mut Cell {
        self.workbooks[id.book as usize].sheets[id.sheet as usize]
            .cells
            .entry((id.row, id.col))
            .or_insert_with(Cell::empty)
    }

    pub(crate) fn cached_by_id(&self, id: CellId) -> &Value {
        const BLANK: Value = Value::Blank;
        self.cell_by_id(id).map_or(&BLANK, |c| &c.cached)
    }

    pub(crate) fn set_cached(&mut self, id: CellId, value: Value) {
        self.cell_by_id_mut(id).cached = value;
    }

    pub fn cell(&self, addr: &CellAddress) -> Option<&Cell> {
        self.cell_by_id(self.cell_id(addr)?)
    }

    /// The cached value at `addr`; Blank for empty or unknown cells.
    pub fn value(&self, addr: &CellAddress) -> Value {
        self.cell(addr).map_or(Value::Blank, |c| c.cached.clone())
    }

    /// Parses `[Book]Sheet!A1` (or a shorter form relative to the first
    /// sheet of the first workbook) and returns the cached value.
    pub fn get(&self, reference: &str) -> Option<Value> {
        let wb = self.workbooks.first()?;
        let sheet = wb.sheets.first()?;
        let ctx = CellAddress::new(wb.name.clone(), sheet.name.clone(), 1, 1);
        let r = crate::address::parse_address(reference, &ctx).ok()?;
        Some(self.value(r.top_left()))
    }

    fn check_grid(addr: &CellAddress) -> Result<(), ModelError> {
        if addr.column == 0 || addr.row == 0 || addr.column > MAX_COLUMNS || addr.row > MAX_ROWS {
            return Err(ModelError::OutOfGrid(addr.to_string()));
        }
        Ok(())
    }

    pub(crate) fn require_id(&self, addr: &CellAddress) -> Result<CellId, ModelError> {
        Self::check_grid(addr)?;
        self.cell_id(addr).ok_or_else(|| {
            if self.workbook(&addr.workbook).is_none() {
                ModelError::UnknownWorkbook(addr.workbook.clone())
            } else {
                ModelError::UnknownSheet {
                    workbook: addr.workbook.clone(),
                    sheet: addr.sheet.clone(),
                }
            }
        })
    }

    pub(crate) fn make_content(addr: &CellAddress, input: CellInput) -> Result<CellContent, ModelError> {
        Ok(match input {
            CellInput::Empty => CellContent::Empty,
            CellInput::Literal(Value::Array(_)) => {
                return Err(ModelError::Formula {
                    cell: addr.to_string(),
                    source: FormulaError::Syntax {
                        message: "cells hold scalars".into(),
                        span: 0..0,
                    },
                })
            }
            CellInput::Literal(v) => CellContent::Literal(v),
            CellInput::Formula(source) => {
                let ast = parse_formula(&source, addr).map_err(|source| ModelError::Formula {
                    cell: addr.to_string(),
                    source,
                })?;
                CellContent::Formula(Arc::new(Formula { source, ast }))
            }
        })
    }

    /// Writes content without touching the dependency graph. Used by the
    /// loader, which rebuilds the graph once at the end.
    pub(crate) fn put_content(&mut self, id: CellId, content: CellContent) {
        if content == CellContent::Empty {
            self.workbooks[id.book as usize].sheets[id.sheet as usize]
                .cells
                .remove(&(id.row, id.col));
            return;
        }
        let cached = match &content {
            CellContent::Literal(v) => v.clone(),
            _ => Value::Blank,
        };
        let cell = self.cell_by_id_mut(id);
        cell.content = content;
        cell.cached = cached;
    }

    /// Replaces a cell's content and marks it and its transitive dependents
    /// dirty. With automatic table recalculation every table is marked as
    /// well, since table calls are volatile.
    pub fn set_cell(&mut self, addr: &CellAddress, input: CellInput) -> Result<DirtySet, ModelError> {
        let id = self.require_id(addr)?;
        if let Some(CellContent::TableBody(_)) = self.cell_by_id(id).map(|c| &c.content) {
            return Err(ModelError::TableIntegrity(addr.to_string()));
        }
        let canonical = self.address_of(id);
        let content = Self::make_content(&canonical, input)?;
        self.graph.remove(id);
        self.put_content(id, content);
        self.link_cell(id);
        self.plan_cache.clear();

        let mut dirty = vec![id];
        dirty.extend(self.transitive_dependents([id]));
        self.dirty.extend(dirty.iter().copied());
        let mut out = DirtySet {
            cells: dirty.into_iter().map(|d| self.address_of(d)).collect(),
            tables: Vec::new(),
        };
        if self.config.table_recalc == TableRecalc::Auto {
            out.tables = self.tables.iter().map(|t| t.id).collect();
        }
        self.tables_dirty = true;
        Ok(out)
    }

    /// Adds the graph edges for one formula cell.
    pub(crate) fn link_cell(&mut self, id: CellId) {
        let Some(Cell {
            content: CellContent::Formula(f),
            ..
        }) = self.cell_by_id(id)
        else {
            return;
        };
        let f = Arc::clone(f);
        let resolver = |wb: Option<&str>, name: &str| self.resolve_name(wb, name).cloned();
        let deps = static_dependencies(&f.ast, &resolver);
        let edges: Vec<Dep> = deps
            .refs
            .iter()
            .filter_map(|r| match r {
                Reference::Cell(c) => self.cell_id(c).map(Dep::Cell),
                Reference::Range(r) => self.range_key(r).map(Dep::Range),
            })
            .collect();
        self.graph.insert(id, edges, deps.volatile);
    }

    /// Rebuilds the dependency graph from cell contents and marks every
    /// cell dirty.
    pub(crate) fn rebuild_graph(&mut self) {
        self.graph = DependencyGraph::default();
        let ids: Vec<CellId> = self.all_cell_ids().collect();
        for id in &ids {
            self.link_cell(*id);
        }
        self.dirty = ids.into_iter().collect();
        self.plan_cache.clear();
        self.tables_dirty = true;
    }

    pub(crate) fn all_cell_ids(&self) -> impl Iterator<Item = CellId> + '_ {
        self.workbooks.iter().enumerate().flat_map(|(bi, wb)| {
            wb.sheets.iter().enumerate().flat_map(move |(si, s)| {
                s.cells.keys().map(move |&(row, col)| CellId {
                    book: bi as u32,
                    sheet: si as u32,
                    row,
                    col,
                })
            })
        })
    }

    fn structure_changed(&mut self) {
        self.rebuild_graph();
    }

    /// Graph rebuilt from scratch, for consistency checks.
    pub fn graph_matches_rebuild(&self) -> bool {
        let mut copy = self.clone();
        copy.rebuild_graph();
        copy.graph == self.graph && self.graph.is_consistent()
    }
}
