//! One-input what-if data tables.
//!
//! A column-input table over `A4:B9` with input `A2` takes each value in
//! `A5:A9`, writes it into `A2`, recomputes everything downstream of `A2`,
//! and stores the value of the first-row formula `B4` into the body cell of
//! that row. Afterwards the original content of `A2` is put back. A 2x2
//! table is a single call of the function computed by the cells between
//! the input and the result formula.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::address::{format_reference, CellAddress, RangeRef, RefStyle, Reference};
use crate::eval::plan::build_plan;
use crate::eval::{EvalStats, Evaluator};
use crate::value::Value;
use crate::workspace::{CellContent, CellId, Workspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TableId(pub u32);

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "table#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Values down the first column, result formulas along the first row.
    ColumnInput,
    /// Values along the first row, result formulas down the first column.
    RowInput,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    pub id: TableId,
    pub region: RangeRef,
    pub orientation: Orientation,
    pub input: CellAddress,
}

impl DataTable {
    /// Text shown for body cells, e.g. `{=TABLE(,A2)}`.
    pub fn body_text(&self) -> String {
        let input = self.input.local();
        match self.orientation {
            Orientation::ColumnInput => format!("{{=TABLE(,{input})}}"),
            Orientation::RowInput => format!("{{=TABLE({input},)}}"),
        }
    }

    /// Number of substitution passes one evaluation performs.
    pub fn passes(&self) -> u32 {
        match self.orientation {
            Orientation::ColumnInput => self.region.rows() - 1,
            Orientation::RowInput => self.region.columns() - 1,
        }
    }

    pub fn body(&self) -> RangeRef {
        let tl = &self.region.top_left;
        let br = &self.region.bottom_right;
        RangeRef::new(tl.with_coords(tl.column + 1, tl.row + 1), br.clone())
    }

    pub fn contains(&self, addr: &CellAddress) -> bool {
        self.region.contains(addr)
    }

    /// (value cell, [(result formula cell, body cell)]) for each pass.
    fn passes_layout(&self) -> Vec<(CellAddress, Vec<(CellAddress, CellAddress)>)> {
        let tl = &self.region.top_left;
        let br = &self.region.bottom_right;
        match self.orientation {
            Orientation::ColumnInput => (tl.row + 1..=br.row)
                .map(|r| {
                    let cols = (tl.column + 1..=br.column)
                        .map(|c| (tl.with_coords(c, tl.row), tl.with_coords(c, r)))
                        .collect();
                    (tl.with_coords(tl.column, r), cols)
                })
                .collect(),
            Orientation::RowInput => (tl.column + 1..=br.column)
                .map(|c| {
                    let rows = (tl.row + 1..=br.row)
                        .map(|r| (tl.with_coords(tl.column, r), tl.with_coords(c, r)))
                        .collect();
                    (tl.with_coords(c, tl.row), rows)
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableError {
    #[error("table {0} needs at least 2 rows and 2 columns")]
    TooSmall(String),
    #[error("table {0} overlaps an existing table")]
    Overlap(String),
    #[error("input cell {input} lies inside table {region}")]
    InputInside { region: String, input: String },
    #[error("input cell {input} is not on the same sheet as table {region}")]
    InputElsewhere { region: String, input: String },
    #[error("cell {0} in a table body is not empty")]
    BodyNotEmpty(String),
    #[error("tables take a row input or a column input, not both")]
    TwoInputs,
    #[error("no sheet for table {0}")]
    UnknownSheet(String),
}

fn qualified(r: &RangeRef) -> String {
    format_reference(&Reference::Range(r.clone()), RefStyle::Qualified)
}

fn overlaps(a: &RangeRef, b: &RangeRef) -> bool {
    a.top_left.same_sheet(&b.top_left)
        && a.top_left.column <= b.bottom_right.column
        && b.top_left.column <= a.bottom_right.column
        && a.top_left.row <= b.bottom_right.row
        && b.top_left.row <= a.bottom_right.row
}

impl Workspace {
    pub fn tables(&self) -> &[DataTable] {
        &self.tables
    }

    pub fn table(&self, id: TableId) -> Option<&DataTable> {
        self.tables.iter().find(|t| t.id == id)
    }

    /// The table owning `addr` as a body cell.
    pub fn table_at(&self, addr: &CellAddress) -> Option<&DataTable> {
        match &self.cell(addr)?.content {
            CellContent::TableBody(id) => self.table(*id),
            _ => None,
        }
    }

    /// Registers a data table and turns its body into table cells.
    pub fn declare_table(
        &mut self,
        region: RangeRef,
        orientation: Orientation,
        input: CellAddress,
    ) -> Result<TableId, TableError> {
        let name = qualified(&region);
        if region.rows() < 2 || region.columns() < 2 {
            return Err(TableError::TooSmall(name));
        }
        if self.range_key(&region).is_none() {
            return Err(TableError::UnknownSheet(name));
        }
        if !input.same_sheet(&region.top_left) {
            return Err(TableError::InputElsewhere {
                region: name,
                input: input.to_string(),
            });
        }
        if region.contains(&input) {
            return Err(TableError::InputInside {
                region: name,
                input: input.to_string(),
            });
        }
        if self.tables.iter().any(|t| overlaps(&t.region, &region)) {
            return Err(TableError::Overlap(name));
        }
        let id = TableId(self.tables.iter().map(|t| t.id.0 + 1).max().unwrap_or(0));
        let table = DataTable {
            id,
            region,
            orientation,
            input,
        };
        let body = table.body();
        let mut body_ids = Vec::new();
        for row in body.top_left.row..=body.bottom_right.row {
            for col in body.top_left.column..=body.bottom_right.column {
                let id = self
                    .cell_id(&body.top_left.with_coords(col, row))
                    .expect("sheet checked");
                if self.cell_by_id(id).is_some_and(|c| c.content != CellContent::Empty) {
                    return Err(TableError::BodyNotEmpty(self.address_of(id).to_string()));
                }
                body_ids.push(id);
            }
        }
        for cell in body_ids {
            let c = self.cell_by_id_mut(cell);
            c.content = CellContent::TableBody(id);
            c.cached = Value::Blank;
        }
        self.tables.push(table);
        self.tables_dirty = true;
        self.plan_cache.clear();
        Ok(id)
    }

    /// Tables in evaluation order: workbook name, sheet position, anchor
    /// row, anchor column.
    pub fn table_schedule(&self) -> Vec<TableId> {
        let mut keyed: Vec<_> = self
            .tables
            .iter()
            .map(|t| {
                let tl = &t.region.top_left;
                let (book, sheet) = self
                    .resolve_sheet(&tl.workbook, &tl.sheet)
                    .expect("tables live on existing sheets");
                let wb_name = self.workbooks[book as usize].name.to_lowercase();
                ((wb_name, sheet, tl.row, tl.column), t.id)
            })
            .collect();
        keyed.sort();
        keyed.into_iter().map(|(_, id)| id).collect()
    }

    /// Evaluates every table in schedule order. Cells downstream of the
    /// table bodies are not refreshed; see [`Workspace::calculate_tables`].
    pub fn schedule_tables(&mut self, stats: &mut EvalStats) {
        for id in self.table_schedule() {
            self.evaluate_table(id, stats);
        }
        self.tables_dirty = false;
    }

    /// Substitutes each value into the input cell, recomputes, collects the
    /// results into the body, then restores the input.
    pub fn evaluate_table(&mut self, id: TableId, stats: &mut EvalStats) {
        let Some(table) = self.table(id).cloned() else {
            return;
        };
        let input = self.cell_id(&table.input).expect("declared on an existing sheet");
        let saved = self.cell_by_id(input).cloned();
        let plan = self.cached_plan(input);

        let layout: Vec<(CellId, Vec<(CellId, CellId)>)> = table
            .passes_layout()
            .into_iter()
            .map(|(v, outs)| {
                let ids = outs
                    .into_iter()
                    .map(|(f, b)| {
                        (
                            self.cell_id(&f).expect("in region"),
                            self.cell_id(&b).expect("in region"),
                        )
                    })
                    .collect();
                (self.cell_id(&v).expect("in region"), ids)
            })
            .collect();

        for (value_cell, outputs) in layout {
            let v = self.cached_by_id(value_cell).clone();
            let cell = self.cell_by_id_mut(input);
            cell.content = match v {
                Value::Blank => CellContent::Empty,
                ref v => CellContent::Literal(v.clone()),
            };
            cell.cached = v;
            self.run_plan(&plan, Some(input), stats);
            for (formula_cell, body_cell) in outputs {
                let result = match self.cell_by_id(formula_cell).map(|c| &c.content) {
                    Some(CellContent::Formula(_)) if plan.members.contains(&formula_cell) => {
                        self.cached_by_id(formula_cell).clone()
                    }
                    Some(CellContent::Formula(f)) => {
                        let f = Arc::clone(f);
                        stats.cell_evaluations += 1;
                        Evaluator::new(self, formula_cell).evaluate_formula(&f.ast)
                    }
                    _ => self.cached_by_id(formula_cell).clone(),
                };
                self.set_cached(body_cell, result);
            }
            stats.body_passes += 1;
        }

        match saved {
            Some(cell) => *self.cell_by_id_mut(input) = cell,
            None => {
                self.workbooks[input.book as usize].sheets[input.sheet as usize]
                    .cells
                    .remove(&(input.row, input.col));
            }
        }
        self.run_plan(&plan, Some(input), stats);
        stats.table_restores += 1;
    }

    fn cached_plan(&mut self, input: CellId) -> Arc<crate::eval::plan::Plan> {
        if let Some(p) = self.plan_cache.get(&(input, true)) {
            return Arc::clone(p);
        }
        let plan = Arc::new(build_plan(&self.graph, [input], Some(input), self.order_seed));
        self.plan_cache.insert((input, true), Arc::clone(&plan));
        plan
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::address::parse_address;
    use crate::workspace::CellInput;

    fn setup() -> Workspace {
        let mut ws = Workspace::new();
        ws.add_workbook("B").unwrap();
        ws.add_sheet("B", "S").unwrap();
        ws.add_sheet("B", "T").unwrap();
        ws
    }

    fn ctx() -> CellAddress {
        CellAddress::new("B", "S", 1, 1)
    }

    fn range(t: &str) -> RangeRef {
        parse_address(t, &ctx()).unwrap().to_range()
    }

    fn cell(t: &str) -> CellAddress {
        parse_address(t, &ctx()).unwrap().top_left().clone()
    }

    fn set(ws: &mut Workspace, a: &str, input: CellInput) {
        ws.set_cell(&cell(a), input).unwrap();
    }

    #[test]
    fn declaration_errors() {
        let mut ws = setup();
        assert!(matches!(
            ws.declare_table(range("A1:A5"), Orientation::ColumnInput, cell("C1")),
            Err(TableError::TooSmall(_))
        ));
        assert!(matches!(
            ws.declare_table(range("A1:B5"), Orientation::ColumnInput, cell("A2")),
            Err(TableError::InputInside { .. })
        ));
        assert!(matches!(
            ws.declare_table(range("A1:B5"), Orientation::ColumnInput, cell("T!C1")),
            Err(TableError::InputElsewhere { .. })
        ));
        ws.declare_table(range("A1:B5"), Orientation::ColumnInput, cell("D1"))
            .unwrap();
        assert!(matches!(
            ws.declare_table(range("B5:C6"), Orientation::ColumnInput, cell("D1")),
            Err(TableError::Overlap(_))
        ));
        set(&mut ws, "F2", CellInput::Literal(Value::Number(1.0)));
        assert!(matches!(
            ws.declare_table(range("E1:F2"), Orientation::ColumnInput, cell("D1")),
            Err(TableError::BodyNotEmpty(_))
        ));
    }

    #[test]
    fn body_text_and_integrity() {
        let mut ws = setup();
        let id = ws
            .declare_table(range("A4:B9"), Orientation::ColumnInput, cell("A2"))
            .unwrap();
        assert_eq!(ws.table(id).unwrap().body_text(), "{=TABLE(,A2)}");
        assert_eq!(ws.table_at(&cell("B7")).unwrap().id, id);
        assert!(ws.table_at(&cell("A7")).is_none());
        assert!(ws
            .set_cell(&cell("B5"), CellInput::Literal(Value::Number(1.0)))
            .is_err());
        let id2 = ws
            .declare_table(range("D4:F5"), Orientation::RowInput, cell("A2"))
            .unwrap();
        assert_eq!(ws.table(id2).unwrap().body_text(), "{=TABLE(A2,)}");
    }

    #[test]
    fn column_table_substitutes_and_restores() {
        let mut ws = setup();
        set(&mut ws, "A2", CellInput::Literal(Value::Number(100.0)));
        set(&mut ws, "B2", CellInput::Formula("A2*2".into()));
        set(&mut ws, "B4", CellInput::Formula("B2+1".into()));
        set(&mut ws, "C4", CellInput::Formula("A2".into()));
        for (i, a) in ["A5", "A6", "A7"].iter().enumerate() {
            set(&mut ws, a, CellInput::Literal(Value::Number(i as f64)));
        }
        ws.declare_table(range("A4:C7"), Orientation::ColumnInput, cell("A2"))
            .unwrap();
        let stats = ws.full_recalc();
        let v = |a: &str| ws.value(&cell(a));
        assert_eq!([v("B5"), v("B6"), v("B7")], [1.0, 3.0, 5.0].map(Value::Number));
        assert_eq!([v("C5"), v("C6"), v("C7")], [0.0, 1.0, 2.0].map(Value::Number));
        assert_eq!(v("A2"), Value::Number(100.0));
        assert_eq!(v("B2"), Value::Number(200.0));
        assert_eq!(v("B4"), Value::Number(201.0));
        assert_eq!(stats.body_passes, 3);
        assert_eq!(stats.table_restores, 1);
    }

    #[test]
    fn row_table_is_the_transpose() {
        let mut ws = setup();
        set(&mut ws, "B2", CellInput::Formula("A2*A2".into()));
        set(&mut ws, "D4", CellInput::Formula("B2".into()));
        set(&mut ws, "D5", CellInput::Formula("A2+1".into()));
        for (i, a) in ["E4", "F4"].iter().enumerate() {
            set(&mut ws, a, CellInput::Literal(Value::Number(i as f64 + 3.0)));
        }
        ws.declare_table(range("D4:F5"), Orientation::RowInput, cell("A2"))
            .unwrap();
        ws.full_recalc();
        let v = |a: &str| ws.value(&cell(a));
        assert_eq!([v("E5"), v("F5")], [4.0, 5.0].map(Value::Number));
        assert_eq!(v("A2"), Value::Blank);
        assert_eq!(v("B2"), Value::Number(0.0));
    }

    #[test]
    fn independent_input_copies_current_result() {
        let mut ws = setup();
        set(&mut ws, "B1", CellInput::Literal(Value::text("k")));
        set(&mut ws, "B4", CellInput::Formula("B1".into()));
        set(&mut ws, "A5", CellInput::Literal(Value::Number(1.0)));
        set(&mut ws, "A6", CellInput::Literal(Value::Number(2.0)));
        ws.declare_table(range("A4:B6"), Orientation::ColumnInput, cell("A2"))
            .unwrap();
        ws.full_recalc();
        assert_eq!(ws.value(&cell("B5")), Value::text("k"));
        assert_eq!(ws.value(&cell("B6")), Value::text("k"));
    }

    #[test]
    fn schedule_is_positional() {
        let mut ws = setup();
        let late = ws
            .declare_table(range("A10:B11"), Orientation::ColumnInput, cell("A1"))
            .unwrap();
        let early = ws
            .declare_table(range("C3:D4"), Orientation::ColumnInput, cell("A1"))
            .unwrap();
        let other_sheet = ws
            .declare_table(range("T!A1:B2"), Orientation::ColumnInput, cell("T!C1"))
            .unwrap();
        assert_eq!(ws.table_schedule(), vec![early, late, other_sheet]);
    }
}
