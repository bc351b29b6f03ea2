//! A headless spreadsheet engine for user-defined spreadsheet functions
//! built from one-input what-if data tables.
//!
//! A function is an ordinary region of formulas with a marked input cell
//! and a marked output cell. Each 2x2 data table whose input is that cell
//! and whose result formula reads that output is one call of the function.
//!
//! ```
//! use udsf::{CellAddress, CellInput, Orientation, Value, Workspace};
//!
//! let mut ws = Workspace::new();
//! ws.add_workbook("Book").unwrap();
//! ws.add_sheet("Book", "Sheet1").unwrap();
//! let at = |a: &str| udsf::parse_address(a, &CellAddress::new("Book", "Sheet1", 1, 1))
//!     .unwrap()
//!     .to_range();
//!
//! // body: B2 squares the input A2
//! ws.set_cell(&at("B2").top_left, CellInput::Formula("A2*A2".into())).unwrap();
//! // call: result link in E4, argument in D5, result lands in E5
//! ws.set_cell(&at("E4").top_left, CellInput::Formula("B2".into())).unwrap();
//! ws.set_cell(&at("D5").top_left, CellInput::Literal(Value::Number(7.0))).unwrap();
//! ws.declare_table(at("D4:E5"), Orientation::ColumnInput, at("A2").top_left).unwrap();
//!
//! ws.full_recalc();
//! assert_eq!(ws.value(&at("E5").top_left), Value::Number(49.0));
//! ```

pub mod address;
pub mod bench;
pub mod builtins;
pub mod cli;
pub mod eval;
pub mod formula;
pub mod io;
pub mod library;
pub mod tables;
pub mod value;
pub mod workspace;

pub use address::{format_reference, parse_address, CellAddress, RangeRef, RefStyle, Reference};
pub use eval::{evaluate_in, EvalStats};
pub use io::{dump_sheet, load_workspace, DumpFormat, LoadError};
pub use tables::{DataTable, Orientation, TableError, TableId};
pub use value::{coerce, Coercion, ErrorKind, Value};
pub use workspace::{CalcConfig, Cell, CellContent, CellInput, ModelError, TableRecalc, Workspace};
