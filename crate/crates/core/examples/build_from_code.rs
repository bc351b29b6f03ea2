//! Building a workbook, a function and its calls without any file.

use udsf::{dump_sheet, CellAddress, CellInput, DumpFormat, Orientation, RangeRef, Value, Workspace};

fn main() {
    let mut ws = Workspace::new();
    ws.add_workbook("Book").unwrap();
    ws.add_sheet("Book", "Sheet1").unwrap();
    let at = |col, row| CellAddress::new("Book", "Sheet1", col, row);

    // hypotenuse of a right triangle with legs A2 and 4
    ws.set_cell(&at(2, 2), CellInput::Formula("A2^2+4^2".into())).unwrap();
    ws.set_cell(&at(3, 2), CellInput::Formula("B2^0.5".into())).unwrap();

    // a row-input table: arguments in E5:H5, result link in D6
    ws.set_cell(&at(4, 6), CellInput::Formula("C2".into())).unwrap();
    for (i, leg) in [3.0, 0.0, 7.5, 4.0].into_iter().enumerate() {
        ws.set_cell(&at(5 + i as u32, 5), CellInput::Literal(Value::Number(leg)))
            .unwrap();
    }
    ws.declare_table(RangeRef::new(at(4, 5), at(8, 6)), Orientation::RowInput, at(1, 2))
        .unwrap();

    ws.full_recalc();
    print!("{}", dump_sheet(&ws, "Book", "Sheet1", DumpFormat::Source).unwrap());
    print!("{}", dump_sheet(&ws, "Book", "Sheet1", DumpFormat::Tsv).unwrap());
}
