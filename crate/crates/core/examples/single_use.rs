//! A function used once: type an ISBN into A2 and read D2.

use udsf::library::load_asset;
use udsf::{dump_sheet, CellInput, DumpFormat, Value};

fn main() {
    let mut ws = load_asset("isbn_basic").expect("asset loads");
    ws.full_recalc();
    print!(
        "{}",
        dump_sheet(&ws, "isbn_basic", "ISBNcheck", DumpFormat::Tsv).unwrap()
    );

    for isbn in ["020103803X", "9780201134476", "0201038014"] {
        let a2 = udsf::CellAddress::new("isbn_basic", "ISBNcheck", 1, 2);
        ws.set_cell(&a2, CellInput::Literal(Value::text(isbn))).unwrap();
        ws.full_recalc();
        println!("{isbn} -> {}", ws.get("ISBNcheck!D2").unwrap().render());
    }
}
