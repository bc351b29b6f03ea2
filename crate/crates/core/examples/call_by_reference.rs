//! Passing a range address as text. The function body fetches the blocks
//! with INDIRECT and joins them.

use udsf::library::load_asset;
use udsf::{dump_sheet, CellAddress, CellInput, DumpFormat, Value};

fn main() {
    let mut ws = load_asset("isbn_byref").expect("asset loads");
    ws.full_recalc();
    print!(
        "{}",
        dump_sheet(&ws, "isbn_byref", "ISBNcheck", DumpFormat::Tsv).unwrap()
    );

    // a wrong check character in the referenced blocks
    let d5 = CellAddress::new("isbn_byref", "ISBNcheck", 4, 5);
    ws.set_cell(&d5, CellInput::Literal(Value::text("7"))).unwrap();
    ws.full_recalc();
    println!("after D5 := 7 -> {}", ws.get("F5").unwrap().render());
}
