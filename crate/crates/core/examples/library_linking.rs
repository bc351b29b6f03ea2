//! A second workbook calling functions kept in `lib`.

use udsf::library::{demo_workspace, oracle_isbn, oracle_issn};
use udsf::{dump_sheet, DumpFormat};

fn main() {
    let mut ws = demo_workspace().expect("assets load");
    ws.full_recalc();
    for sheet in ["Sheet1", "Sheet2"] {
        println!("[Book2]{sheet}");
        print!("{}", dump_sheet(&ws, "Book2", sheet, DumpFormat::Tsv).unwrap());
    }

    let show = |r: &str| ws.get(r).unwrap().render();
    println!(
        "ISSN 0317-8471: {} (oracle {})",
        show("[Book2]Sheet1!I3"),
        oracle_issn("0317-8471").as_str()
    );
    println!(
        "ISBN 9780201134476: {} (oracle {})",
        show("[Book2]Sheet1!K3"),
        oracle_isbn("9780201134476").as_str()
    );
}
