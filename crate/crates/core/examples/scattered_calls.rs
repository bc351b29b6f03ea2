//! Calls placed anywhere on the sheet, one 2x2 table each.

use udsf::library::load_asset;
use udsf::{dump_sheet, DumpFormat};

fn main() {
    let mut ws = load_asset("isbn_basic").expect("asset loads");
    ws.full_recalc();
    print!("{}", dump_sheet(&ws, "isbn_basic", "Calls", DumpFormat::Tsv).unwrap());
    for id in ws.table_schedule() {
        let t = ws.table(id).unwrap();
        println!("{id}: {} {}", t.region, t.body_text());
    }
}
