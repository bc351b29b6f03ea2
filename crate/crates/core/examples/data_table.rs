//! Many calls of one function through a single data table.
//!
//! Column A holds the arguments, B4 links to the result cell D2, and each
//! body cell B5:B9 is one call.

use udsf::library::load_asset;
use udsf::{dump_sheet, DumpFormat};

fn main() {
    let mut ws = load_asset("isbn_basic").expect("asset loads");
    let stats = ws.full_recalc();
    print!(
        "{}",
        dump_sheet(&ws, "isbn_basic", "DataTable", DumpFormat::Tsv).unwrap()
    );
    println!(
        "{} cell evaluations, {} table passes, {} restores",
        stats.cell_evaluations, stats.body_passes, stats.table_restores
    );
}
