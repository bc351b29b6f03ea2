//! XADR turns a range into its qualified address text, which a function
//! body can hand to INDIRECT.

use udsf::library::demo_workspace;
use udsf::{evaluate_in, CellAddress};

fn main() {
    let mut ws = demo_workspace().expect("assets load");
    ws.full_recalc();
    let here = CellAddress::new("Book2", "Sheet1", 1, 20);
    for src in [
        "XADR(A3:D3)",
        "XADR(Sheet2!A3:D3)",
        "XADR(C7)",
        "INDEX(INDIRECT(XADR(A3:D3)),3)",
        r#""[Book2]"&ADDRESS(ROW(A1:A5),COLUMN(A1:A5),4,TRUE,"Sheet1")"#,
    ] {
        println!("{src:<60} {}", evaluate_in(&ws, &here, src).unwrap().render());
    }
    println!("N1 = {}", ws.get("N1").unwrap().render());
    println!("N2 = {}", ws.get("N2").unwrap().render());
}
