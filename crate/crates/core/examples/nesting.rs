//! A call inside a function body does not see the outer argument.
//!
//! The outer function adds 1 to the result of an inner call that multiplies
//! by 10. Evaluated fresh, arguments 1 and 2 would give 11 and 21.

use udsf::library::load_asset;

fn main() {
    let mut ws = load_asset("nested").expect("asset loads");
    ws.full_recalc();
    for (arg, cell) in [(1, "E5"), (2, "E6")] {
        println!(
            "outer({arg}) = {} (fresh evaluation: {})",
            ws.get(cell).unwrap().render(),
            arg * 10 + 1
        );
    }
}
