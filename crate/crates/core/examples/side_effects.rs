//! A self-referencing cell observes every table pass, but only when
//! iterative calculation lets it exist at all.

use udsf::library::load_asset;
use udsf::CalcConfig;

fn main() {
    for iterative in [false, true] {
        let mut ws = load_asset("counter").expect("asset loads");
        *ws.config_mut() = CalcConfig {
            iterative,
            ..CalcConfig::default()
        };
        ws.full_recalc();
        let first = ws.get("C1").unwrap().render();
        ws.full_recalc();
        let second = ws.get("C1").unwrap().render();
        println!("iterative={iterative}: C1 = {first}, then {second} after another recalc");
    }
}
