mod common;

use proptest::prelude::*;
use udsf::io::{dump_sources, load_sources};
use udsf::{CalcConfig, CellAddress, CellInput, Value, Workspace};

#[derive(Debug, Clone)]
enum Edit {
    Number(u32, u32, f64),
    Text(u32, u32, String),
    Formula(u32, u32, String),
    Clear(u32, u32),
}

fn a1(col: u32, row: u32) -> String {
    format!("{}{row}", char::from(b'A' + col as u8 - 1))
}

fn formula() -> impl Strategy<Value = String> {
    let cell = (1u32..=4, 1u32..=4).prop_map(|(c, r)| a1(c, r));
    prop_oneof![
        (cell.clone(), cell.clone()).prop_map(|(a, b)| format!("{a}+{b}")),
        (cell.clone(), cell.clone()).prop_map(|(a, b)| format!("SUM({a}:{b})")),
        (cell.clone(), cell.clone(), cell.clone()).prop_map(|(a, b, c)| format!("IF({a}>2,{b},{c})")),
        cell.clone().prop_map(|a| format!("LEN({a})&\"x\"")),
        (cell.clone(), 1u32..4).prop_map(|(a, n)| format!("MOD({a},{n})")),
        cell.prop_map(|a| format!("INDEX(A1:D4,2,2)*{a}")),
        Just("1/0".to_string()),
    ]
}

fn edit() -> impl Strategy<Value = Edit> {
    let pos = (1u32..=4, 1u32..=4);
    prop_oneof![
        (pos.clone(), -5.0f64..5.0).prop_map(|((c, r), x)| Edit::Number(c, r, x.round())),
        (pos.clone(), "[a-z0-9]{0,3}").prop_map(|((c, r), s)| Edit::Text(c, r, s)),
        (pos.clone(), formula()).prop_map(|((c, r), f)| Edit::Formula(c, r, f)),
        pos.prop_map(|(c, r)| Edit::Clear(c, r)),
    ]
}

fn fresh() -> Workspace {
    let mut ws = Workspace::new();
    ws.add_workbook("B").unwrap();
    ws.add_sheet("B", "S").unwrap();
    ws
}

fn apply(ws: &mut Workspace, e: &Edit) {
    let (c, r, input) = match e {
        Edit::Number(c, r, x) => (c, r, CellInput::Literal(Value::Number(*x))),
        Edit::Text(c, r, s) => (c, r, CellInput::Literal(Value::text(s.clone()))),
        Edit::Formula(c, r, f) => (c, r, CellInput::Formula(f.clone())),
        Edit::Clear(c, r) => (c, r, CellInput::Empty),
    };
    ws.set_cell(&CellAddress::new("B", "S", *c, *r), input).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph_tracks_edits(edits in prop::collection::vec(edit(), 1..30)) {
        let mut ws = fresh();
        for e in &edits {
            apply(&mut ws, e);
            prop_assert!(ws.graph_matches_rebuild());
        }
    }

    #[test]
    fn incremental_matches_fresh_load(edits in prop::collection::vec(edit(), 1..30), cut in 0usize..30) {
        let mut ws = fresh();
        for (i, e) in edits.iter().enumerate() {
            apply(&mut ws, e);
            if i == cut {
                ws.full_recalc();
            }
        }
        ws.full_recalc();
        let mut reloaded = load_sources(&dump_sources(&ws)).unwrap();
        reloaded.full_recalc();
        prop_assert_eq!(common::tsv_all(&ws), common::tsv_all(&reloaded));
    }

    #[test]
    fn evaluation_order_does_not_matter(edits in prop::collection::vec(edit(), 1..30), seed in any::<u64>()) {
        let mut a = fresh();
        let mut b = fresh();
        b.set_order_seed(Some(seed));
        for e in &edits {
            apply(&mut a, e);
            apply(&mut b, e);
        }
        a.full_recalc();
        b.full_recalc();
        prop_assert_eq!(common::tsv_all(&a), common::tsv_all(&b));
    }

    #[test]
    fn recalc_is_idempotent(edits in prop::collection::vec(edit(), 1..30)) {
        let mut ws = fresh();
        for e in &edits {
            apply(&mut ws, e);
        }
        ws.full_recalc();
        let once = common::tsv_all(&ws);
        let stats = ws.full_recalc();
        prop_assert_eq!(stats.cell_evaluations, 0);
        prop_assert_eq!(common::tsv_all(&ws), once);
    }
}

#[test]
fn shuffled_order_on_the_corpus() {
    for (name, ws) in common::corpus() {
        let mut base = ws.clone();
        base.full_recalc();
        let expected = common::tsv_all(&base);
        for seed in 0..8 {
            let mut w = ws.clone();
            w.set_order_seed(Some(seed));
            w.invalidate_all();
            w.full_recalc();
            assert_eq!(common::tsv_all(&w), expected, "{name} seed {seed}");
        }
    }
}

#[test]
fn iterative_counter_is_order_independent_within_a_sweep() {
    let mut ws = udsf::library::load_asset("counter").unwrap();
    *ws.config_mut() = CalcConfig {
        iterative: true,
        max_iterations: 5,
        ..CalcConfig::default()
    };
    ws.full_recalc();
    // two table passes, five sweeps each
    assert_eq!(common::get(&ws, "C1"), Value::Number(10.0));
}
