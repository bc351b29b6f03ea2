#![allow(dead_code)]

use std::collections::BTreeMap;

use udsf::io::{load_sources, WorkbookSource};
use udsf::library::{demo_workspace, load_asset, ASSETS, BOOK2, LIB};
use udsf::{dump_sheet, CellContent, DumpFormat, Value, Workspace};

/// Every shipped workbook, Book2 together with lib.
pub fn corpus() -> Vec<(String, Workspace)> {
    let mut out = Vec::new();
    for (name, _) in ASSETS {
        if *name == "Book2" {
            continue;
        }
        out.push((name.to_string(), load_asset(name).expect("asset loads")));
    }
    out.push(("Book2+lib".to_string(), demo_workspace().expect("demo loads")));
    out
}

pub fn demo_with(extra: &str) -> Workspace {
    load_sources(&[
        WorkbookSource::new("Book2", format!("{BOOK2}\n{extra}")),
        WorkbookSource::new("lib", LIB),
    ])
    .expect("demo loads")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snap {
    pub body: bool,
    pub value: Value,
}

/// Cached value of every stored cell, keyed by qualified address.
pub fn snapshot(ws: &Workspace) -> BTreeMap<String, Snap> {
    let mut out = BTreeMap::new();
    for wb in ws.workbooks() {
        for sheet in &wb.sheets {
            for (col, row, cell) in sheet.cells() {
                let key = udsf::CellAddress::new(wb.name.clone(), sheet.name.clone(), col, row).to_string();
                out.insert(
                    key,
                    Snap {
                        body: matches!(cell.content, CellContent::TableBody(_)),
                        value: cell.cached.clone(),
                    },
                );
            }
        }
    }
    out
}

/// Addresses whose value differs between two snapshots.
pub fn changed(a: &BTreeMap<String, Snap>, b: &BTreeMap<String, Snap>) -> Vec<(String, bool)> {
    let mut keys: Vec<&String> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .filter(|k| a.get(*k).map(|s| &s.value) != b.get(*k).map(|s| &s.value))
        .map(|k| (k.clone(), a.get(k).or(b.get(k)).is_some_and(|s| s.body)))
        .collect()
}

pub fn tsv_all(ws: &Workspace) -> String {
    let mut out = String::new();
    for wb in ws.workbooks() {
        for s in &wb.sheets {
            out.push_str(&format!("# [{}]{}\n", wb.name, s.name));
            out.push_str(&dump_sheet(ws, &wb.name, &s.name, DumpFormat::Tsv).unwrap());
        }
    }
    out
}

pub fn row(ws: &Workspace, workbook: &str, sheet: &str, n: usize) -> String {
    dump_sheet(ws, workbook, sheet, DumpFormat::Tsv)
        .unwrap()
        .lines()
        .nth(n - 1)
        .unwrap_or("")
        .to_string()
}

pub fn get(ws: &Workspace, reference: &str) -> Value {
    ws.get(reference).unwrap_or_else(|| panic!("bad reference {reference}"))
}
