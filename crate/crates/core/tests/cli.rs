use std::fs;
use std::path::Path;

use udsf::cli::run_with;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(std::iter::once("udsf").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn asset(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("assets")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn get_reads_a_table_result() {
    let (code, out, _) = run(&["get", "DataTable!B7", &asset("isbn_basic.gwb")]);
    assert_eq!((code, out.as_str()), (0, "valid\n"));
    let (code, out, _) = run(&["get", "[Book2]Sheet1!F3", &asset("library_demo.gws")]);
    assert_eq!((code, out.as_str()), (0, "valid\n"));
}

#[test]
fn get_undeclared_cell_prints_an_empty_line() {
    let (code, out, _) = run(&["get", "Z99", &asset("isbn_basic.gwb")]);
    assert_eq!((code, out.as_str()), (0, "\n"));
}

#[test]
fn error_values_are_data() {
    let (code, out, _) = run(&["get", "C2", &asset("isbn_basic.gwb")]);
    assert_eq!((code, out.as_str()), (0, "#VALUE!\n"));
}

#[test]
fn manual_table_recalc_leaves_bodies_alone() {
    let file = asset("isbn_basic.gwb");
    let edit = "DataTable!A5=\"0201038014\"";
    let (_, auto, _) = run(&["get", "DataTable!B5", &file, "--set", edit]);
    let (_, manual, _) = run(&["get", "DataTable!B5", &file, "--set", edit, "--table-recalc", "manual"]);
    assert_eq!(auto, "invalid\n");
    assert_eq!(manual, "valid\n");
}

#[test]
fn dump_formats() {
    let file = asset("isbn_basic.gwb");
    let (code, tsv, _) = run(&["dump", &file, "--sheet", "ISBNcheck"]);
    assert_eq!(code, 0);
    assert_eq!(tsv.lines().nth(1), Some("8320425395\tvalid\t#VALUE!\tvalid"));
    let (code, src, _) = run(&["dump", &file, "--sheet", "[isbn_basic]DataTable", "--format", "source"]);
    assert_eq!(code, 0);
    assert!(src.contains("B5 {=TABLE(,A2)}"));
    assert!(src.contains("table A4:B9 colinput=A2"));
}

#[test]
fn unknown_sheet_exits_2() {
    let file = asset("isbn_basic.gwb");
    assert_eq!(run(&["dump", &file, "--sheet", "Nope"]).0, 2);
    assert_eq!(run(&["get", "Nope!A1", &file]).0, 2);
}

#[test]
fn load_failures_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.gwb");
    fs::write(&bad, "sheet S\nA1 = SUM(\n").unwrap();
    let (code, _, err) = run(&["recalc", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("bad.gwb:2"), "{err}");

    let dup = dir.path().join("dup.gwb");
    fs::write(&dup, "sheet S\nA1 : 1\nA1 : 2\n").unwrap();
    assert_eq!(run(&["recalc", dup.to_str().unwrap()]).0, 1);
}

#[test]
fn workspace_file_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("f.gwb"),
        "sheet S\nB2 = A2*A2\nE4 = B2\nD5 : 7\ntable D4:E5 colinput=A2\n",
    )
    .unwrap();
    fs::write(dir.path().join("main.gwb"), "sheet Main\nA1 = [Sq]S!E5+1\n").unwrap();
    let gws = dir.path().join("ws.gws");
    fs::write(&gws, "workbook Main main.gwb\nworkbook Sq f.gwb\n").unwrap();
    let (code, out, _) = run(&["get", "A1", gws.to_str().unwrap()]);
    assert_eq!((code, out.as_str()), (0, "50\n"));
    let (code, out, _) = run(&["recalc", "--stats", gws.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("body_passes\t1\n"), "{out}");
    assert!(out.contains("table_restores\t1\n"), "{out}");
}

#[test]
fn iterative_flags() {
    let file = asset("counter.gwb");
    assert_eq!(run(&["get", "C1", &file]).1, "#CYCLE!\n");
    assert_eq!(run(&["get", "C1", &file, "--iterative", "--max-iter", "3"]).1, "6\n");
}

#[test]
fn bench_verb() {
    let (code, out, _) = run(&["bench", "--calls", "5", "--mode", "large", "--seed", "9"]);
    assert_eq!(code, 0);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!((row[0], row[1], row[4], row[5]), ("large", "5", "5", "1"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_udsf");
    let status = std::process::Command::new(bin).arg("bogus").output().unwrap();
    assert_eq!(status.status.code(), Some(2));
    let ok = std::process::Command::new(bin)
        .args(["get", "[Book2]Sheet1!F5", &asset("library_demo.gws")])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "valid\n");
}
