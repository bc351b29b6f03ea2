//! The command-line verbs driven in-process against the shipped assets.

use std::path::Path;

fn main() {
    let assets = Path::new(env!("CARGO_MANIFEST_DIR")).join("assets");
    let demo = assets.join("library_demo.gws");
    let demo = demo.to_str().unwrap();
    let basic = assets.join("isbn_basic.gwb");
    let basic = basic.to_str().unwrap();
    let sessions: [&[&str]; 5] = [
        &["udsf", "get", "[Book2]Sheet1!F3", demo],
        &["udsf", "recalc", "--stats", demo],
        &[
            "udsf",
            "get",
            "DataTable!B5",
            basic,
            "--set",
            "DataTable!A5=\"0201038014\"",
        ],
        &[
            "udsf",
            "get",
            "DataTable!B5",
            basic,
            "--set",
            "DataTable!A5=\"0201038014\"",
            "--table-recalc",
            "manual",
        ],
        &["udsf", "bench", "--calls", "100", "--mode", "large"],
    ];
    for args in sessions {
        println!("$ {}", args[1..].join(" "));
        let code = udsf::cli::run(args.iter().copied());
        println!("(exit {code})");
    }
}
