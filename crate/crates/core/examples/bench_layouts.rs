//! Many calls as many small tables or one large table.

use udsf::bench::{bench_results, run_bench, BenchMode, BenchReport};

fn main() {
    let calls = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(500);
    println!("{}", BenchReport::CSV_HEADER);
    let mut results = Vec::new();
    for mode in [BenchMode::Small, BenchMode::Large] {
        let (reports, ws) = run_bench(mode, calls, 1, 42).expect("fits on a sheet");
        for r in &reports {
            println!("{}", r.csv_row());
        }
        results.push(bench_results(&ws, mode, calls));
    }
    println!("same results: {}", results[0] == results[1]);
}
