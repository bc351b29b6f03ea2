//! Synthetic call-heavy workbooks for timing.
//!
//! Both layouts call the ISBN-10 check in `bench_body.gwb` once per
//! argument. `Small` makes one 2x2 table per call, `Large` puts every
//! argument into a single table.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::address::{CellAddress, RangeRef, MAX_ROWS};
use crate::eval::EvalStats;
use crate::io::{load_sources, WorkbookSource};
use crate::library::BENCH_BODY;
use crate::tables::Orientation;
use crate::value::Value;
use crate::workspace::{CellInput, Workspace};

const BOOK: &str = "bench";
const SHEET: &str = "Bench";
const FIRST_ROW: u32 = 5;
const ARG_COL: u32 = 4;
const RESULT_COL: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchMode {
    Small,
    Large,
}

impl fmt::Display for BenchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchMode::Small => "small",
            BenchMode::Large => "large",
        })
    }
}

impl FromStr for BenchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "small" => Ok(BenchMode::Small),
            "large" => Ok(BenchMode::Large),
            _ => Err(format!("unknown mode `{s}` (expected small or large)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("call count must be at least 1")]
    NoCalls,
    #[error("{calls} calls do not fit on one sheet in {mode} mode (at most {max})")]
    TooManyCalls { mode: BenchMode, calls: u64, max: u64 },
}

/// One timed recalculation.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub mode: BenchMode,
    pub calls: u64,
    pub seconds: f64,
    pub stats: EvalStats,
}

impl BenchReport {
    pub const CSV_HEADER: &'static str = "mode,calls,seconds,cell_evaluations,body_passes,table_restores";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.6},{},{},{}",
            self.mode,
            self.calls,
            self.seconds,
            self.stats.cell_evaluations,
            self.stats.body_passes,
            self.stats.table_restores
        )
    }
}

pub fn max_calls(mode: BenchMode) -> u64 {
    let rows = u64::from(MAX_ROWS - FIRST_ROW);
    match mode {
        BenchMode::Small => rows.div_ceil(2),
        BenchMode::Large => rows,
    }
}

/// Reproducible ISBN-10 candidates: nine random digits, then the correct
/// check character about half the time and a random one otherwise.
pub fn bench_arguments(calls: u64, seed: u64) -> Vec<String> {
    const CHECK: &[u8; 11] = b"0123456789X";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..calls)
        .map(|_| {
            let digits: Vec<u32> = (0..9).map(|_| rng.gen_range(0..10)).collect();
            let sum: u32 = digits.iter().zip((2..=10).rev()).map(|(d, w)| d * w).sum();
            let check = if rng.gen_bool(0.5) {
                CHECK[((11 - sum % 11) % 11) as usize]
            } else {
                CHECK[rng.gen_range(0..11)]
            };
            let mut s: String = digits
                .iter()
                .map(|d| char::from_digit(*d, 10).expect("digit"))
                .collect();
            s.push(check as char);
            s
        })
        .collect()
}

fn addr(col: u32, row: u32) -> CellAddress {
    CellAddress::new(BOOK, SHEET, col, row)
}

/// Builds the benchmark workbook. Results land in column E.
pub fn bench_workspace(mode: BenchMode, calls: u64, seed: u64) -> Result<Workspace, BenchError> {
    if calls == 0 {
        return Err(BenchError::NoCalls);
    }
    let max = max_calls(mode);
    if calls > max {
        return Err(BenchError::TooManyCalls { mode, calls, max });
    }
    let mut ws = load_sources(&[WorkbookSource::new(BOOK, BENCH_BODY)]).expect("bench body asset loads");
    let link = || CellInput::Formula("C2".to_string());
    let input = addr(1, 2);
    let args = bench_arguments(calls, seed);
    let n = calls as u32;
    match mode {
        BenchMode::Small => {
            for (k, arg) in args.into_iter().enumerate() {
                let top = FIRST_ROW + 2 * k as u32;
                ws.set_cell(&addr(RESULT_COL, top), link()).expect("in grid");
                ws.set_cell(&addr(ARG_COL, top + 1), CellInput::Literal(Value::Text(arg)))
                    .expect("in grid");
            }
            for k in 0..n {
                let top = FIRST_ROW + 2 * k;
                let region = RangeRef::new(addr(ARG_COL, top), addr(RESULT_COL, top + 1));
                ws.declare_table(region, Orientation::ColumnInput, input.clone())
                    .expect("disjoint tables");
            }
        }
        BenchMode::Large => {
            ws.set_cell(&addr(RESULT_COL, FIRST_ROW), link()).expect("in grid");
            for (k, arg) in args.into_iter().enumerate() {
                let row = FIRST_ROW + 1 + k as u32;
                ws.set_cell(&addr(ARG_COL, row), CellInput::Literal(Value::Text(arg)))
                    .expect("in grid");
            }
            let region = RangeRef::new(addr(ARG_COL, FIRST_ROW), addr(RESULT_COL, FIRST_ROW + n));
            ws.declare_table(region, Orientation::ColumnInput, input)
                .expect("single table");
        }
    }
    Ok(ws)
}

/// Call results in argument order.
pub fn bench_results(ws: &Workspace, mode: BenchMode, calls: u64) -> Vec<Value> {
    (0..calls as u32)
        .map(|k| {
            let row = match mode {
                BenchMode::Small => FIRST_ROW + 2 * k + 1,
                BenchMode::Large => FIRST_ROW + 1 + k,
            };
            ws.value(&addr(RESULT_COL, row))
        })
        .collect()
}

/// Builds the workbook and times `repeat` full recalculations of it.
pub fn run_bench(
    mode: BenchMode,
    calls: u64,
    repeat: u32,
    seed: u64,
) -> Result<(Vec<BenchReport>, Workspace), BenchError> {
    let mut ws = bench_workspace(mode, calls, seed)?;
    let mut reports = Vec::new();
    for _ in 0..repeat.max(1) {
        ws.invalidate_all();
        let stats = ws.full_recalc();
        reports.push(BenchReport {
            mode,
            calls,
            seconds: stats.wall_time.as_secs_f64(),
            stats,
        });
    }
    Ok((reports, ws))
}
