//! Command-line front end: `recalc`, `get`, `dump` and `bench`.
//!
//! Exit codes: 0 on success, 1 when a workspace fails to load, 2 for bad
//! usage (including unknown sheets and out-of-grid bench sizes). Error
//! values inside cells are ordinary output.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::address::{parse_address, CellAddress, Reference};
use crate::bench::{run_bench, BenchMode, BenchReport};
use crate::eval::EvalStats;
use crate::io::{dump_sheet, dump_workbook, load_workspace, parse_cell_input, DumpFormat};
use crate::workspace::{CalcConfig, TableRecalc, Workspace};

const EXIT_LOAD: i32 = 1;
const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "udsf", version, about = "Spreadsheet functions built from data tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Recalculate a workspace.
    Recalc {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Print evaluation counts.
        #[arg(long)]
        stats: bool,
        #[command(flatten)]
        calc: CalcArgs,
    },
    /// Print one cell's value after recalculation.
    Get {
        /// Cell reference such as `[Book2]Sheet1!F3`.
        reference: String,
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        calc: CalcArgs,
    },
    /// Print sheets after recalculation.
    Dump {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// `[Book]Sheet` or `Sheet`; every sheet when omitted.
        #[arg(long)]
        sheet: Option<String>,
        #[arg(long, value_enum, default_value_t = FormatArg::Tsv)]
        format: FormatArg,
        #[command(flatten)]
        calc: CalcArgs,
    },
    /// Time recalculation of many calls of the ISBN-10 check, as CSV.
    Bench {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        calls: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Large)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        repeat: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct CalcArgs {
    #[arg(long, value_enum, default_value_t = RecalcArg::Auto)]
    table_recalc: RecalcArg,
    #[arg(long)]
    iterative: bool,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
    max_iter: u32,
    #[arg(long, default_value_t = 0.001, value_parser = non_negative)]
    max_change: f64,
    /// Edit applied after the initial recalculation, as `REF=VALUE`.
    /// VALUE is `=formula`, a literal such as `"0201"` or `42`, or bare text.
    #[arg(long = "set", value_name = "REF=VALUE")]
    edits: Vec<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RecalcArg {
    Auto,
    Manual,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Tsv,
    Source,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Small,
    Large,
}

fn non_negative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("`{s}` is not a non-negative number")),
    }
}

impl CalcArgs {
    fn config(&self) -> CalcConfig {
        CalcConfig {
            table_recalc: match self.table_recalc {
                RecalcArg::Auto => TableRecalc::Auto,
                RecalcArg::Manual => TableRecalc::Manual,
            },
            iterative: self.iterative,
            max_iterations: self.max_iter,
            max_change: self.max_change,
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Like [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "udsf: {}", f.message);
            f.code
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Recalc { files, stats, calc } => {
            let (_, s) = prepare(&files, &calc)?;
            if stats {
                write_stats(out, &s);
            }
        }
        Command::Get { reference, files, calc } => {
            let (ws, _) = prepare(&files, &calc)?;
            let addr = resolve_cell(&ws, &reference)?;
            let _ = writeln!(out, "{}", ws.value(&addr).render());
        }
        Command::Dump {
            files,
            sheet,
            format,
            calc,
        } => {
            let (ws, _) = prepare(&files, &calc)?;
            let format = match format {
                FormatArg::Tsv => DumpFormat::Tsv,
                FormatArg::Source => DumpFormat::Source,
            };
            match sheet {
                Some(s) => {
                    let (book, sheet) = resolve_sheet(&ws, &s)?;
                    let text = dump_sheet(&ws, &book, &sheet, format).map_err(|e| usage(e.to_string()))?;
                    let _ = out.write_all(text.as_bytes());
                }
                None => dump_all(&ws, format, out),
            }
        }
        Command::Bench {
            calls,
            mode,
            repeat,
            seed,
        } => {
            let mode = match mode {
                ModeArg::Small => BenchMode::Small,
                ModeArg::Large => BenchMode::Large,
            };
            let (reports, _) = run_bench(mode, calls, repeat, seed).map_err(|e| usage(e.to_string()))?;
            let _ = writeln!(out, "{}", BenchReport::CSV_HEADER);
            for r in reports {
                let _ = writeln!(out, "{}", r.csv_row());
            }
        }
    }
    Ok(())
}

/// Loads, recalculates as saved, applies `--set` edits and recalculates
/// again under the requested settings. Without edits only the second
/// recalculation runs.
fn prepare(files: &[PathBuf], calc: &CalcArgs) -> Result<(Workspace, EvalStats), Failure> {
    let mut ws = load_workspace(files).map_err(|e| Failure {
        code: EXIT_LOAD,
        message: e.to_string(),
    })?;
    let mut edits = Vec::new();
    for e in &calc.edits {
        let (reference, value) = e
            .split_once('=')
            .ok_or_else(|| usage(format!("--set expects REF=VALUE, got `{e}`")))?;
        edits.push((resolve_cell(&ws, reference.trim())?, parse_cell_input(value)));
    }
    if !edits.is_empty() {
        ws.full_recalc();
        for (addr, input) in edits {
            ws.set_cell(&addr, input).map_err(|e| usage(e.to_string()))?;
        }
    }
    *ws.config_mut() = calc.config();
    let stats = ws.full_recalc();
    Ok((ws, stats))
}

fn default_context(ws: &Workspace) -> Result<CellAddress, Failure> {
    let wb = ws
        .workbooks()
        .first()
        .ok_or_else(|| usage("workspace has no workbooks"))?;
    let sheet = wb.sheets.first().ok_or_else(|| usage("first workbook has no sheets"))?;
    Ok(CellAddress::new(wb.name.clone(), sheet.name.clone(), 1, 1))
}

fn resolve_cell(ws: &Workspace, reference: &str) -> Result<CellAddress, Failure> {
    let ctx = default_context(ws)?;
    let r = parse_address(reference, &ctx).map_err(|e| usage(format!("`{reference}`: {e}")))?;
    let Reference::Cell(addr) = r else {
        return Err(usage(format!("`{reference}` is a range, expected one cell")));
    };
    if ws.sheet(&addr.workbook, &addr.sheet).is_none() {
        return Err(usage(format!(
            "no sheet `{}` in workbook `{}`",
            addr.sheet, addr.workbook
        )));
    }
    Ok(addr)
}

fn resolve_sheet(ws: &Workspace, text: &str) -> Result<(String, String), Failure> {
    let addr = resolve_cell(ws, &format!("{text}!A1"))?;
    let wb = ws.workbook(&addr.workbook).expect("checked");
    let sheet = ws.sheet(&addr.workbook, &addr.sheet).expect("checked");
    Ok((wb.name.clone(), sheet.name.clone()))
}

fn dump_all(ws: &Workspace, format: DumpFormat, out: &mut dyn Write) {
    for wb in ws.workbooks() {
        match format {
            DumpFormat::Source => {
                let _ = writeln!(out, "# workbook {}", wb.name);
                let _ = out.write_all(dump_workbook(ws, &wb.name).expect("exists").as_bytes());
            }
            DumpFormat::Tsv => {
                for s in &wb.sheets {
                    let _ = writeln!(out, "# [{}]{}", wb.name, s.name);
                    let _ = out.write_all(dump_sheet(ws, &wb.name, &s.name, format).expect("exists").as_bytes());
                }
            }
        }
    }
}

fn write_stats(out: &mut dyn Write, s: &EvalStats) {
    let _ = writeln!(out, "cell_evaluations\t{}", s.cell_evaluations);
    let _ = writeln!(out, "body_passes\t{}", s.body_passes);
    let _ = writeln!(out, "table_restores\t{}", s.table_restores);
    let _ = writeln!(out, "seconds\t{:.6}", s.wall_time.as_secs_f64());
}
