//! The shipped function library and reference check-digit oracles.
//!
//! The oracles work on the character data directly and share no code with
//! the engine, so they can judge what the spreadsheet formulas compute.

use crate::io::{load_sources, LoadError, WorkbookSource};
use crate::workspace::Workspace;

pub const ISBN_BASIC: &str = include_str!("../assets/isbn_basic.gwb");
pub const ISBN_BYREF: &str = include_str!("../assets/isbn_byref.gwb");
pub const LIB: &str = include_str!("../assets/lib.gwb");
pub const BOOK2: &str = include_str!("../assets/book2.gwb");
pub const BENCH_BODY: &str = include_str!("../assets/bench_body.gwb");
pub const NESTED: &str = include_str!("../assets/nested.gwb");
pub const COUNTER: &str = include_str!("../assets/counter.gwb");

/// Shipped workbooks as (workbook name, source).
pub const ASSETS: &[(&str, &str)] = &[
    ("isbn_basic", ISBN_BASIC),
    ("isbn_byref", ISBN_BYREF),
    ("lib", LIB),
    ("Book2", BOOK2),
    ("bench_body", BENCH_BODY),
    ("nested", NESTED),
    ("counter", COUNTER),
];

/// Loads one shipped workbook on its own.
pub fn load_asset(name: &str) -> Result<Workspace, LoadError> {
    let (name, text) = ASSETS
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .unwrap_or_else(|| panic!("no asset named {name}"));
    load_sources(&[WorkbookSource::new(*name, *text)])
}

/// Book2 together with lib.
pub fn demo_workspace() -> Result<Workspace, LoadError> {
    load_sources(&[WorkbookSource::new("Book2", BOOK2), WorkbookSource::new("lib", LIB)])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Valid => "valid",
            Verdict::Invalid => "invalid",
        }
    }

    fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Valid
        } else {
            Verdict::Invalid
        }
    }
}

fn digit(c: char) -> Option<u32> {
    c.to_digit(10)
}

fn check_value(c: char) -> Option<u32> {
    match c {
        'X' | 'x' => Some(10),
        _ => digit(c),
    }
}

/// ISBN-10: nine digits and a check character (digit or X) such that
/// 10*d1 + 9*d2 + ... + 2*d9 + c is divisible by 11.
pub fn oracle_isbn10(candidate: &str) -> Verdict {
    let chars: Vec<char> = candidate.chars().collect();
    if chars.len() != 10 {
        return Verdict::Invalid;
    }
    let mut sum = 0;
    for (i, &c) in chars[..9].iter().enumerate() {
        let Some(d) = digit(c) else {
            return Verdict::Invalid;
        };
        sum += (10 - i as u32) * d;
    }
    let Some(c) = check_value(chars[9]) else {
        return Verdict::Invalid;
    };
    Verdict::from_bool((sum + c) % 11 == 0)
}

/// ISBN-13: thirteen digits, weights alternating 1 and 3 over the first
/// twelve, check digit (10 - sum mod 10) mod 10.
pub fn oracle_isbn13(candidate: &str) -> Verdict {
    let digits: Option<Vec<u32>> = candidate.chars().map(digit).collect();
    let Some(d) = digits else {
        return Verdict::Invalid;
    };
    if d.len() != 13 {
        return Verdict::Invalid;
    }
    let sum: u32 = d[..12]
        .iter()
        .enumerate()
        .map(|(i, &x)| if i % 2 == 0 { x } else { 3 * x })
        .sum();
    Verdict::from_bool((10 - sum % 10) % 10 == d[12])
}

/// ISBN of either length.
pub fn oracle_isbn(candidate: &str) -> Verdict {
    match candidate.chars().count() {
        10 => oracle_isbn10(candidate),
        13 => oracle_isbn13(candidate),
        _ => Verdict::Invalid,
    }
}

/// ISSN, written `NNNN-NNNC` or without the hyphen: weights 8..2 over the
/// first seven digits, check character (digit or X) making the total
/// divisible by 11.
pub fn oracle_issn(candidate: &str) -> Verdict {
    let mut chars: Vec<char> = candidate.chars().collect();
    if chars.len() == 9 && chars[4] == '-' {
        chars.remove(4);
    }
    if chars.len() != 8 {
        return Verdict::Invalid;
    }
    let mut sum = 0;
    for (i, &c) in chars[..7].iter().enumerate() {
        let Some(d) = digit(c) else {
            return Verdict::Invalid;
        };
        sum += (8 - i as u32) * d;
    }
    let Some(c) = check_value(chars[7]) else {
        return Verdict::Invalid;
    };
    Verdict::from_bool((sum + c) % 11 == 0)
}

/// Weighted sum 10*d1 + ... + 2*d9 of an ISBN-10 prefix, mod 11. The
/// check-digit formula in the workbooks cannot produce a check digit of 0,
/// which is exactly the case where this is 0.
pub fn isbn10_prefix_residue(prefix: &str) -> Option<u32> {
    let chars: Vec<char> = prefix.chars().take(9).collect();
    if chars.len() != 9 {
        return None;
    }
    let mut sum = 0;
    for (i, c) in chars.into_iter().enumerate() {
        sum += (10 - i as u32) * digit(c)?;
    }
    Some(sum % 11)
}
