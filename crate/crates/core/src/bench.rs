//! Batch solving of a directory of cases and the result table.
//!
//! A case is `<name>.fjs`, optionally paired with `<name>.sched`.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::dsl::{parse_constraints, parse_fjs};
use crate::instance::{validate_constraints, validate_instance, Time};
use crate::solver::{branch_and_bound, verify_schedule, SolveOptions, SolveStatus};

/// Shown for absent values.
pub const MISSING: &str = "—";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchStatus {
    Solved(SolveStatus),
    ParseError,
    Invalid,
    /// The solver returned a schedule the verifier rejected.
    VerifyFailed,
}

impl fmt::Display for BenchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchStatus::Solved(s) => s.fmt(f),
            BenchStatus::ParseError => f.write_str("ParseError"),
            BenchStatus::Invalid => f.write_str("Invalid"),
            BenchStatus::VerifyFailed => f.write_str("VerifyFailed"),
        }
    }
}

impl FromStr for BenchStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "Optimal" => BenchStatus::Solved(SolveStatus::Optimal),
            "Feasible" => BenchStatus::Solved(SolveStatus::Feasible),
            "Infeasible" => BenchStatus::Solved(SolveStatus::Infeasible),
            "TimeLimit" => BenchStatus::Solved(SolveStatus::TimeLimit),
            "ParseError" => BenchStatus::ParseError,
            "Invalid" => BenchStatus::Invalid,
            "VerifyFailed" => BenchStatus::VerifyFailed,
            other => return Err(other.to_string()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRow {
    pub case: String,
    pub makespan: Option<Time>,
    /// Proven lower bound from the search.
    pub best_solution: Option<Time>,
    pub status: BenchStatus,
    /// Wall time in milliseconds; `None` when timing is suppressed.
    pub wall_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchCase {
    pub name: String,
    pub instance: PathBuf,
    pub constraints: Option<PathBuf>,
}

/// `.fjs` files in `dir`, sorted by name, with their `.sched` sidecars.
pub fn discover(dir: &Path) -> io::Result<Vec<BenchCase>> {
    let mut cases = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("fjs") || !path.is_file() {
            continue;
        }
        let Some(name) = path.file_stem().and_then(|s| s.to_str()) else { continue };
        let sched = path.with_extension("sched");
        cases.push(BenchCase {
            name: name.to_string(),
            constraints: sched.is_file().then_some(sched),
            instance: path,
        });
    }
    cases.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(cases)
}

pub fn run_case(case: &BenchCase, options: &SolveOptions) -> BenchRow {
    let row = |status, makespan, best_solution, wall_ms| BenchRow {
        case: case.name.clone(),
        makespan,
        best_solution,
        status,
        wall_ms,
    };
    let parsed = fs::read_to_string(&case.instance).ok().and_then(|t| parse_fjs(&t).ok()).and_then(|inst| {
        let cs = match &case.constraints {
            None => Vec::new(),
            Some(p) => parse_constraints(&fs::read_to_string(p).ok()?).ok()?,
        };
        Some((inst, cs))
    });
    let Some((instance, cs)) = parsed else {
        return row(BenchStatus::ParseError, None, None, None);
    };
    if !validate_instance(&instance).is_empty() || !validate_constraints(&instance, &cs).is_empty() {
        return row(BenchStatus::Invalid, None, None, None);
    }
    let report = branch_and_bound(&instance, &cs, options);
    let wall_ms = Some(report.wall_time.as_millis() as u64);
    if let Some(best) = &report.best {
        if !verify_schedule(&instance, &cs, best).is_empty() {
            return row(BenchStatus::VerifyFailed, None, None, wall_ms);
        }
    }
    let bound = match report.status {
        SolveStatus::Infeasible => None,
        _ => Some(report.lower_bound),
    };
    row(BenchStatus::Solved(report.status), report.makespan(), bound, wall_ms)
}

pub fn run_bench(dir: &Path, options: &SolveOptions) -> io::Result<Vec<BenchRow>> {
    Ok(discover(dir)?.iter().map(|c| run_case(c, options)).collect())
}

fn fmt_opt_time(t: Option<Time>) -> String {
    match t {
        None => MISSING.to_string(),
        Some(t) if t.is_integer() => t.to_integer().to_string(),
        Some(t) => format!("{}/{}", t.numer(), t.denom()),
    }
}

fn fmt_ms(ms: Option<u64>) -> String {
    ms.map_or_else(|| MISSING.to_string(), |ms| format!("{}.{:03}", ms / 1000, ms % 1000))
}

const HEADER: [&str; 5] = ["case", "makespan", "best_solution", "status", "time"];

fn fields(r: &BenchRow) -> [String; 5] {
    [r.case.clone(), fmt_opt_time(r.makespan), fmt_opt_time(r.best_solution), r.status.to_string(), fmt_ms(r.wall_ms)]
}

/// Aligned plain-text table.
pub fn render_table(rows: &[BenchRow]) -> String {
    let cells: Vec<[String; 5]> = rows.iter().map(fields).collect();
    let mut width = HEADER.map(|h| h.chars().count());
    for r in &cells {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cols: &[String]| {
        let mut s = cols
            .iter()
            .zip(width)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect::<Vec<_>>()
            .join("  ");
        s.truncate(s.trim_end().len());
        s.push('\n');
        s
    };
    let mut out = line(&HEADER.map(String::from));
    for r in &cells {
        out.push_str(&line(r));
    }
    out
}

/// Comma-separated with a header row and LF line ends.
pub fn write_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(HEADER).expect("write to memory");
    for r in rows {
        w.write_record(fields(r)).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("UTF-8 fields")
}

#[derive(Debug, Error)]
pub enum BenchCsvError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}: bad {field} value {value:?}")]
    Field { row: usize, field: &'static str, value: String },
}

/// Parses the output of [`write_csv`].
pub fn read_csv(text: &str) -> Result<Vec<BenchRow>, BenchCsvError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (idx, rec) in reader.records().enumerate() {
        let rec = rec?;
        let bad = |field: &'static str, value: &str| BenchCsvError::Field { row: idx + 1, field, value: value.to_string() };
        let get = |n: usize| rec.get(n).unwrap_or("");
        let time = |field, s: &str| -> Result<Option<Time>, BenchCsvError> {
            if s == MISSING {
                return Ok(None);
            }
            let (p, q) = s.split_once('/').unwrap_or((s, "1"));
            match (p.parse::<i64>(), q.parse::<i64>()) {
                (Ok(p), Ok(q)) if q > 0 => Ok(Some(Time::new(p, q))),
                _ => Err(bad(field, s)),
            }
        };
        let ms = |s: &str| -> Result<Option<u64>, BenchCsvError> {
            if s == MISSING {
                return Ok(None);
            }
            let (secs, frac) = s.split_once('.').ok_or_else(|| bad("time", s))?;
            match (secs.parse::<u64>(), frac.len() == 3, frac.parse::<u64>()) {
                (Ok(a), true, Ok(b)) => Ok(Some(a * 1000 + b)),
                _ => Err(bad("time", s)),
            }
        };
        rows.push(BenchRow {
            case: get(0).to_string(),
            makespan: time("makespan", get(1))?,
            best_solution: time("best_solution", get(2))?,
            status: get(3).parse().map_err(|_| bad("status", get(3)))?,
            wall_ms: ms(get(4))?,
        });
    }
    Ok(rows)
}
