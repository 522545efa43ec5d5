//! `skedc validate|build|solve|bench|gantt`.
//!
//! Exit codes: 0 ok, 1 violations or a rejected schedule, 2 parse or I/O
//! error, 3 infeasible model, 4 time limit without a schedule.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::{render_table, run_bench, write_csv, BenchStatus};
use crate::dsl::{parse_constraints, parse_fjs};
use crate::gantt::{render_svg, render_text};
use crate::instance::{validate_constraints, validate_instance, Instance, ScenarioConstraint, Time};
use crate::lp::{write_json, write_lp};
use crate::milp::{build_model, Family};
use crate::schedule_json::{read_schedule, write_schedule};
use crate::solver::{
    branch_and_bound, brute_force, verify_schedule, verify_schedule_structure, BruteLimits, SolveOptions,
    SolveStatus,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_TIMEOUT: i32 = 4;

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "SKEDC_THREADS";

#[derive(Debug, Parser)]
#[command(name = "skedc", version, about = "Flexible job-shop model compiler and exact solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Lp,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChartFormat {
    Text,
    Svg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an instance and optional constraint file.
    Validate { instance: PathBuf, constraints: Option<PathBuf> },
    /// Compile to an LP file or a JSON model dump.
    Build {
        instance: PathBuf,
        constraints: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "lp")]
        emit: Emit,
        /// Output path, `-` for stdout. Default: `<stem>.lp` / `<stem>.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve to optimality and write the schedule JSON.
    Solve {
        instance: PathBuf,
        constraints: Option<PathBuf>,
        #[arg(long, default_value_t = 100.0, value_parser = parse_seconds)]
        time_limit: f64,
        /// Use full enumeration instead of branch-and-bound.
        #[arg(long)]
        oracle: bool,
        /// Schedule path, `-` for stdout. Default: `<stem>.schedule.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve every `.fjs` case in a directory.
    Bench {
        dir: PathBuf,
        #[arg(long, default_value_t = 100.0, value_parser = parse_seconds)]
        time_limit: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: TableFormat,
        /// Leave the time column empty so output is reproducible.
        #[arg(long)]
        no_time: bool,
    },
    /// Render a schedule JSON as a chart.
    Gantt {
        schedule: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: ChartFormat,
        /// Check the schedule against this instance as well.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long, requires = "instance")]
        constraints: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_seconds(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        _ => Err(format!("{s:?} is not a non-negative number of seconds")),
    }
}

/// Worker count from the environment, else the available parallelism.
pub fn worker_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn solve_options(time_limit: f64) -> SolveOptions {
    SolveOptions {
        time_limit: Some(Duration::from_secs_f64(time_limit)),
        node_limit: None,
        workers: worker_count(),
        canonicalize: true,
    }
}

fn fmt_time(t: Time) -> String {
    if t.is_integer() {
        t.to_integer().to_string()
    } else {
        format!("{}/{}", t.numer(), t.denom())
    }
}

/// Failure carrying its exit code; the message is printed to stderr.
struct Fail(i32, String);

type Outcome = Result<i32, Fail>;

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn load(instance: &Path, constraints: Option<&Path>) -> Result<(Instance, Vec<ScenarioConstraint>), Fail> {
    let inst = parse_fjs(&read(instance)?).map_err(|e| Fail(EXIT_PARSE, format!("{}:{e}", instance.display())))?;
    let cs = match constraints {
        None => Vec::new(),
        Some(p) => parse_constraints(&read(p)?).map_err(|e| Fail(EXIT_PARSE, format!("{}:{e}", p.display())))?,
    };
    Ok((inst, cs))
}

fn load_valid(
    instance: &Path,
    constraints: Option<&Path>,
    err: &mut dyn Write,
) -> Result<Result<(Instance, Vec<ScenarioConstraint>), i32>, Fail> {
    let (inst, cs) = load(instance, constraints)?;
    let mut violations: Vec<String> = validate_instance(&inst).iter().map(ToString::to_string).collect();
    if violations.is_empty() {
        violations.extend(validate_constraints(&inst, &cs).iter().map(ToString::to_string));
    }
    if violations.is_empty() {
        return Ok(Ok((inst, cs)));
    }
    for v in violations {
        let _ = writeln!(err, "{v}");
    }
    Ok(Err(EXIT_VIOLATIONS))
}

fn default_out(instance: &Path, suffix: &str) -> PathBuf {
    let stem = instance.file_stem().map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    PathBuf::from(format!("{stem}{suffix}"))
}

fn emit(path: &Path, text: &str, out: &mut dyn Write) -> Result<(), Fail> {
    if path == Path::new("-") {
        let _ = out.write_all(text.as_bytes());
        Ok(())
    } else {
        fs::write(path, text).map_err(|e| Fail(EXIT_PARSE, format!("{}: {e}", path.display())))
    }
}

fn cmd_validate(instance: &Path, constraints: Option<&Path>, err: &mut dyn Write) -> Outcome {
    Ok(match load_valid(instance, constraints, err)? {
        Ok(_) => EXIT_OK,
        Err(code) => code,
    })
}

fn cmd_build(
    instance: &Path,
    constraints: Option<&Path>,
    kind: Emit,
    dest: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let (inst, cs) = match load_valid(instance, constraints, err)? {
        Ok(v) => v,
        Err(code) => return Ok(code),
    };
    let model = build_model(&inst, &cs);
    let (text, suffix) = match kind {
        Emit::Lp => (write_lp(&model).map_err(|e| Fail(EXIT_VIOLATIONS, e.to_string()))?, ".lp"),
        Emit::Json => (write_json(&model), ".json"),
    };
    let path = dest.map_or_else(|| default_out(instance, suffix), Path::to_path_buf);
    emit(&path, &text, out)?;
    let c = model.counts();
    // counts go to stderr when the artifact itself is on stdout
    let sink: &mut dyn Write = if path == Path::new("-") { err } else { out };
    let _ = writeln!(sink, "vars X={} Y={} B={} Cmax={}", c.x, c.y, c.b, c.cmax);
    let rows: Vec<String> = Family::ALL.iter().map(|f| format!("{}={}", f.tag(), c.rows(*f))).collect();
    let _ = writeln!(sink, "rows {} total={}", rows.join(" "), model.constraints.len());
    Ok(EXIT_OK)
}

fn cmd_solve(
    instance: &Path,
    constraints: Option<&Path>,
    time_limit: f64,
    oracle: bool,
    dest: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let (inst, cs) = match load_valid(instance, constraints, err)? {
        Ok(v) => v,
        Err(code) => return Ok(code),
    };
    let report = if oracle {
        brute_force(&inst, &cs, BruteLimits::default()).map_err(|e| Fail(EXIT_VIOLATIONS, e.to_string()))?
    } else {
        branch_and_bound(&inst, &cs, &solve_options(time_limit))
    };
    if let Some(best) = &report.best {
        let violations = verify_schedule(&inst, &cs, best);
        if !violations.is_empty() {
            for v in violations {
                let _ = writeln!(err, "{v}");
            }
            return Ok(EXIT_VIOLATIONS);
        }
    }
    let makespan = report.makespan().map_or_else(|| "—".to_string(), fmt_time);
    let _ = writeln!(out, "{} {}", report.status, makespan);
    let _ = writeln!(out, "lower_bound {}", fmt_time(report.lower_bound));
    let _ = writeln!(out, "nodes {}", report.nodes);
    if report.status == SolveStatus::Infeasible {
        if !report.witness.is_empty() {
            let _ = writeln!(out, "witness {}", report.witness.join(" "));
        }
        return Ok(EXIT_INFEASIBLE);
    }
    let Some(best) = &report.best else { return Ok(EXIT_TIMEOUT) };
    let path = dest.map_or_else(|| default_out(instance, ".schedule.json"), Path::to_path_buf);
    emit(&path, &write_schedule(best), out)?;
    Ok(EXIT_OK)
}

fn cmd_bench(dir: &Path, time_limit: f64, format: TableFormat, no_time: bool, out: &mut dyn Write) -> Outcome {
    let mut rows = run_bench(dir, &solve_options(time_limit))
        .map_err(|e| Fail(EXIT_PARSE, format!("{}: {e}", dir.display())))?;
    if no_time {
        rows.iter_mut().for_each(|r| r.wall_ms = None);
    }
    let text = match format {
        TableFormat::Text => render_table(&rows),
        TableFormat::Csv => write_csv(&rows),
    };
    let _ = out.write_all(text.as_bytes());
    Ok(if rows.iter().any(|r| r.status == BenchStatus::ParseError) { EXIT_PARSE } else { EXIT_OK })
}

fn cmd_gantt(
    schedule: &Path,
    format: ChartFormat,
    instance: Option<&Path>,
    constraints: Option<&Path>,
    dest: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let sched = read_schedule(&read(schedule)?).map_err(|e| Fail(EXIT_PARSE, format!("{}: {e}", schedule.display())))?;
    let (violations, machines) = match instance {
        Some(path) => {
            let (inst, cs) = match load_valid(path, constraints, err)? {
                Ok(v) => v,
                Err(code) => return Ok(code),
            };
            (verify_schedule(&inst, &cs, &sched), inst.machine_count)
        }
        None => (verify_schedule_structure(&sched), 0),
    };
    if !violations.is_empty() {
        for v in violations {
            let _ = writeln!(err, "{v}");
        }
        return Ok(EXIT_VIOLATIONS);
    }
    let text = match format {
        ChartFormat::Text => render_text(&sched, machines),
        ChartFormat::Svg => render_svg(&sched, machines),
    };
    emit(dest.unwrap_or(Path::new("-")), &text, out)?;
    Ok(EXIT_OK)
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_PARSE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    let result = match &cli.command {
        Command::Validate { instance, constraints } => cmd_validate(instance, constraints.as_deref(), err),
        Command::Build { instance, constraints, emit, out: dest } => {
            cmd_build(instance, constraints.as_deref(), *emit, dest.as_deref(), out, err)
        }
        Command::Solve { instance, constraints, time_limit, oracle, out: dest } => {
            cmd_solve(instance, constraints.as_deref(), *time_limit, *oracle, dest.as_deref(), out, err)
        }
        Command::Bench { dir, time_limit, format, no_time } => cmd_bench(dir, *time_limit, *format, *no_time, out),
        Command::Gantt { schedule, format, instance, constraints, out: dest } => {
            cmd_gantt(schedule, *format, instance.as_deref(), constraints.as_deref(), dest.as_deref(), out, err)
        }
    };
    match result {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            let _ = writeln!(err, "{msg}");
            code
        }
    }
}
