//! C interface to skedc.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `_free` function. Strings returned through `char **`
//! out-parameters are released with `skedc_string_free`. Every fallible
//! call returns a `SkedcStatus`; on failure `skedc_last_error_message`
//! describes the error for the calling thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use skedc::dsl::{parse_constraints, parse_fjs};
use skedc::instance::{validate_constraints, validate_instance};
use skedc::lp::{write_json, write_lp};
use skedc::milp::build_model;
use skedc::schedule_json::write_schedule;
use skedc::solver::{branch_and_bound, SolveOptions, SolveReport, SolveStatus};
use skedc::{Instance, ScenarioConstraint, Time};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkedcStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidProblem = 4,
    Unrepresentable = 5,
    NoSchedule = 6,
    Panic = 7,
}

/// Outcome of a solve.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkedcSolveStatus {
    Optimal = 0,
    Feasible = 1,
    Infeasible = 2,
    TimeLimit = 3,
}

/// A parsed instance with its scenario constraints.
pub struct SkedcProblem {
    instance: Instance,
    constraints: Vec<ScenarioConstraint>,
}

/// Result of `skedc_problem_solve`.
pub struct SkedcReport {
    report: SolveReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: SkedcStatus, msg: impl Into<String>) -> SkedcStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> SkedcStatus) -> SkedcStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(SkedcStatus::Panic, "internal panic"))
}

unsafe fn borrow_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, SkedcStatus> {
    if p.is_null() {
        return Err(fail(SkedcStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(SkedcStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> SkedcStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            SkedcStatus::Ok
        }
        Err(_) => fail(SkedcStatus::Panic, "output contains a NUL byte"),
    }
}

unsafe fn put_ratio(t: Time, num: *mut i64, den: *mut i64) {
    if !num.is_null() {
        *num = *t.numer();
    }
    if !den.is_null() {
        *den = *t.denom();
    }
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn skedc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn skedc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses `.fjs` text and optional `.sched` text (may be NULL) into `*out`.
#[no_mangle]
pub unsafe extern "C" fn skedc_problem_parse(
    fjs: *const c_char,
    sched: *const c_char,
    out: *mut *mut SkedcProblem,
) -> SkedcStatus {
    guard(|| {
        if out.is_null() {
            return fail(SkedcStatus::NullArgument, "out is null");
        }
        let fjs = match borrow_str(fjs, "fjs") {
            Ok(s) => s,
            Err(st) => return st,
        };
        let instance = match parse_fjs(fjs) {
            Ok(i) => i,
            Err(e) => return fail(SkedcStatus::ParseError, format!("instance:{e}")),
        };
        let constraints = if sched.is_null() {
            Vec::new()
        } else {
            let text = match borrow_str(sched, "sched") {
                Ok(s) => s,
                Err(st) => return st,
            };
            match parse_constraints(text) {
                Ok(cs) => cs,
                Err(e) => return fail(SkedcStatus::ParseError, format!("constraints:{e}")),
            }
        };
        *out = Box::into_raw(Box::new(SkedcProblem { instance, constraints }));
        SkedcStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn skedc_problem_free(problem: *mut SkedcProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Validates the problem and writes the violation count to `*count`.
/// Returns `InvalidProblem` if any were found; the last error lists them.
#[no_mangle]
pub unsafe extern "C" fn skedc_problem_validate(problem: *const SkedcProblem, count: *mut usize) -> SkedcStatus {
    guard(|| {
        let Some(p) = problem.as_ref() else { return fail(SkedcStatus::NullArgument, "problem is null") };
        let mut msgs: Vec<String> = validate_instance(&p.instance).iter().map(ToString::to_string).collect();
        if msgs.is_empty() {
            msgs.extend(validate_constraints(&p.instance, &p.constraints).iter().map(ToString::to_string));
        }
        if !count.is_null() {
            *count = msgs.len();
        }
        if msgs.is_empty() {
            SkedcStatus::Ok
        } else {
            fail(SkedcStatus::InvalidProblem, msgs.join("\n"))
        }
    })
}

unsafe fn build_with(
    problem: *const SkedcProblem,
    out: *mut *mut c_char,
    render: impl FnOnce(&SkedcProblem) -> Result<String, SkedcStatus>,
) -> SkedcStatus {
    guard(|| {
        let Some(p) = problem.as_ref() else { return fail(SkedcStatus::NullArgument, "problem is null") };
        if out.is_null() {
            return fail(SkedcStatus::NullArgument, "out is null");
        }
        let mut count = 0;
        let st = skedc_problem_validate(problem, &mut count);
        if st != SkedcStatus::Ok {
            return st;
        }
        match render(p) {
            Ok(s) => put_string(out, s),
            Err(st) => st,
        }
    })
}

/// LP-format text of the model.
#[no_mangle]
pub unsafe extern "C" fn skedc_problem_build_lp(problem: *const SkedcProblem, out: *mut *mut c_char) -> SkedcStatus {
    build_with(problem, out, |p| {
        write_lp(&build_model(&p.instance, &p.constraints)).map_err(|e| fail(SkedcStatus::Unrepresentable, e.to_string()))
    })
}

/// JSON dump of the model.
#[no_mangle]
pub unsafe extern "C" fn skedc_problem_build_json(problem: *const SkedcProblem, out: *mut *mut c_char) -> SkedcStatus {
    build_with(problem, out, |p| Ok(write_json(&build_model(&p.instance, &p.constraints))))
}

/// Solves by branch-and-bound. A negative `time_limit_secs` means no limit;
/// `workers` 0 is treated as 1.
#[no_mangle]
pub unsafe extern "C" fn skedc_problem_solve(
    problem: *const SkedcProblem,
    time_limit_secs: f64,
    workers: u32,
    out: *mut *mut SkedcReport,
) -> SkedcStatus {
    guard(|| {
        let Some(p) = problem.as_ref() else { return fail(SkedcStatus::NullArgument, "problem is null") };
        if out.is_null() {
            return fail(SkedcStatus::NullArgument, "out is null");
        }
        let mut count = 0;
        let st = skedc_problem_validate(problem, &mut count);
        if st != SkedcStatus::Ok {
            return st;
        }
        if time_limit_secs.is_nan() {
            return fail(SkedcStatus::InvalidProblem, "time limit is NaN");
        }
        let options = SolveOptions {
            time_limit: (time_limit_secs >= 0.0).then(|| Duration::from_secs_f64(time_limit_secs.min(1e9))),
            node_limit: None,
            workers: workers.max(1) as usize,
            canonicalize: true,
        };
        let report = branch_and_bound(&p.instance, &p.constraints, &options);
        *out = Box::into_raw(Box::new(SkedcReport { report }));
        SkedcStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn skedc_report_free(report: *mut SkedcReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Solve status; `report` must not be NULL.
#[no_mangle]
pub unsafe extern "C" fn skedc_report_status(report: *const SkedcReport) -> SkedcSolveStatus {
    match (*report).report.status {
        SolveStatus::Optimal => SkedcSolveStatus::Optimal,
        SolveStatus::Feasible => SkedcSolveStatus::Feasible,
        SolveStatus::Infeasible => SkedcSolveStatus::Infeasible,
        SolveStatus::TimeLimit => SkedcSolveStatus::TimeLimit,
    }
}

/// Makespan as `num/den`; `NoSchedule` if the search found none.
#[no_mangle]
pub unsafe extern "C" fn skedc_report_makespan(report: *const SkedcReport, num: *mut i64, den: *mut i64) -> SkedcStatus {
    let Some(r) = report.as_ref() else { return fail(SkedcStatus::NullArgument, "report is null") };
    match r.report.makespan() {
        Some(t) => {
            put_ratio(t, num, den);
            SkedcStatus::Ok
        }
        None => fail(SkedcStatus::NoSchedule, "no schedule"),
    }
}

/// Proven lower bound as `num/den`.
#[no_mangle]
pub unsafe extern "C" fn skedc_report_lower_bound(report: *const SkedcReport, num: *mut i64, den: *mut i64) -> SkedcStatus {
    let Some(r) = report.as_ref() else { return fail(SkedcStatus::NullArgument, "report is null") };
    put_ratio(r.report.lower_bound, num, den);
    SkedcStatus::Ok
}

/// Search nodes explored; `report` must not be NULL.
#[no_mangle]
pub unsafe extern "C" fn skedc_report_nodes(report: *const SkedcReport) -> u64 {
    (*report).report.nodes
}

/// Schedule JSON of the best schedule.
#[no_mangle]
pub unsafe extern "C" fn skedc_report_schedule_json(report: *const SkedcReport, out: *mut *mut c_char) -> SkedcStatus {
    guard(|| {
        let Some(r) = report.as_ref() else { return fail(SkedcStatus::NullArgument, "report is null") };
        if out.is_null() {
            return fail(SkedcStatus::NullArgument, "out is null");
        }
        match &r.report.best {
            Some(s) => put_string(out, write_schedule(s)),
            None => fail(SkedcStatus::NoSchedule, "no schedule"),
        }
    })
}

/// Names of the constraints proving infeasibility, space separated; empty
/// when none were recorded.
#[no_mangle]
pub unsafe extern "C" fn skedc_report_witness(report: *const SkedcReport, out: *mut *mut c_char) -> SkedcStatus {
    let Some(r) = report.as_ref() else { return fail(SkedcStatus::NullArgument, "report is null") };
    if out.is_null() {
        return fail(SkedcStatus::NullArgument, "out is null");
    }
    put_string(out, r.report.witness.join(" "))
}

#[no_mangle]
pub unsafe extern "C" fn skedc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
