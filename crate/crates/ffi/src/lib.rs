//! C ABI over the vbrep problem runner.
//!
//! Handles are opaque and owned by the caller; free each with its
//! matching `*_free`. Functions return a [`VbrepStatus`] and write results
//! through out-pointers. On failure the message is available from
//! [`vbrep_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use vbrep::cli::{fixture, parse_problem, run_tasks, ProblemFile, RunReport};
use vbrep::suites::run_suite;
use vbrep::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VbrepStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    UnknownFixture = 4,
    UnknownTask = 5,
    Invalid = 6,
    Panic = 7,
}

/// A parsed problem file.
pub struct VbrepProblem(ProblemFile);

/// The outcome of running a problem's tasks.
pub struct VbrepReport(RunReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: VbrepStatus, msg: impl Into<String>) -> VbrepStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> VbrepStatus) -> VbrepStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(VbrepStatus::Panic, "internal panic"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, VbrepStatus> {
    if p.is_null() {
        return Err(fail(VbrepStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(VbrepStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn boxed<T>(out: *mut *mut T, v: T) {
    unsafe { *out = Box::into_raw(Box::new(v)) };
}

/// Message of the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn vbrep_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn vbrep_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a problem file. On a parse error `line` and `column` (either
/// may be null) receive the 1-based location.
///
/// # Safety
/// `source` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vbrep_problem_parse(source: *const c_char, out: *mut *mut VbrepProblem, line: *mut usize, column: *mut usize) -> VbrepStatus {
    guard(|| {
        if out.is_null() {
            return fail(VbrepStatus::NullArgument, "out is null");
        }
        let src = match text(source, "source") {
            Ok(s) => s,
            Err(s) => return s,
        };
        match parse_problem(src) {
            Ok(p) => {
                boxed(out, VbrepProblem(p));
                VbrepStatus::Ok
            }
            Err(e) => {
                if let Error::Parse { line: l, column: c, .. } = &e {
                    if !line.is_null() {
                        *line = *l;
                    }
                    if !column.is_null() {
                        *column = *c;
                    }
                }
                fail(VbrepStatus::Parse, e.to_string())
            }
        }
    })
}

/// Loads a builtin fixture by name.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vbrep_problem_fixture(name: *const c_char, out: *mut *mut VbrepProblem) -> VbrepStatus {
    guard(|| {
        if out.is_null() {
            return fail(VbrepStatus::NullArgument, "out is null");
        }
        let name = match text(name, "name") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let Some(f) = fixture(name) else {
            return fail(VbrepStatus::UnknownFixture, format!("no fixture named '{name}'"));
        };
        match parse_problem(f.text) {
            Ok(p) => {
                boxed(out, VbrepProblem(p));
                VbrepStatus::Ok
            }
            Err(e) => fail(VbrepStatus::Parse, e.to_string()),
        }
    })
}

/// Number of tasks, or 0 for a null handle.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vbrep_problem_task_count(problem: *const VbrepProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.0.tasks.len())
}

/// # Safety
/// `problem` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vbrep_problem_free(problem: *mut VbrepProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Runs every task, or only the one named `task` when it is non-null.
///
/// # Safety
/// `problem` must be a live handle, `task` null or NUL-terminated, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn vbrep_run(problem: *const VbrepProblem, seed: u64, task: *const c_char, out: *mut *mut VbrepReport) -> VbrepStatus {
    guard(|| {
        let Some(p) = problem.as_ref() else {
            return fail(VbrepStatus::NullArgument, "problem is null");
        };
        if out.is_null() {
            return fail(VbrepStatus::NullArgument, "out is null");
        }
        let only = if task.is_null() {
            None
        } else {
            match text(task, "task") {
                Ok(t) => Some(t),
                Err(s) => return s,
            }
        };
        if let Some(t) = only {
            if !p.0.tasks.iter().any(|x| x.name == t) {
                return fail(VbrepStatus::UnknownTask, format!("no task named '{t}'"));
            }
        }
        boxed(out, VbrepReport(run_tasks(&p.0, seed, only)));
        VbrepStatus::Ok
    })
}

/// True when every task matched its expectation.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vbrep_report_passed(report: *const VbrepReport) -> bool {
    report.as_ref().is_some_and(|r| r.0.passed())
}

/// CLI-style exit code: 0 all pass, 1 some failure, 2 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vbrep_report_exit_code(report: *const VbrepReport) -> i32 {
    report.as_ref().map_or(2, |r| r.0.exit_code())
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vbrep_report_task_count(report: *const VbrepReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.tasks.len())
}

/// JSON-lines report. Free with [`vbrep_string_free`].
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vbrep_report_json(report: *const VbrepReport) -> *mut c_char {
    report
        .as_ref()
        .map_or(ptr::null_mut(), |r| CString::new(r.0.json_lines()).unwrap_or_default().into_raw())
}

/// Human-readable report. Free with [`vbrep_string_free`].
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vbrep_report_human(report: *const VbrepReport) -> *mut c_char {
    report
        .as_ref()
        .map_or(ptr::null_mut(), |r| CString::new(r.0.human()).unwrap_or_default().into_raw())
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vbrep_report_free(report: *mut VbrepReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vbrep_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs a randomized suite. `violations` receives the number of
/// instances on which the two computations disagreed.
///
/// # Safety
/// `name` must be NUL-terminated; the out-pointers null or writable.
#[no_mangle]
pub unsafe extern "C" fn vbrep_run_suite(name: *const c_char, seed: u64, count: usize, instances: *mut usize, violations: *mut usize) -> VbrepStatus {
    guard(|| {
        let name = match text(name, "name") {
            Ok(s) => s,
            Err(s) => return s,
        };
        match run_suite(name, seed, count) {
            Ok(o) => {
                if !instances.is_null() {
                    *instances = o.instances;
                }
                if !violations.is_null() {
                    *violations = o.violations.len();
                }
                VbrepStatus::Ok
            }
            Err(e) => fail(VbrepStatus::Invalid, e.to_string()),
        }
    })
}
