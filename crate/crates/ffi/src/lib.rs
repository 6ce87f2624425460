//! C ABI over the `qgroupoid` verifier.
//!
//! Every fallible call returns a [`QgStatus`]. On failure a message is kept in
//! thread-local storage and can be read with [`qg_last_error`]. Reports are
//! opaque handles released with [`qg_report_free`]; strings handed out by the
//! library are released with [`qg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qgroupoid::io::{parse_str, ReportFile};
use qgroupoid::{selftest, Error, VerificationReport};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    BadParams = 4,
    Internal = 5,
}

/// Result of verifying one instance.
pub struct QgReport {
    file: ReportFile,
    report: VerificationReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: QgStatus, msg: impl Into<String>) -> QgStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> QgStatus {
    match e {
        Error::Parse(_) | Error::InvalidGroupoid(_) => QgStatus::Parse,
        Error::Io(_) => QgStatus::Internal,
        _ => QgStatus::BadParams,
    }
}

fn guarded(f: impl FnOnce() -> QgStatus) -> QgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == QgStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(QgStatus::Internal, "internal panic"),
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, QgStatus> {
    if s.is_null() {
        return Err(fail(QgStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(QgStatus::InvalidUtf8, "argument is not UTF-8"))
}

fn hand_out(s: String, out: *mut *mut c_char) -> QgStatus {
    match CString::new(s) {
        Ok(c) => {
            // SAFETY: callers check `out` for null before reaching here.
            unsafe { *out = c.into_raw() };
            QgStatus::Ok
        }
        Err(_) => fail(QgStatus::Internal, "output contains an interior NUL"),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or an empty string.
///
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn qg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses an instance document and verifies it at tolerance `tol`.
///
/// A failing check is not an error: the call returns `QG_STATUS_OK` and the
/// report says whether the instance passed.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer to
/// writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qg_verify_json(json: *const c_char, tol: f64, out: *mut *mut QgReport) -> QgStatus {
    guarded(|| {
        if out.is_null() {
            return fail(QgStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        if !(tol.is_finite() && tol > 0.0) {
            return fail(QgStatus::BadParams, format!("tolerance must be positive, got {tol}"));
        }
        let inst = match parse_str(text) {
            Ok(i) => i,
            Err(e) => return fail(status_of(&e), e.to_string()),
        };
        let report = inst.verify(tol);
        let file = ReportFile::new("<memory>", inst.kind(), &report);
        *out = Box::into_raw(Box::new(QgReport { file, report }));
        QgStatus::Ok
    })
}

/// 1 if every check passed, 0 if some check failed, -1 for a null handle.
///
/// # Safety
/// `report` must be null or a handle from [`qg_verify_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qg_report_pass(report: *const QgReport) -> c_int {
    match report.as_ref() {
        Some(r) => c_int::from(r.report.pass()),
        None => -1,
    }
}

/// Number of checks in the report, or 0 for a null handle.
///
/// # Safety
/// As for [`qg_report_pass`].
#[no_mangle]
pub unsafe extern "C" fn qg_report_check_count(report: *const QgReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.checks.len())
}

/// Number of failed checks, or 0 for a null handle.
///
/// # Safety
/// As for [`qg_report_pass`].
#[no_mangle]
pub unsafe extern "C" fn qg_report_failed_count(report: *const QgReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.failing().count())
}

/// Largest relative residual over all checks, or NaN for a null handle.
///
/// # Safety
/// As for [`qg_report_pass`].
#[no_mangle]
pub unsafe extern "C" fn qg_report_max_residual(report: *const QgReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.report.max_residual())
}

/// Writes the report as JSON into a new string owned by the caller.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer. Release the
/// string with [`qg_string_free`].
#[no_mangle]
pub unsafe extern "C" fn qg_report_to_json(report: *const QgReport, out: *mut *mut c_char) -> QgStatus {
    guarded(|| {
        if out.is_null() {
            return fail(QgStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let Some(r) = report.as_ref() else {
            return fail(QgStatus::NullPointer, "null report handle");
        };
        match serde_json::to_string_pretty(&r.file) {
            Ok(s) => hand_out(s, out),
            Err(e) => fail(QgStatus::Internal, e.to_string()),
        }
    })
}

/// Runs the seeded self-test suite and returns its JSON report.
///
/// `inject_fault` may be null; otherwise it names a case to corrupt.
/// `*passed` receives 1 if the suite met every expectation.
///
/// # Safety
/// `inject_fault` must be null or NUL-terminated; `out` and `passed` must be
/// valid pointers. Release the string with [`qg_string_free`].
#[no_mangle]
pub unsafe extern "C" fn qg_selftest_json(
    seed: u64,
    tol: f64,
    inject_fault: *const c_char,
    passed: *mut c_int,
    out: *mut *mut c_char,
) -> QgStatus {
    guarded(|| {
        if out.is_null() || passed.is_null() {
            return fail(QgStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let fault = if inject_fault.is_null() {
            None
        } else {
            match read_str(inject_fault) {
                Ok(s) => Some(s),
                Err(s) => return s,
            }
        };
        if !(tol.is_finite() && tol > 0.0) {
            return fail(QgStatus::BadParams, format!("tolerance must be positive, got {tol}"));
        }
        match selftest::run(seed, tol, fault) {
            Ok(r) => {
                *passed = c_int::from(r.pass);
                match serde_json::to_string_pretty(&r) {
                    Ok(s) => hand_out(s, out),
                    Err(e) => fail(QgStatus::Internal, e.to_string()),
                }
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Releases a report handle. Null is ignored.
///
/// # Safety
/// `report` must be null or a live handle; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qg_report_free(report: *mut QgReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
