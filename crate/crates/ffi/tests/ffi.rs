use std::ffi::{c_char, c_int, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use qgroupoid_ffi::*;

fn fixture(name: &str) -> CString {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(format!("{name}.json"));
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(qg_last_error()) }.to_str().unwrap().to_string()
}

fn verify(json: &CStr, tol: f64) -> (QgStatus, *mut QgReport) {
    let mut out = ptr::null_mut();
    let s = unsafe { qg_verify_json(json.as_ptr(), tol, &mut out) };
    (s, out)
}

fn take_string(p: *mut c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { qg_string_free(p) };
    s
}

#[test]
fn passing_instance() {
    let (s, r) = verify(&fixture("s3"), 1e-9);
    assert_eq!(s, QgStatus::Ok);
    unsafe {
        assert_eq!(qg_report_pass(r), 1);
        assert!(qg_report_check_count(r) > 10);
        assert_eq!(qg_report_failed_count(r), 0);
        assert!(qg_report_max_residual(r) < 1e-12);
        let mut json = ptr::null_mut();
        assert_eq!(qg_report_to_json(r, &mut json), QgStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(v["summary"]["pass"], true);
        assert_eq!(v["kind"], "groupoid");
        qg_report_free(r);
    }
    assert_eq!(last_error(), "");
}

#[test]
fn failing_instance_is_not_an_error() {
    let (s, r) = verify(&fixture("pair3-corrupted"), 1e-9);
    assert_eq!(s, QgStatus::Ok);
    unsafe {
        assert_eq!(qg_report_pass(r), 0);
        assert!(qg_report_failed_count(r) > 0);
        assert!(qg_report_max_residual(r) > 1e-2);
        qg_report_free(r);
    }
}

#[test]
fn error_codes() {
    let (s, r) = verify(c"not json", 1e-9);
    assert_eq!(s, QgStatus::Parse);
    assert!(r.is_null());
    assert!(!last_error().is_empty());

    let (s, _) = verify(&fixture("z2"), -1.0);
    assert_eq!(s, QgStatus::BadParams);
    let (s, _) = verify(&fixture("z2"), f64::NAN);
    assert_eq!(s, QgStatus::BadParams);

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { qg_verify_json(ptr::null(), 1e-9, &mut out) }, QgStatus::NullPointer);
    assert_eq!(unsafe { qg_verify_json(c"{}".as_ptr(), 1e-9, ptr::null_mut()) }, QgStatus::NullPointer);

    let bad = [0xffu8, 0xfe, 0];
    let (s, _) = verify(CStr::from_bytes_with_nul(&bad).unwrap(), 1e-9);
    assert_eq!(s, QgStatus::InvalidUtf8);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { qg_report_to_json(ptr::null(), &mut json) }, QgStatus::NullPointer);
    assert!(json.is_null());
}

#[test]
fn null_handles_are_tolerated() {
    unsafe {
        assert_eq!(qg_report_pass(ptr::null()), -1);
        assert_eq!(qg_report_check_count(ptr::null()), 0);
        assert!(qg_report_max_residual(ptr::null()).is_nan());
        qg_report_free(ptr::null_mut());
        qg_string_free(ptr::null_mut());
    }
}

#[test]
fn selftest_through_ffi() {
    let run = |fault: Option<&CStr>| {
        let mut passed: c_int = -1;
        let mut out = ptr::null_mut();
        let s = unsafe { qg_selftest_json(4, 1e-9, fault.map_or(ptr::null(), |f| f.as_ptr()), &mut passed, &mut out) };
        (s, passed, if out.is_null() { String::new() } else { take_string(out) })
    };
    let (s, passed, a) = run(None);
    assert_eq!((s, passed), (QgStatus::Ok, 1));
    let (_, _, b) = run(None);
    assert_eq!(a, b);
    let (s, passed, _) = run(Some(c"random_action_2"));
    assert_eq!((s, passed), (QgStatus::Ok, 0));
    let (s, _, _) = run(Some(c"unknown"));
    assert_eq!(s, QgStatus::BadParams);
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(qg_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn lib_dir() -> PathBuf {
    // target/debug/deps/ffi-<hash> -> target/debug
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let Some(cc) = ["cc", "gcc", "clang"].into_iter().find(|c| Command::new(c).arg("--version").output().is_ok())
    else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let lib = lib_dir();
    if !lib.join("libqgroupoid_ffi.so").exists() {
        eprintln!("shared library not built at {}; skipping", lib.display());
        return;
    }
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new(cc)
        .arg(root.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(root.join("include"))
        .arg("-L")
        .arg(&lib)
        .arg("-lqgroupoid_ffi")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let fixtures = root.join("../core/fixtures");
    for (name, code) in [("z3", 0), ("z3-corrupted", 1)] {
        let o = Command::new(&exe)
            .arg(fixtures.join(format!("{name}.json")))
            .env("LD_LIBRARY_PATH", &lib)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(code), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
}
