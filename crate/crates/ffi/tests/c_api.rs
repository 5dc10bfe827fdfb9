use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use ringopt_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = ringopt_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_string_lossy().into_owned();
    ringopt_string_free(s);
    out
}

fn quartic() -> *mut RingoptPolynomial {
    let mut p = ptr::null_mut();
    let status = unsafe {
        ringopt_polynomial_parse(
            c("A0 + A1*x + A2*x^2 + A3*x^3 + A4*x^4").as_ptr(),
            c("x").as_ptr(),
            &mut p,
        )
    };
    assert_eq!(status, RingoptStatus::Ok);
    p
}

fn plan(p: *const RingoptPolynomial, scheme: &str) -> *mut RingoptPlan {
    let mut plan = ptr::null_mut();
    assert_eq!(
        unsafe { ringopt_plan_build(p, c(scheme).as_ptr(), false, &mut plan) },
        RingoptStatus::Ok
    );
    plan
}

#[test]
fn status_values_match_library_codes() {
    use ringopt::Error;
    let samples = [
        Error::MalformedRingProp {
            offset: 0,
            reason: String::new(),
        },
        Error::UnsupportedCarrier { carrier: String::new() },
        Error::InvalidRing { reason: String::new() },
        Error::Syntax {
            offset: 0,
            message: String::new(),
        },
        Error::NonPolynomial {
            offset: 0,
            reason: String::new(),
        },
        Error::VariableInExponent { offset: 0 },
        Error::EmptyExpression,
        Error::Multivariate { name: String::new() },
        Error::DegreeTooLarge { degree: 0, max: 0 },
        Error::OrphanPragma {
            offset: 0,
            reason: String::new(),
        },
        Error::DuplicatePragma {
            offset: 0,
            kind: String::new(),
        },
        Error::UnbalancedBraces { offset: 0 },
        Error::VariableSelection {
            function: String::new(),
            reason: String::new(),
        },
        Error::InvalidDag { reason: String::new() },
        Error::UnboundName { name: String::new() },
        Error::DomainTooLarge { points: 0, cap: 0 },
        Error::UnsupportedWidth { bits: 0 },
        Error::SignatureMismatch { reason: String::new() },
        Error::NoAnnotatedFunctions,
        Error::UnsupportedDegree { degree: 0, max: 0 },
        Error::EmptySchemeList,
        Error::InvalidIterations,
        Error::UnknownScheme { name: String::new() },
    ];
    for e in &samples {
        assert_eq!(RingoptStatus::from(e) as i32, e.code(), "{e:?}");
    }
}

#[test]
fn parse_cost_and_free() {
    let p = quartic();
    let mut degree = 0;
    assert_eq!(unsafe { ringopt_polynomial_degree(p, &mut degree) }, RingoptStatus::Ok);
    assert_eq!(degree, 4);
    let mut coefficient = ptr::null_mut();
    assert_eq!(
        unsafe { ringopt_polynomial_coefficient(p, 3, &mut coefficient) },
        RingoptStatus::Ok
    );
    assert_eq!(unsafe { take(coefficient) }, "A3");
    assert_eq!(
        unsafe { ringopt_polynomial_coefficient(p, 9, &mut coefficient) },
        RingoptStatus::DegreeTooLarge
    );

    for (scheme, adds, muls, path) in [
        ("naive", 4, 10, 8),
        ("incremental", 4, 7, 5),
        ("horner", 4, 4, 8),
        ("llvm-f0", 4, 6, 6),
    ] {
        let plan = plan(p, scheme);
        let mut cost = RingoptCost::default();
        assert_eq!(unsafe { ringopt_plan_cost(plan, &mut cost) }, RingoptStatus::Ok);
        assert_eq!(
            (cost.adds, cost.muls, cost.critical_path, cost.total_ops),
            (adds, muls, path, adds + muls),
            "{scheme}"
        );
        unsafe { ringopt_plan_free(plan) };
    }
    unsafe { ringopt_polynomial_free(p) };
}

#[test]
fn evaluation_and_verification() {
    let p = quartic();
    let horner = plan(p, "horner");
    let names: Vec<CString> = (0..5).map(|i| c(&format!("A{i}"))).collect();
    let name_ptrs: Vec<*const c_char> = names.iter().map(|n| n.as_ptr()).collect();
    let values = [0u64, 0, 0, 0, 1];
    let mut out = 7;
    // 4^4 = 256 wraps to 0 in 8 bits
    let status = unsafe { ringopt_plan_eval(horner, 8, 4, name_ptrs.as_ptr(), values.as_ptr(), 5, &mut out) };
    assert_eq!(status, RingoptStatus::Ok);
    assert_eq!(out, 0);
    let status = unsafe { ringopt_plan_eval(horner, 16, 4, name_ptrs.as_ptr(), values.as_ptr(), 5, &mut out) };
    assert_eq!(status, RingoptStatus::Ok);
    assert_eq!(out, 256);
    let status = unsafe { ringopt_plan_eval(horner, 8, 4, name_ptrs.as_ptr(), values.as_ptr(), 2, &mut out) };
    assert_eq!(status, RingoptStatus::UnboundName);
    assert!(last_error().contains("no value bound"));

    let mut v = RingoptVerification::default();
    assert_eq!(
        unsafe { ringopt_plan_verify(horner, 8, 0, 32, 1, &mut v) },
        RingoptStatus::Ok
    );
    assert!(v.passed);
    assert_eq!(v.points_checked, 256 * 32);
    assert_eq!(
        unsafe { ringopt_plan_verify(horner, 32, 0, 32, 1, &mut v) },
        RingoptStatus::DomainTooLarge
    );
    assert_eq!(
        unsafe { ringopt_plan_verify(horner, 64, 1000, 0, 1, &mut v) },
        RingoptStatus::Ok
    );
    assert!(v.passed);
    assert_eq!(
        unsafe { ringopt_plan_verify(horner, 12, 10, 0, 1, &mut v) },
        RingoptStatus::UnsupportedWidth
    );
    unsafe {
        ringopt_plan_free(horner);
        ringopt_polynomial_free(p);
    }
}

#[test]
fn text_outputs() {
    let p = quartic();
    let inc = plan(p, "incremental");
    let mut s = ptr::null_mut();
    let status = unsafe {
        ringopt_plan_emit_c(
            inc,
            c("int").as_ptr(),
            c("polyCalc").as_ptr(),
            c("int").as_ptr(),
            &mut s,
        )
    };
    assert_eq!(status, RingoptStatus::Ok);
    let text = unsafe { take(s) };
    assert!(text.starts_with("int polyCalc(int x) {\n  int res, _x;\n"), "{text}");
    unsafe {
        ringopt_plan_free(inc);
        ringopt_polynomial_free(p);
    }

    let src = c(
        "#pragma ring_prop (+, 0, -, *, 1) int\n#pragma math_exp (A0 + A1*x + A2*x^2)\nint f(int x) { return 0; }\n",
    );
    assert_eq!(
        unsafe { ringopt_transform_source(src.as_ptr(), c("horner").as_ptr(), false, &mut s) },
        RingoptStatus::Ok
    );
    assert!(unsafe { take(s) }.contains("res = (A2*x + A1)*x + A0;"));
    assert_eq!(
        unsafe { ringopt_transform_source(src.as_ptr(), c("fast").as_ptr(), false, &mut s) },
        RingoptStatus::UnknownScheme
    );

    assert_eq!(
        unsafe { ringopt_analyze_json(src.as_ptr(), ptr::null(), false, &mut s) },
        RingoptStatus::Ok
    );
    let doc: serde_json::Value = serde_json::from_str(&unsafe { take(s) }).unwrap();
    assert_eq!(doc["functions"][0]["polynomial"]["degree"], 2);
    assert_eq!(doc["input"], "<memory>");

    assert_eq!(
        unsafe { ringopt_emit_benchmark(4, c("naive,horner").as_ptr(), 128, 32, 0, &mut s) },
        RingoptStatus::Ok
    );
    let bench = unsafe { take(s) };
    assert!(bench.contains("poly_horner") && !bench.contains("poly_balanced"));
    assert_eq!(
        unsafe { ringopt_emit_benchmark(4, c("").as_ptr(), 128, 32, 0, &mut s) },
        RingoptStatus::EmptySchemeList
    );
    assert_eq!(
        unsafe { ringopt_emit_benchmark(99, c("naive").as_ptr(), 128, 32, 0, &mut s) },
        RingoptStatus::UnsupportedDegree
    );
}

#[test]
fn bad_arguments_are_reported() {
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { ringopt_polynomial_parse(ptr::null(), c("x").as_ptr(), &mut p) },
        RingoptStatus::NullArgument
    );
    assert!(last_error().contains("expression"));
    assert_eq!(
        unsafe { ringopt_polynomial_parse(c("A0/x").as_ptr(), c("x").as_ptr(), &mut p) },
        RingoptStatus::NonPolynomial
    );
    assert_eq!(
        unsafe { ringopt_polynomial_parse(c("x^x").as_ptr(), c("x").as_ptr(), &mut p) },
        RingoptStatus::VariableInExponent
    );
    let bad = [0xffu8, 0];
    assert_eq!(
        unsafe { ringopt_polynomial_parse(bad.as_ptr().cast(), c("x").as_ptr(), &mut p) },
        RingoptStatus::InvalidUtf8
    );
    let ok = quartic();
    assert!(ringopt_last_error_message().is_null());
    let mut plan = ptr::null_mut();
    assert_eq!(
        unsafe { ringopt_plan_build(ok, c("estrin").as_ptr(), false, &mut plan) },
        RingoptStatus::UnknownScheme
    );
    assert_eq!(unsafe { ringopt_plan_degree_check(ok) }, 4);
    unsafe {
        ringopt_polynomial_free(ok);
        ringopt_polynomial_free(ptr::null_mut());
        ringopt_plan_free(ptr::null_mut());
        ringopt_string_free(ptr::null_mut());
    }
    assert_eq!(
        unsafe { CStr::from_ptr(ringopt_version()) }.to_str().unwrap(),
        env!("CARGO_PKG_VERSION")
    );
}

unsafe fn ringopt_plan_degree_check(p: *const RingoptPolynomial) -> usize {
    let mut d = 0;
    assert_eq!(ringopt_polynomial_degree(p, &mut d), RingoptStatus::Ok);
    d
}

fn compiler() -> Option<&'static str> {
    ["cc", "gcc", "clang"].into_iter().find(|c| {
        Command::new(c)
            .arg("--version")
            .output()
            .is_ok_and(|o| o.status.success())
    })
}

fn include_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include")
}

const C_CLIENT: &str = r#"#include <stdio.h>
#include <string.h>
#include "ringopt.h"

int main(void)
{
  RingoptPolynomial *p = NULL;
  RingoptPlan *plan = NULL;
  RingoptCost cost;
  RingoptVerification v;
  char *body = NULL;

  if (ringopt_polynomial_parse("A0 + A1*x + A2*x^2 + A3*x^3 + A4*x^4", "x", &p) != RINGOPT_STATUS_OK) return 1;
  if (ringopt_plan_build(p, "horner", false, &plan) != RINGOPT_STATUS_OK) return 2;
  if (ringopt_plan_cost(plan, &cost) != RINGOPT_STATUS_OK) return 3;
  if (ringopt_plan_verify(plan, 8, 0, 4, 0, &v) != RINGOPT_STATUS_OK || !v.passed) return 4;
  if (ringopt_plan_emit_c(plan, "int", "polyCalc", "int", &body) != RINGOPT_STATUS_OK) return 5;
  printf("%zu %zu %zu\n", cost.adds, cost.muls, cost.critical_path);
  printf("%s", body);
  ringopt_string_free(body);
  ringopt_plan_free(plan);
  if (ringopt_plan_build(p, "estrin", false, &plan) != RINGOPT_STATUS_UNKNOWN_SCHEME) return 6;
  if (strstr(ringopt_last_error_message(), "estrin") == NULL) return 7;
  ringopt_polynomial_free(p);
  return 0;
}
"#;

#[test]
fn header_compiles_as_c99() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler found; header not checked");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    std::fs::write(&src, C_CLIENT).unwrap();
    let out = Command::new(cc)
        .args([
            "-std=c99",
            "-Wall",
            "-Wextra",
            "-pedantic",
            "-Werror",
            "-fsyntax-only",
            "-I",
        ])
        .arg(include_dir())
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

/// `target/<profile>` of the running test binary.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_client_links_against_the_static_library() {
    let Some(cc) = compiler() else { return };
    let lib = profile_dir().join("libringopt_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; link test skipped", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    let exe = dir.path().join("client");
    std::fs::write(&src, C_CLIENT).unwrap();
    let out = Command::new(cc)
        .args(["-std=c99", "-I"])
        .arg(include_dir())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert!(stdout.starts_with("4 4 8\nint polyCalc(int x) {"), "{stdout}");
    assert!(stdout.contains("(((A4*x + A3)*x + A2)*x + A1)*x + A0"));
}
