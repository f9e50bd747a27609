use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use paralab_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(paralab_last_error_message()) }.to_string_lossy().into_owned()
}

fn gallery(name: &str) -> *mut ParalabChart {
    let name = CString::new(name).unwrap();
    let mut chart = ptr::null_mut();
    let status = unsafe { paralab_chart_from_gallery(name.as_ptr(), &mut chart) };
    assert_eq!(status, ParalabStatus::Ok, "{}", last_error());
    chart
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { paralab_string_free(p) };
    s
}

#[test]
fn handle_lifecycle_and_queries() {
    let chart = gallery("ex5_1_timelike");
    let mut n = 0usize;
    let mut eps = 0i32;
    unsafe {
        assert_eq!(paralab_chart_dim(chart, &mut n), ParalabStatus::Ok);
        assert_eq!(paralab_chart_epsilon(chart, &mut eps), ParalabStatus::Ok);
    }
    assert_eq!((n, eps), (3, -1));

    let p = [0.1, -0.2, 0.3];
    let (e1, e2, e3) = ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]);
    let mut k = 0.0;
    unsafe {
        assert_eq!(paralab_sectional(chart, p.as_ptr(), e1.as_ptr(), e2.as_ptr(), 3, &mut k), ParalabStatus::Ok);
        assert!((k + 1.0).abs() < 1e-10, "K(d1,d2) = {k}");
        assert_eq!(paralab_sectional(chart, p.as_ptr(), e1.as_ptr(), e3.as_ptr(), 3, &mut k), ParalabStatus::Ok);
        assert!((k - 1.0).abs() < 1e-10, "K(d1,d3) = {k}");
    }

    let mut r = 1.0;
    unsafe { assert_eq!(paralab_axiom_residual(chart, p.as_ptr(), 3, &mut r), ParalabStatus::Ok) };
    assert!(r < 1e-12);

    let mut json = ptr::null_mut();
    unsafe { assert_eq!(paralab_classify_json(chart, 4, 7, 1e-8, &mut json), ParalabStatus::Ok) };
    let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    assert_eq!(v["chart"], "ex5_1_timelike");
    assert_eq!(v["samples"]["count"], 4);

    unsafe { assert_eq!(paralab_curvature_json(chart, p.as_ptr(), 3, &mut json), ParalabStatus::Ok) };
    let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    assert!((v["ricci_xi_xi"].as_f64().unwrap() + 2.0).abs() < 1e-10);

    unsafe { paralab_chart_free(chart) };
    unsafe { paralab_chart_free(ptr::null_mut()) };
}

#[test]
fn error_codes() {
    let mut chart = ptr::null_mut();
    let bogus = CString::new("nope").unwrap();
    unsafe {
        assert_eq!(paralab_chart_from_gallery(bogus.as_ptr(), &mut chart), ParalabStatus::UnknownChart);
        assert!(chart.is_null());
        assert!(last_error().contains("nope"));
        assert_eq!(paralab_chart_from_gallery(ptr::null(), &mut chart), ParalabStatus::NullPointer);
        assert_eq!(paralab_chart_from_manifest(bogus.as_ptr(), &mut chart), ParalabStatus::InvalidManifest);
        let bad = [0xffu8, 0];
        assert_eq!(paralab_chart_from_gallery(bad.as_ptr().cast(), &mut chart), ParalabStatus::InvalidUtf8);
        let mut n = 0usize;
        assert_eq!(paralab_chart_dim(ptr::null(), &mut n), ParalabStatus::NullPointer);
    }

    let chart = gallery("ex2_1_g1");
    let p = [0.0, 0.0];
    let mut r = 0.0;
    unsafe {
        assert_eq!(paralab_axiom_residual(chart, p.as_ptr(), 2, &mut r), ParalabStatus::InvalidArgument);
        let mut json = ptr::null_mut();
        assert_eq!(paralab_classify_json(chart, 0, 1, 1e-8, &mut json), ParalabStatus::InvalidArgument);
        assert!(json.is_null());
        // e1 + e2 is null for g1 = dx^2 - dy^2 + dz^2, so the plane (e1 + e2, e3) is degenerate
        let p = [0.0; 3];
        let (x, y) = ([1.0, 1.0, 0.0], [0.0, 0.0, 1.0]);
        assert_eq!(paralab_sectional(chart, p.as_ptr(), x.as_ptr(), y.as_ptr(), 3, &mut r), ParalabStatus::Degenerate);
        assert!(!last_error().is_empty());
        paralab_chart_free(chart);
    }
}

#[test]
fn manifest_handles() {
    let text = CString::new(
        r#"
version = 1
name = "flat"
epsilon = -1
coordinates = ["x", "y", "z"]
metric = [[1], [0, -1], [0, 0, 1]]
phi = [[0, 0, 1], [0, 0, 0], [1, 0, 0]]
xi = [0, 1, 0]
eta = [0, 1, 0]
"#,
    )
    .unwrap();
    let mut chart = ptr::null_mut();
    unsafe {
        assert_eq!(paralab_chart_from_manifest(text.as_ptr(), &mut chart), ParalabStatus::Ok, "{}", last_error());
        let p = [0.2, 0.1, -0.3];
        let mut r = 1.0;
        assert_eq!(paralab_axiom_residual(chart, p.as_ptr(), 3, &mut r), ParalabStatus::Ok);
        assert!(r < 1e-12);
        paralab_chart_free(chart);
    }
}

#[test]
fn gallery_names() {
    let mut s = ptr::null_mut();
    unsafe { assert_eq!(paralab_gallery_names(&mut s), ParalabStatus::Ok) };
    let names = take_string(s);
    assert_eq!(names.lines().count(), 12);
    assert!(names.lines().any(|l| l == "hyperbolic_ps"));
}

const C_SMOKE: &str = r#"
#include <stdio.h>
#include <string.h>
#include "paralab.h"

int main(void) {
    ParalabChart *chart = NULL;
    if (paralab_chart_from_gallery("ex5_1_spacelike", &chart) != PARALAB_STATUS_OK) return 10;
    size_t n = 0;
    if (paralab_chart_dim(chart, &n) != PARALAB_STATUS_OK || n != 3) return 11;
    double p[3] = {0.0, 0.0, 0.0}, x[3] = {1.0, 0.0, 0.0}, y[3] = {0.0, 1.0, 0.0}, k = 0.0;
    if (paralab_sectional(chart, p, x, y, 3, &k) != PARALAB_STATUS_OK) return 12;
    char *json = NULL;
    if (paralab_classify_json(chart, 2, 42, 1e-8, &json) != PARALAB_STATUS_OK) return 13;
    int has = strstr(json, "\"para_sasakian\"") != NULL;
    paralab_string_free(json);
    paralab_chart_free(chart);
    if (!has) return 14;
    if (paralab_chart_from_gallery("missing", &chart) != PARALAB_STATUS_UNKNOWN_CHART) return 15;
    if (strlen(paralab_last_error_message()) == 0) return 16;
    printf("%.12f\n", k);
    return 0;
}
"#;

#[test]
fn c_program_links_against_static_library() {
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    assert!(header_dir.join("paralab.h").exists(), "build script writes the header");
    // test binaries live in target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libparalab_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    std::fs::write(&src, C_SMOKE).unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&header_dir)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler runs");
    assert!(status.success(), "compiling the C smoke test failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "smoke exited with {:?}", out.status.code());
    let k: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!((k - 1.0).abs() < 1e-10);
}
