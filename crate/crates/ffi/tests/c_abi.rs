use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use arcinterp_ffi::*;

fn c(re: f64, im: f64) -> AiComplex {
    AiComplex { re, im }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ai_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn named_arc(name: &str) -> *mut AiArc {
    let name = CString::new(name).unwrap();
    let mut arc = ptr::null_mut();
    assert_eq!(unsafe { ai_arc_from_text(name.as_ptr(), &mut arc) }, AiStatus::Ok);
    arc
}

fn function(arc: *const AiArc, name: &str) -> *mut AiFunction {
    let name = CString::new(name).unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { ai_function_builtin(arc, name.as_ptr(), &mut f) }, AiStatus::Ok);
    f
}

#[test]
fn divided_difference_of_exp_on_two_nodes() {
    let mut arc = ptr::null_mut();
    assert_eq!(unsafe { ai_arc_segment(c(0.0, 0.0), c(1.0, 0.0), &mut arc) }, AiStatus::Ok);
    let f = function(arc, "exp");
    let params = [0.0, 1.0];
    let mut out = c(0.0, 0.0);
    assert_eq!(unsafe { ai_divided_difference(f, params.as_ptr(), 2, &mut out) }, AiStatus::Ok);
    assert!((out.re - (std::f64::consts::E - 1.0)).abs() < 1e-15 && out.im == 0.0);
    unsafe {
        ai_function_free(f);
        ai_arc_free(arc);
    }
}

#[test]
fn interpolant_reproduces_nodes() {
    let arc = named_arc("ellipse-arc");
    let f = function(arc, "z3+conj");
    let params = [0.05, 0.3, 0.55, 0.9];
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { ai_interp_build(f, params.as_ptr(), params.len(), AiOrdering::Leja, &mut p) },
        AiStatus::Ok
    );
    for &t in &params {
        let mut z = c(0.0, 0.0);
        let mut pz = c(0.0, 0.0);
        assert_eq!(unsafe { ai_arc_point(arc, t, &mut z) }, AiStatus::Ok);
        assert_eq!(unsafe { ai_interp_eval(p, z, &mut pz) }, AiStatus::Ok);
        let zc = num_complex::Complex64::new(z.re, z.im);
        let fz = zc * zc * zc + zc.conj();
        assert!((pz.re - fz.re).abs() < 1e-12 && (pz.im - fz.im).abs() < 1e-12);
    }
    unsafe {
        ai_interp_free(p);
        ai_function_free(f);
        ai_arc_free(arc);
    }
}

#[test]
fn certificate_is_json() {
    let arc = named_arc("circle");
    let f = function(arc, "conj");
    let params: Vec<f64> = (0..5).map(|k| k as f64 / 5.0).collect();
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { ai_bound_certificate_json(f, params.as_ptr(), params.len(), 32, &mut s) },
        AiStatus::Ok
    );
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { ai_string_free(s) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["n"], 4);
    assert_eq!(v["holds"], true);
    unsafe {
        ai_function_free(f);
        ai_arc_free(arc);
    }
}

#[test]
fn pivot_and_sequence_entry_points() {
    let pts = [c(0.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)];
    let (mut i, mut j, mut v) = (9usize, 9usize, 0.0);
    assert_eq!(unsafe { ai_minimize_pivot_product(pts.as_ptr(), 3, &mut i, &mut j, &mut v) }, AiStatus::Ok);
    assert_eq!((i, j, v), (0, 2, 2.0));

    let l = [0.0; 4];
    let (mut ih, mut cf) = (0.0, 0.0);
    assert_eq!(unsafe { ai_lemma_sequence_bound(1.0, l.as_ptr(), 4, 5, &mut ih, &mut cf) }, AiStatus::Ok);
    assert!((ih - 1.0 / 120.0).abs() < 1e-16 && (cf - 1.0 / 120.0).abs() < 1e-16);
}

#[test]
fn errors_set_status_and_message() {
    let mut arc = ptr::null_mut();
    assert_eq!(unsafe { ai_arc_circle(c(0.0, 0.0), -1.0, &mut arc) }, AiStatus::DegenerateArc);
    assert!(arc.is_null());
    assert!(last_error().contains("radius"), "{}", last_error());

    let name = CString::new("spiral").unwrap();
    assert_eq!(unsafe { ai_arc_from_text(name.as_ptr(), &mut arc) }, AiStatus::InvalidArgument);
    assert_eq!(unsafe { ai_arc_from_text(ptr::null(), &mut arc) }, AiStatus::NullPointer);

    let seg = named_arc("segment");
    assert!(last_error().is_empty());
    let f = function(seg, "exp");
    let params = [0.2, 0.2, 0.7];
    let mut out = c(0.0, 0.0);
    assert_eq!(
        unsafe { ai_divided_difference(f, params.as_ptr(), 3, &mut out) },
        AiStatus::NodesTooClose
    );
    let two = [0.1, 0.9];
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { ai_bound_certificate_json(f, two.as_ptr(), 2, 16, &mut s) },
        AiStatus::NotApplicable
    );
    assert!(s.is_null());
    let (mut i, mut j, mut v) = (0usize, 0usize, 0.0);
    assert_eq!(
        unsafe { ai_minimize_pivot_product(ptr::null(), 3, &mut i, &mut j, &mut v) },
        AiStatus::NullPointer
    );
    unsafe {
        ai_function_free(f);
        ai_arc_free(seg);
        ai_arc_free(ptr::null_mut());
    }
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include").join("arcinterp.h")
}

#[test]
fn header_declares_the_api() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "ai_arc_from_text",
        "ai_function_builtin",
        "ai_divided_difference",
        "ai_interp_build",
        "ai_interp_eval",
        "ai_bound_certificate_json",
        "ai_string_free",
        "ai_minimize_pivot_product",
        "ai_lemma_sequence_bound",
        "ai_last_error_message",
        "typedef struct AiArc AiArc;",
        "AI_STATUS_NODES_TOO_CLOSE = 4",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "arcinterp.h"

int main(void) {
    AiArc *arc = NULL;
    if (ai_arc_from_text("circle", &arc) != AI_STATUS_OK) return 10;
    AiFunction *f = NULL;
    if (ai_function_builtin(arc, "conj", &f) != AI_STATUS_OK) return 11;
    double t[3] = {0.0, 0.25, 0.5};
    AiComplex d;
    if (ai_divided_difference(f, t, 3, &d) != AI_STATUS_OK) return 12;
    /* conj = 1/z on the unit circle: d_2 = 1/(z1 z2 z3) = 1/(1 * i * -1) = i */
    if (fabs(d.re) > 1e-14 || fabs(d.im - 1.0) > 1e-14) return 13;
    if (ai_divided_difference(f, t, 0, &d) != AI_STATUS_INVALID_ARGUMENT) return 14;
    if (ai_last_error_message()[0] == '\0') return 15;
    ai_function_free(f);
    ai_arc_free(arc);
    printf("ok\n");
    return 0;
}
"#;

fn static_lib() -> Option<PathBuf> {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().ok()?;
    let dir = exe.parent()?.parent()?;
    let lib = dir.join("libarcinterp_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_and_runs() {
    let Some(lib) = static_lib() else {
        eprintln!("static library not built; skipping link test");
        return;
    };
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping link test");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
