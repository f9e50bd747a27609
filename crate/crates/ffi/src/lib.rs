//! C interface to paralab.
//!
//! Charts are opaque `ParalabChart` handles created by
//! `paralab_chart_from_gallery` / `paralab_chart_from_manifest` and released
//! with `paralab_chart_free`. Every function returns a `ParalabStatus`;
//! on failure `paralab_last_error_message` describes the error for the
//! calling thread. Strings handed out by the library are NUL-terminated
//! UTF-8 and must be released with `paralab_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use paralab::charts::{axiom_report, StructuredChart};
use paralab::classify::classify_chart;
use paralab::curvature::CurvatureFrame;
use paralab::levi_civita::Geometry;
use paralab::{cli, gallery, json, manifest, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParalabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    UnknownChart = 3,
    InvalidManifest = 4,
    InvalidArgument = 5,
    Degenerate = 6,
    Panic = 7,
}

/// Opaque chart handle.
pub struct ParalabChart {
    chart: StructuredChart,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(ParalabStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::UnknownChart(_) => ParalabStatus::UnknownChart,
            Error::Manifest { .. } | Error::InvalidChart(_) => ParalabStatus::InvalidManifest,
            e if e.is_degeneracy() => ParalabStatus::Degenerate,
            _ => ParalabStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ParalabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            ParalabStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("internal panic: {what}"));
            ParalabStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(ParalabStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(ParalabStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn chart_ref<'a>(chart: *const ParalabChart) -> Result<&'a ParalabChart, Failure> {
    chart.as_ref().ok_or_else(|| null("chart"))
}

unsafe fn read_point<'a>(chart: &ParalabChart, p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    let n = chart.chart.dim();
    if len != n {
        return Err(Failure(
            ParalabStatus::InvalidArgument,
            format!("{what} has {len} entries, chart dimension is {n}"),
        ));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(ParalabStatus::InvalidArgument, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn new_chart(out: *mut *mut ParalabChart, chart: ParalabChart) {
    *out = Box::into_raw(Box::new(chart));
}

/// Looks up a built-in chart by name.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn paralab_chart_from_gallery(name: *const c_char, out: *mut *mut ParalabChart) -> ParalabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let name = read_str(name, "name")?;
        let e = gallery::get_chart(name)?;
        new_chart(out, ParalabChart { chart: e.chart });
        Ok(())
    })
}

/// Builds a chart from manifest text (TOML).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn paralab_chart_from_manifest(text: *const c_char, out: *mut *mut ParalabChart) -> ParalabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let text = read_str(text, "text")?;
        let m = manifest::load_manifest(text)?;
        new_chart(out, ParalabChart { chart: m.chart });
        Ok(())
    })
}

/// Releases a chart. Null is ignored.
///
/// # Safety
/// `chart` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn paralab_chart_free(chart: *mut ParalabChart) {
    if !chart.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(chart))));
    }
}

/// # Safety
/// `chart` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn paralab_chart_dim(chart: *const ParalabChart, out: *mut usize) -> ParalabStatus {
    guard(|| {
        let c = chart_ref(chart)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = c.chart.dim();
        Ok(())
    })
}

/// Writes +1 or -1.
///
/// # Safety
/// `chart` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn paralab_chart_epsilon(chart: *const ParalabChart, out: *mut i32) -> ParalabStatus {
    guard(|| {
        let c = chart_ref(chart)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = c.chart.epsilon().sign();
        Ok(())
    })
}

/// Full classification report as JSON (same document as `classify --json`).
///
/// # Safety
/// `chart` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn paralab_classify_json(
    chart: *const ParalabChart,
    count: usize,
    seed: u64,
    tol: f64,
    out_json: *mut *mut c_char,
) -> ParalabStatus {
    guard(|| {
        let c = chart_ref(chart)?;
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        *out_json = ptr::null_mut();
        if count == 0 || !(tol > 0.0) || !tol.is_finite() {
            return Err(Failure(
                ParalabStatus::InvalidArgument,
                "count must be positive and tol a positive finite number".into(),
            ));
        }
        let report = classify_chart(&c.chart, count, seed, tol)?;
        write_string(out_json, json::to_stable_json(&report))
    })
}

/// Christoffel symbols, curvature, Ricci and sectional curvatures at a point
/// as JSON (same document as `curvature --json`).
///
/// # Safety
/// `point` must hold `len` doubles; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn paralab_curvature_json(
    chart: *const ParalabChart,
    point: *const f64,
    len: usize,
    out_json: *mut *mut c_char,
) -> ParalabStatus {
    guard(|| {
        let c = chart_ref(chart)?;
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        *out_json = ptr::null_mut();
        let p = read_point(c, point, len, "point")?;
        write_string(out_json, cli::curvature_json(&c.chart, p)?)
    })
}

/// Sectional curvature of the plane spanned by `x` and `y` at `point`.
/// Returns `PARALAB_STATUS_DEGENERATE` for a degenerate plane.
///
/// # Safety
/// `point`, `x`, `y` must each hold `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn paralab_sectional(
    chart: *const ParalabChart,
    point: *const f64,
    x: *const f64,
    y: *const f64,
    len: usize,
    out: *mut f64,
) -> ParalabStatus {
    guard(|| {
        let c = chart_ref(chart)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let p = read_point(c, point, len, "point")?;
        let x = read_point(c, x, len, "x")?;
        let y = read_point(c, y, len, "y")?;
        let geo = Geometry::at(&c.chart, p)?;
        *out = CurvatureFrame::from_geometry(&geo).sectional(x, y)?;
        Ok(())
    })
}

/// Largest normalized residual of the almost paracontact metric axioms at
/// `point`; 1 or more when rank, index or ker η nondegeneracy fails.
///
/// # Safety
/// `point` must hold `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn paralab_axiom_residual(
    chart: *const ParalabChart,
    point: *const f64,
    len: usize,
    out: *mut f64,
) -> ParalabStatus {
    guard(|| {
        let c = chart_ref(chart)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let p = read_point(c, point, len, "point")?;
        let report = axiom_report(&c.chart, p, 1e-9)?;
        *out = report.combined(c.chart.dim(), 1e-9);
        Ok(())
    })
}

/// Newline-separated gallery chart names.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn paralab_gallery_names(out: *mut *mut c_char) -> ParalabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        write_string(out, gallery::list_charts().join("\n"))
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn paralab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failing call on this thread, or "" after a success.
/// Valid until the next paralab call on the same thread.
#[no_mangle]
pub extern "C" fn paralab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}
