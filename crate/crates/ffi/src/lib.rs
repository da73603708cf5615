//! C ABI for walklab.
//!
//! Objects cross the boundary as opaque handles created by `wl_*_new` and
//! released by the matching `wl_*_free`. Every fallible call returns a
//! [`WlStatus`]; on failure a message is available from
//! [`wl_last_error_message`] until the next call on the same thread.
//! Strings returned through `char **` are owned by the caller and must be
//! released with [`wl_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use walklab::config::ExperimentConfig;
use walklab::error::Error;
use walklab::experiment::{parse_graph_spec, run_bias};
use walklab::graph::LabeledExpander;
use walklab::group::FiniteGroup;
use walklab::verify::{run_suite, ClaimId, SuiteConfig, VerificationReport};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed spec, config or argument.
    Config = 3,
    /// Requested object exceeds a size limit.
    TooLarge = 4,
    /// Structural precondition failed (biased labeling, not pseudo-Cayley, etc.).
    Precondition = 5,
    Numerical = 6,
    Io = 7,
    /// A Rust panic was caught at the boundary.
    Panic = 8,
}

/// A finite group.
pub struct WlGroup(Arc<FiniteGroup>);

/// A labeled expander graph.
pub struct WlGraph(LabeledExpander);

/// A verification report.
pub struct WlReport(VerificationReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> WlStatus {
    match e {
        Error::UnsupportedFamily(_)
        | Error::InvalidGenerators(_)
        | Error::InvalidArgument(_)
        | Error::Config(_)
        | Error::Dimension(_)
        | Error::Json(_) => WlStatus::Config,
        Error::OrderOverflow(_) | Error::GraphTooLarge(_) | Error::TooLarge(_) => WlStatus::TooLarge,
        Error::InvalidTable(_)
        | Error::NoIrrepConstructor(_)
        | Error::TrivialGroup
        | Error::Asymmetric(_)
        | Error::Biased(_)
        | Error::NotPseudoCayley { .. }
        | Error::NoExactPath(_) => WlStatus::Precondition,
        Error::Numerical(_) | Error::Rounding { .. } => WlStatus::Numerical,
        Error::Io(_) => WlStatus::Io,
    }
}

/// Runs `f`, converting errors and panics into a status and a message.
fn guard(f: impl FnOnce() -> Result<(), (WlStatus, String)>) -> WlStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WlStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            WlStatus::Panic
        }
    }
}

fn lib(e: Error) -> (WlStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (WlStatus, String) {
    (WlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (WlStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (WlStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, v: T, what: &str) -> Result<(), (WlStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("interior nul removed").into_raw()
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next walklab call on the same thread.
#[no_mangle]
pub extern "C" fn wl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn wl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn wl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a group from a spec such as `symmetric(3)`.
#[no_mangle]
pub unsafe extern "C" fn wl_group_new(spec: *const c_char, out: *mut *mut WlGroup) -> WlStatus {
    guard(|| {
        let spec = read_str(spec, "spec")?;
        let g = FiniteGroup::parse(spec).map_err(lib)?;
        write_out(out, Box::into_raw(Box::new(WlGroup(Arc::new(g)))), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn wl_group_order(g: *const WlGroup, out: *mut usize) -> WlStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("group"))?;
        write_out(out, g.0.order(), "out")
    })
}

/// Releases a group. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn wl_group_free(g: *mut WlGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Builds a graph from a spec such as `complete_power(cyclic(2),2)` or
/// `cayley(symmetric(3);213,231,312)^2`.
#[no_mangle]
pub unsafe extern "C" fn wl_graph_new(spec: *const c_char, out: *mut *mut WlGraph) -> WlStatus {
    guard(|| {
        let spec = read_str(spec, "spec")?;
        let (group, graph) = parse_graph_spec(spec).map_err(lib)?;
        let g = Arc::new(FiniteGroup::parse(&group).map_err(lib)?);
        let x = graph.build(g).map_err(lib)?;
        write_out(out, Box::into_raw(Box::new(WlGraph(x))), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn wl_graph_vertex_count(x: *const WlGraph, out: *mut usize) -> WlStatus {
    guard(|| {
        let x = x.as_ref().ok_or_else(|| null("graph"))?;
        write_out(out, x.0.vertex_count(), "out")
    })
}

/// Largest non-trivial eigenvalue magnitude.
#[no_mangle]
pub unsafe extern "C" fn wl_graph_lambda(x: *const WlGraph, out: *mut f64) -> WlStatus {
    guard(|| {
        let x = x.as_ref().ok_or_else(|| null("graph"))?;
        write_out(out, x.0.lambda(), "out")
    })
}

/// Releases a graph. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn wl_graph_free(x: *mut WlGraph) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// Runs the bias computation for a JSON experiment config and returns the
/// results document as JSON in `*out_json`.
#[no_mangle]
pub unsafe extern "C" fn wl_bias_json(config_json: *const c_char, out_json: *mut *mut c_char) -> WlStatus {
    guard(|| {
        let src = read_str(config_json, "config_json")?;
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        let loaded = ExperimentConfig::from_json(src.as_bytes()).map_err(lib)?;
        let result = run_bias(&loaded.config, &loaded.digest).map_err(lib)?;
        write_out(out_json, into_c_string(result.to_json()), "out_json")
    })
}

/// Runs the verification suite. `claims` is a comma-separated list such as
/// `"T1,T8"`, or null for every claim. `lambda_scale` multiplies every λ used
/// in bounds (1.0 for a faithful run).
#[no_mangle]
pub unsafe extern "C" fn wl_verify(
    claims: *const c_char,
    seed: u64,
    lambda_scale: f64,
    out: *mut *mut WlReport,
) -> WlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let mut cfg = SuiteConfig { seed, lambda_scale, ..SuiteConfig::default() };
        if !claims.is_null() {
            let list = read_str(claims, "claims")?;
            cfg.claims = list
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<ClaimId>())
                .collect::<Result<_, _>>()
                .map_err(lib)?;
        }
        if !(lambda_scale.is_finite() && lambda_scale > 0.0) {
            return Err((WlStatus::Config, "lambda_scale must be positive".into()));
        }
        let report = run_suite(&cfg).map_err(lib)?;
        write_out(out, Box::into_raw(Box::new(WlReport(report))), "out")
    })
}

/// Check counts of a report; any output pointer may be null.
#[no_mangle]
pub unsafe extern "C" fn wl_report_counts(
    r: *const WlReport,
    total: *mut usize,
    passed: *mut usize,
    failed: *mut usize,
    skipped: *mut usize,
) -> WlStatus {
    guard(|| {
        let s = &r.as_ref().ok_or_else(|| null("report"))?.0.summary;
        for (p, v) in [(total, s.total), (passed, s.passed), (failed, s.failed), (skipped, s.skipped)] {
            if !p.is_null() {
                p.write(v);
            }
        }
        Ok(())
    })
}

/// Writes 1 to `*out` when no non-skipped check failed, else 0.
#[no_mangle]
pub unsafe extern "C" fn wl_report_all_pass(r: *const WlReport, out: *mut i32) -> WlStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        write_out(out, i32::from(r.0.summary.all_pass), "out")
    })
}

/// The report as JSON, in the same form as `report.json`.
#[no_mangle]
pub unsafe extern "C" fn wl_report_json(r: *const WlReport, out_json: *mut *mut c_char) -> WlStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        write_out(out_json, into_c_string(r.0.to_json()), "out_json")
    })
}

/// Releases a report. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn wl_report_free(r: *mut WlReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
