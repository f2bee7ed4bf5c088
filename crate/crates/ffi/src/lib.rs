//! C interface to `equimeasure`.
//!
//! Maps live behind opaque `EqmMap` handles. Every fallible call returns an
//! `EqmStatus`; on failure `eqm_last_error()` describes what went wrong on
//! the calling thread. Strings handed out by the library must be released
//! with `eqm_string_free`.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use equimeasure::cli::parse_field;
use equimeasure::config::RunConfig;
use equimeasure::graph::analyze_graph;
use equimeasure::identities::check_counterexample_triple;
use equimeasure::io::json::map_to_value;
use equimeasure::io::parse_map_input;
use equimeasure::map::RationalMap;
use equimeasure::measure::{same_measure_test, MeasureVerdict};
use equimeasure::powermap::same_periodic_points_powermaps;
use equimeasure::Error;
use libc::{c_char, c_int, size_t};
use serde_json::{json, Value};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EqmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    Budget = 5,
    Numerical = 6,
    Io = 7,
    Panic = 8,
}

/// Verdict of the sampled measure comparison.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EqmVerdict {
    Same = 0,
    Different = 1,
    Inconclusive = 2,
}

/// A rational self-map of the sphere with exact coefficients.
pub struct EqmMap {
    inner: RationalMap,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> EqmStatus {
    match e {
        Error::Parse { .. } | Error::Json(_) => EqmStatus::Parse,
        Error::Budget { .. } => EqmStatus::Budget,
        Error::Io(_) => EqmStatus::Io,
        e if e.is_internal() => EqmStatus::Numerical,
        _ => EqmStatus::InvalidInput,
    }
}

/// Internal failure carrying its status code.
struct Failure(EqmStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(EqmStatus::Numerical, e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> EqmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => EqmStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            EqmStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(EqmStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(EqmStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn map_arg<'a>(p: *const EqmMap, name: &str) -> Result<&'a RationalMap, Failure> {
    p.as_ref()
        .map(|m| &m.inner)
        .ok_or_else(|| Failure(EqmStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure(EqmStatus::NullPointer, format!("{name} is null")))
}

fn give_map(out: &mut *mut EqmMap, inner: RationalMap) {
    *out = Box::into_raw(Box::new(EqmMap { inner }));
}

fn give_string(out: &mut *mut c_char, text: String) -> Result<(), Failure> {
    let c = CString::new(text).map_err(|_| Failure(EqmStatus::Numerical, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn give_json(out: &mut *mut c_char, value: &Value) -> Result<(), Failure> {
    give_string(out, serde_json::to_string(value)?)
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn eqm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a map from JSON or shorthand such as `"(z^2+1)/z"`. `field` is
/// `"Q"`, `"Q(w)"`, `"Q(i)"` or comma-separated minimal polynomial
/// coefficients; null means `"Q"`.
///
/// # Safety
/// `text` and a non-null `field` must be NUL-terminated strings; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn eqm_map_parse(text: *const c_char, field: *const c_char, out: *mut *mut EqmMap) -> EqmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let text = str_arg(text, "text")?;
        let spec = if field.is_null() { "Q" } else { str_arg(field, "field")? };
        let (field, generator) = parse_field(spec)?;
        let mut symbols = BTreeMap::new();
        if let Some(name) = generator {
            symbols.insert(name.to_string(), field.generator());
        }
        give_map(out, parse_map_input(text, &field, &symbols)?);
        Ok(())
    })
}

/// Releases a map. Null is ignored.
///
/// # Safety
/// `map` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn eqm_map_free(map: *mut EqmMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// # Safety
/// `map` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eqm_map_degree(map: *const EqmMap, out: *mut size_t) -> EqmStatus {
    guard(|| {
        *out_arg(out, "out")? = map_arg(map, "map")?.degree();
        Ok(())
    })
}

/// `f ∘ g`, refused when the degree exceeds `degree_budget`.
///
/// # Safety
/// `f`, `g` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eqm_map_compose(
    f: *const EqmMap,
    g: *const EqmMap,
    degree_budget: u64,
    out: *mut *mut EqmMap,
) -> EqmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let (f, g) = (map_arg(f, "f")?, map_arg(g, "g")?);
        let degree = f.degree() as u128 * g.degree() as u128;
        if degree > degree_budget as u128 {
            return Err(Error::Budget {
                what: "composition".into(),
                needed: degree,
                limit: degree_budget as u128,
            }
            .into());
        }
        give_map(out, f.compose(g)?);
        Ok(())
    })
}

/// The `n`-th iterate of `f`.
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eqm_map_iterate(f: *const EqmMap, n: u32, degree_budget: u64, out: *mut *mut EqmMap) -> EqmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        give_map(out, map_arg(f, "f")?.iterate(n, degree_budget as u128)?);
        Ok(())
    })
}

/// Exact equality of normalized coefficients; fields must agree.
///
/// # Safety
/// `a`, `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eqm_map_equal(a: *const EqmMap, b: *const EqmMap, out: *mut bool) -> EqmStatus {
    guard(|| {
        let (a, b) = (map_arg(a, "a")?, map_arg(b, "b")?);
        if a.field() != b.field() {
            return Err(Error::FieldMismatch {
                left: a.field().describe(),
                right: b.field().describe(),
            }
            .into());
        }
        *out_arg(out, "out")? = a == b;
        Ok(())
    })
}

/// # Safety
/// `map` must be a live handle and `out` writable. Free the result with
/// `eqm_string_free`.
#[no_mangle]
pub unsafe extern "C" fn eqm_map_to_json(map: *const EqmMap, out: *mut *mut c_char) -> EqmStatus {
    guard(|| give_json(out_arg(out, "out")?, &map_to_value(map_arg(map, "map")?)))
}

/// Human-readable form of a map.
///
/// # Safety
/// As for `eqm_map_to_json`.
#[no_mangle]
pub unsafe extern "C" fn eqm_map_to_string(map: *const EqmMap, out: *mut *mut c_char) -> EqmStatus {
    guard(|| give_string(out_arg(out, "out")?, map_arg(map, "map")?.to_string()))
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn eqm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Irreducible components of the graph curve of `g`, as a JSON report.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eqm_analyze_graph(g: *const EqmMap, seed: u64, out: *mut *mut c_char) -> EqmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let config = RunConfig::with_seed(seed);
        let analysis = analyze_graph(map_arg(g, "g")?, &config)?;
        give_json(out, &analysis.to_value(&config))
    })
}

/// Certifies the counterexample claims for `(R, S, T)`. `all_pass` is set
/// to whether every claim passed; `out` receives the claims as JSON.
///
/// # Safety
/// The maps must be live handles; `all_pass` and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eqm_certify_triple(
    r: *const EqmMap,
    s: *const EqmMap,
    t: *const EqmMap,
    seed: u64,
    all_pass: *mut bool,
    out: *mut *mut c_char,
) -> EqmStatus {
    guard(|| {
        let all_pass = out_arg(all_pass, "all_pass")?;
        let out = out_arg(out, "out")?;
        let config = RunConfig::with_seed(seed);
        let mut rng = config.rng("identities.fiber");
        let report = check_counterexample_triple(map_arg(r, "r")?, map_arg(s, "s")?, map_arg(t, "t")?, &mut rng)?;
        *all_pass = !report.any_fail();
        give_json(out, &json!({ "claims": report.claims, "seed": seed }))
    })
}

/// Sampled comparison of the equilibrium measures of `f` and `g`. `report`
/// may be null when only the verdict is wanted.
///
/// # Safety
/// `f`, `g` must be live handles; `verdict` writable.
#[no_mangle]
pub unsafe extern "C" fn eqm_same_measure(
    f: *const EqmMap,
    g: *const EqmMap,
    count: size_t,
    depth: size_t,
    seed: u64,
    verdict: *mut EqmVerdict,
    report: *mut *mut c_char,
) -> EqmStatus {
    guard(|| {
        let verdict = out_arg(verdict, "verdict")?;
        let r = same_measure_test(map_arg(f, "f")?, map_arg(g, "g")?, count, depth, seed)?;
        *verdict = match r.verdict {
            MeasureVerdict::Same => EqmVerdict::Same,
            MeasureVerdict::Different => EqmVerdict::Different,
            MeasureVerdict::Inconclusive => EqmVerdict::Inconclusive,
        };
        if let Some(report) = report.as_mut() {
            give_json(report, &serde_json::to_value(&r)?)?;
        }
        Ok(())
    })
}

/// Whether `z^df` and `z^dg` have the same periodic points.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eqm_powermap_same_periodic_points(df: u64, dg: u64, out: *mut bool) -> EqmStatus {
    guard(|| {
        *out_arg(out, "out")? = same_periodic_points_powermaps(df, dg)?;
        Ok(())
    })
}

/// Runs the command-line interface with `argc` arguments (excluding the
/// program name). Returns the CLI exit code; output is written to `out` as
/// the report text and, if non-null, diagnostics to `err`.
///
/// # Safety
/// `argv` must hold `argc` NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eqm_cli_run(
    argc: c_int,
    argv: *const *const c_char,
    out: *mut *mut c_char,
    err: *mut *mut c_char,
) -> c_int {
    let mut code = equimeasure::cli::EXIT_INTERNAL;
    let status = guard(|| {
        let out = out_arg(out, "out")?;
        if argc < 0 || (argc > 0 && argv.is_null()) {
            return Err(Failure(EqmStatus::NullPointer, "argv is null".into()));
        }
        let mut args = vec!["equimeasure".to_string()];
        for k in 0..argc as usize {
            args.push(str_arg(*argv.add(k), "argv entry")?.to_string());
        }
        let (mut stdout, mut stderr) = (Vec::new(), Vec::new());
        code = equimeasure::cli::run(args, &mut stdout, &mut stderr);
        give_string(out, String::from_utf8_lossy(&stdout).into_owned())?;
        if let Some(err) = err.as_mut() {
            give_string(err, String::from_utf8_lossy(&stderr).into_owned())?;
        }
        Ok(())
    });
    if status == EqmStatus::Ok {
        code
    } else {
        equimeasure::cli::EXIT_USAGE
    }
}
