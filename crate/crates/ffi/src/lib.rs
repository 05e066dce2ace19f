//! C ABI for the `hhorder` engine.
//!
//! Weights are opaque [`HhoWeight`] handles. Every fallible call returns an
//! [`HhoStatus`]; on failure [`hho_last_error_message`] describes the error
//! for the calling thread. Strings handed out by the library are
//! NUL-terminated UTF-8 and must be released with [`hho_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hhorder::bvfunction::CumulativeFunction;
use hhorder::catalog::{make_weight, CatalogError, FunctionalSpec};
use hhorder::convex_order::{hinge_gap, levin_stechkin_compare, OrderError, RelationKind};
use hhorder::harness::{self, Direction, Family, HarnessError};
use hhorder::quadrature::{functional_numeric, QuadratureError, TestFunction};
use hhorder::rational::{format_rational, parse_rational};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HhoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidParameter = 4,
    NotNormalized = 5,
    NoBracket = 6,
    Numeric = 7,
    Io = 8,
    Internal = 9,
}

/// Relation between `∫ f dA` and `∫ f dB` over convex `f`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HhoRelation {
    LessOrEqual = 0,
    GreaterOrEqual = 1,
    Equal = 2,
    Incomparable = 3,
    NotNormalized = 4,
}

impl From<RelationKind> for HhoRelation {
    fn from(k: RelationKind) -> Self {
        match k {
            RelationKind::LessOrEqual => HhoRelation::LessOrEqual,
            RelationKind::GreaterOrEqual => HhoRelation::GreaterOrEqual,
            RelationKind::Equal => HhoRelation::Equal,
            RelationKind::Incomparable => HhoRelation::Incomparable,
            RelationKind::NotNormalized => HhoRelation::NotNormalized,
        }
    }
}

/// Opaque handle to a cumulative weight function.
pub struct HhoWeight {
    inner: CumulativeFunction,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(HhoStatus, String);

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        let status = match &e {
            CatalogError::Parse { .. } => HhoStatus::Parse,
            _ => HhoStatus::InvalidParameter,
        };
        Failure(status, e.to_string())
    }
}

impl From<OrderError> for Failure {
    fn from(e: OrderError) -> Self {
        let status = match &e {
            OrderError::NotNormalized { .. } => HhoStatus::NotNormalized,
            _ => HhoStatus::InvalidParameter,
        };
        Failure(status, e.to_string())
    }
}

impl From<QuadratureError> for Failure {
    fn from(e: QuadratureError) -> Self {
        let status = match &e {
            QuadratureError::Catalog(c) => return c.clone().into(),
            QuadratureError::ToleranceNotMet { .. } => HhoStatus::Numeric,
            QuadratureError::InvalidInput(_) => HhoStatus::InvalidParameter,
        };
        Failure(status, e.to_string())
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        let status = match e {
            HarnessError::Catalog(c) => return c.into(),
            HarnessError::Order(o) => return o.into(),
            HarnessError::Quadrature(q) => return q.into(),
            HarnessError::NoBracket { .. } => HhoStatus::NoBracket,
            HarnessError::Io(_) => HhoStatus::Io,
            HarnessError::Json(_)
            | HarnessError::Number(_)
            | HarnessError::Family(_)
            | HarnessError::Direction(_)
            | HarnessError::Format(_) => HhoStatus::Parse,
            _ => HhoStatus::InvalidParameter,
        };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(HhoStatus::Parse, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Runs `body`, translating errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> HhoStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            HhoStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            HhoStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(HhoStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(HhoStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn weight<'a>(p: *const HhoWeight, name: &str) -> Result<&'a CumulativeFunction, Failure> {
    p.as_ref()
        .map(|w| &w.inner)
        .ok_or_else(|| Failure(HhoStatus::NullPointer, format!("{name} is null")))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(HhoStatus::Internal, "interior NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn check_out<T>(out: *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure(HhoStatus::NullPointer, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

fn spec(s: &str) -> Result<FunctionalSpec, Failure> {
    Ok(s.parse::<FunctionalSpec>()?)
}

/// Builds the weight of a functional spec such as `"T:a=6"` or
/// `"mix:3/4*davg+1/4*trap"`.
///
/// # Safety
/// `spec_text` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hho_weight_from_spec(spec_text: *const c_char, out: *mut *mut HhoWeight) -> HhoStatus {
    guard(|| {
        check_out(out)?;
        let inner = make_weight(&spec(text(spec_text, "spec")?)?)?;
        *out = Box::into_raw(Box::new(HhoWeight { inner }));
        Ok(())
    })
}

/// Builds a weight from its canonical JSON form.
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hho_weight_from_json(json: *const c_char, out: *mut *mut HhoWeight) -> HhoStatus {
    guard(|| {
        check_out(out)?;
        let inner = CumulativeFunction::from_json(text(json, "json")?)?;
        *out = Box::into_raw(Box::new(HhoWeight { inner }));
        Ok(())
    })
}

/// Releases a weight. Null is ignored.
///
/// # Safety
/// `w` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hho_weight_free(w: *mut HhoWeight) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Canonical JSON of a weight; free the result with `hho_string_free`.
///
/// # Safety
/// `w` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hho_weight_to_json(w: *const HhoWeight, out: *mut *mut c_char) -> HhoStatus {
    guard(|| {
        check_out(out)?;
        put_string(out, weight(w, "weight")?.to_json())
    })
}

/// `∫ t^k dF` as a fraction string `"p/q"`.
///
/// # Safety
/// `w` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hho_weight_moment(w: *const HhoWeight, k: u32, out: *mut *mut c_char) -> HhoStatus {
    guard(|| {
        check_out(out)?;
        put_string(out, format_rational(&weight(w, "weight")?.moment(k as usize)))
    })
}

/// Exact relation between `∫ f dA` and `∫ f dB` over convex `f`.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hho_compare(a: *const HhoWeight, b: *const HhoWeight, out: *mut HhoRelation) -> HhoStatus {
    guard(|| {
        check_out(out)?;
        let v = levin_stechkin_compare(weight(a, "a")?, weight(b, "b")?);
        *out = v.kind().into();
        Ok(())
    })
}

/// Full comparison of two specs as JSON, including hinge witnesses for
/// incomparable pairs.
///
/// # Safety
/// Both strings must be valid NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hho_compare_json(a: *const c_char, b: *const c_char, out: *mut *mut c_char) -> HhoStatus {
    guard(|| {
        check_out(out)?;
        let c = harness::compare(&spec(text(a, "a")?)?, &spec(text(b, "b")?)?)?;
        put_string(out, serde_json::to_string(&c)?)
    })
}

/// `∫ max(t-c, 0) dB - ∫ max(t-c, 0) dA` for a knot `c` in `(0, 1)` given as
/// a fraction string; the result is a fraction string.
///
/// # Safety
/// `a`, `b` must be live handles, `knot` a valid string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hho_hinge_gap(
    a: *const HhoWeight,
    b: *const HhoWeight,
    knot: *const c_char,
    out: *mut *mut c_char,
) -> HhoStatus {
    guard(|| {
        check_out(out)?;
        let c = parse_rational(text(knot, "knot")?).map_err(|e| Failure(HhoStatus::Parse, e.to_string()))?;
        let gap = hinge_gap(weight(a, "a")?, weight(b, "b")?, &c)?;
        put_string(out, format_rational(&gap))
    })
}

/// Numeric value of a functional on `[x, y]` for a test function given as
/// JSON, e.g. `{"Exponential":{"lambda":1.0}}` or `{"Hinge":{"c":0.5}}`.
///
/// # Safety
/// Strings must be valid NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hho_functional_numeric(
    spec_text: *const c_char,
    function_json: *const c_char,
    x: f64,
    y: f64,
    tol: f64,
    out: *mut f64,
) -> HhoStatus {
    guard(|| {
        check_out(out)?;
        let f: TestFunction = serde_json::from_str(text(function_json, "function")?)?;
        let r = functional_numeric(&spec(text(spec_text, "spec")?)?, &f, x, y, tol)?;
        *out = r.value;
        Ok(())
    })
}

/// Threshold search as in the `threshold` CLI command; `direction` is `"LE"`
/// or `"GE"`, bounds and `tol` are fraction strings. Writes the result JSON.
///
/// # Safety
/// All strings must be valid NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hho_find_threshold(
    family: *const c_char,
    target: *const c_char,
    direction: *const c_char,
    lo: *const c_char,
    hi: *const c_char,
    tol: *const c_char,
    out: *mut *mut c_char,
) -> HhoStatus {
    guard(|| {
        check_out(out)?;
        let num = |p, name| -> Result<_, Failure> {
            parse_rational(text(p, name)?).map_err(|e| Failure(HhoStatus::Parse, e.to_string()))
        };
        let r = harness::find_threshold(
            &Family::new(text(family, "family")?)?,
            &Family::new(text(target, "target")?)?,
            text(direction, "direction")?.parse::<Direction>()?,
            &num(lo, "lo")?,
            &num(hi, "hi")?,
            &num(tol, "tol")?,
        )?;
        put_string(out, serde_json::to_string(&r)?)
    })
}

/// Runs the built-in claim suite. Writes its JSON and whether every claim
/// passed.
///
/// # Safety
/// `out` and `all_pass` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hho_run_suite(out: *mut *mut c_char, all_pass: *mut bool) -> HhoStatus {
    guard(|| {
        check_out(out)?;
        check_out(all_pass)?;
        let r = harness::run_theorem_suite();
        *all_pass = r.all_pass();
        put_string(out, serde_json::to_string(&r)?)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hho_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn hho_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version string.
#[no_mangle]
pub extern "C" fn hho_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
