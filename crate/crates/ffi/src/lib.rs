//! C ABI over `motpave`.
//!
//! Instances live behind an opaque handle. Every call returns a
//! [`MotpaveStatus`]; on failure `motpave_last_error` describes the cause.
//! Strings handed out by the library must be released with
//! `motpave_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use motpave::cli::{self, DualMode, InstanceFile, LoadedInstance, Report, ReportBody};
use motpave::paving::{PairClassifier, Polarity};
use motpave::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotpaveStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInstance = 4,
    NotInConvexOrder = 5,
    MissingSeed = 6,
    OutOfRange = 7,
    Internal = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotpaveDualMode {
    Pointwise = 0,
    Quasisure = 1,
    Both = 2,
}

/// Opaque instance handle.
pub struct MotpaveInstance {
    inner: LoadedInstance,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MotpaveStatus {
    match e {
        Error::Parse(_) => MotpaveStatus::Parse,
        Error::NotInConvexOrder => MotpaveStatus::NotInConvexOrder,
        Error::MissingSeed(_) => MotpaveStatus::MissingSeed,
        Error::NotInSupport(_) => MotpaveStatus::OutOfRange,
        Error::Internal(_) => MotpaveStatus::Internal,
        Error::EmptyPointSet
        | Error::DimensionMismatch { .. }
        | Error::InvalidMeasure(_)
        | Error::InstanceMismatch(_)
        | Error::InfiniteCostOnNonpolar(..) => MotpaveStatus::InvalidInstance,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (MotpaveStatus, String)>) -> MotpaveStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MotpaveStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside motpave".into());
            MotpaveStatus::Panic
        }
    }
}

fn lift<T>(r: motpave::Result<T>) -> Result<T, (MotpaveStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (MotpaveStatus, String) {
    (MotpaveStatus::NullPointer, "null pointer argument".into())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, (MotpaveStatus, String)> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s).to_str().map_err(|_| (MotpaveStatus::InvalidUtf8, "string is not UTF-8".into()))
}

unsafe fn handle<'a>(h: *const MotpaveInstance) -> Result<&'a MotpaveInstance, (MotpaveStatus, String)> {
    h.as_ref().ok_or_else(null)
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (MotpaveStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    let c = CString::new(s).map_err(|_| (MotpaveStatus::Internal, "report contains a nul byte".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// Parses an instance JSON document into a new handle.
///
/// # Safety
/// `json` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn motpave_instance_from_json(json: *const c_char, out: *mut *mut MotpaveInstance) -> MotpaveStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let text = read_str(json)?;
        let inner = lift(InstanceFile::parse(text))?;
        *out = Box::into_raw(Box::new(MotpaveInstance { inner }));
        Ok(())
    })
}

/// # Safety
/// `h` must come from `motpave_instance_from_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn motpave_instance_free(h: *mut MotpaveInstance) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Atom counts of the two marginals and the dimension.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn motpave_instance_shape(
    h: *const MotpaveInstance,
    n: *mut usize,
    m: *mut usize,
    dim: *mut usize,
) -> MotpaveStatus {
    guard(|| {
        let inst = &handle(h)?.inner.instance;
        if n.is_null() || m.is_null() || dim.is_null() {
            return Err(null());
        }
        let (a, b) = inst.shape();
        *n = a;
        *m = b;
        *dim = inst.dim();
        Ok(())
    })
}

/// # Safety
/// `h` and `holds` must be valid.
#[no_mangle]
pub unsafe extern "C" fn motpave_check_order(h: *const MotpaveInstance, holds: *mut bool) -> MotpaveStatus {
    guard(|| {
        let inst = &handle(h)?.inner.instance;
        if holds.is_null() {
            return Err(null());
        }
        *holds = lift(motpave::convex_order(&inst.mu, &inst.nu))?.holds();
        Ok(())
    })
}

/// Whether no martingale coupling charges `(x_i, y_j)`.
///
/// # Safety
/// `h` and `polar` must be valid.
#[no_mangle]
pub unsafe extern "C" fn motpave_pair_is_polar(h: *const MotpaveInstance, i: usize, j: usize, polar: *mut bool) -> MotpaveStatus {
    guard(|| {
        let inst = &handle(h)?.inner.instance;
        if polar.is_null() {
            return Err(null());
        }
        let class = lift(PairClassifier::new(inst).and_then(|c| c.classify(i, j)))?;
        *polar = class.polarity == Polarity::Polar;
        Ok(())
    })
}

fn report(loaded: &LoadedInstance, command: &str, seed: Option<u64>, body: ReportBody) -> String {
    Report::new(command, &loaded.instance, loaded.cost.as_ref(), seed, body).to_json()
}

/// Paving report as JSON.
///
/// # Safety
/// `h` and `out` must be valid; free `*out` with `motpave_string_free`.
#[no_mangle]
pub unsafe extern "C" fn motpave_paving_json(h: *const MotpaveInstance, out: *mut *mut c_char) -> MotpaveStatus {
    guard(|| {
        let loaded = &handle(h)?.inner;
        let body = lift(cli::cmd_paving(&loaded.instance))?;
        write_string(out, report(loaded, "paving", loaded.seed, ReportBody::Paving(body)))
    })
}

/// Coupling report as JSON: the maximal-support coupling when `vertices`
/// is zero, otherwise that many sampled vertices. A negative `seed` falls
/// back to the instance's seed.
///
/// # Safety
/// `h` and `out` must be valid; free `*out` with `motpave_string_free`.
#[no_mangle]
pub unsafe extern "C" fn motpave_coupling_json(
    h: *const MotpaveInstance,
    vertices: usize,
    seed: i64,
    out: *mut *mut c_char,
) -> MotpaveStatus {
    guard(|| {
        let loaded = &handle(h)?.inner;
        let seed = if seed >= 0 { Some(seed as u64) } else { loaded.seed };
        let k = (vertices > 0).then_some(vertices);
        let body = lift(cli::cmd_coupling(&loaded.instance, k, seed))?;
        write_string(out, report(loaded, "coupling", seed, ReportBody::Coupling(body)))
    })
}

/// Primal and dual values as JSON. `cost_json` may be null to use the
/// instance's cost table.
///
/// # Safety
/// `h` and `out` must be valid, `cost_json` null or a valid C string.
#[no_mangle]
pub unsafe extern "C" fn motpave_dual_json(
    h: *const MotpaveInstance,
    cost_json: *const c_char,
    mode: MotpaveDualMode,
    out: *mut *mut c_char,
) -> MotpaveStatus {
    guard(|| {
        let loaded = &handle(h)?.inner;
        let cost = if cost_json.is_null() {
            loaded.cost.clone().ok_or((MotpaveStatus::Parse, "instance has no cost table".to_string()))?
        } else {
            lift(cli::parse_cost(read_str(cost_json)?))?
        };
        let mode = match mode {
            MotpaveDualMode::Pointwise => DualMode::Pointwise,
            MotpaveDualMode::Quasisure => DualMode::Quasisure,
            MotpaveDualMode::Both => DualMode::Both,
        };
        let body = lift(cli::cmd_dual(&loaded.instance, &cost, mode))?;
        let r = Report::new("dual", &loaded.instance, Some(&cost), loaded.seed, ReportBody::Dual(body));
        write_string(out, r.to_json())
    })
}

/// Golden report of the built-in two-dimensional instance. Returns
/// `MOTPAVE_STATUS_INTERNAL` (with the report still written) on mismatch.
///
/// # Safety
/// `out` must be valid; free `*out` with `motpave_string_free`.
#[no_mangle]
pub unsafe extern "C" fn motpave_example_json(out: *mut *mut c_char) -> MotpaveStatus {
    guard(|| {
        let body = lift(cli::cmd_example_2_2())?;
        let ok = body.all_ok;
        let inst = motpave::golden::instance();
        let r = Report::new("example-2-2", &inst, None, Some(motpave::golden::SEED), ReportBody::Example(body));
        write_string(out, r.to_json())?;
        if ok {
            Ok(())
        } else {
            Err((MotpaveStatus::Internal, "golden values do not match".into()))
        }
    })
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library.
#[no_mangle]
pub extern "C" fn motpave_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn motpave_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn motpave_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
