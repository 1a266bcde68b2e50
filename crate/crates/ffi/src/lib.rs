//! C ABI over the bigaction engine.
//!
//! Every entry point returns a [`BaStatus`]; on anything but `BA_STATUS_OK`
//! a message is available from [`ba_last_error`] on the same thread.
//! Sessions are opaque and must be released with [`ba_session_free`];
//! strings handed out must be released with [`ba_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bigaction::genus::CoverClass;
use bigaction::report::{run, Command, RunConfig, Session, DEFAULT_SEED};
use bigaction::{Error, Params};

/// Result codes. The first four agree with the CLI exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaStatus {
    Ok = 0,
    Integrity = 1,
    Usage = 2,
    AuditMismatch = 3,
    NullPointer = 4,
    Io = 5,
    Internal = 6,
}

/// Opaque handle owning one parameter set and its cached computations.
pub struct BaSession {
    inner: Session,
}

/// Uniformizer exponents and the residual valuation.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct BaUniformizer {
    pub a1: i64,
    pub a2: i64,
    pub b1: i64,
    pub b2: i64,
    pub residual_valuation: i64,
    pub expected_valuation: i64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> BaStatus {
    match e {
        _ if e.is_integrity() => BaStatus::Integrity,
        Error::Io(_) => BaStatus::Io,
        Error::Parameter(_) | Error::Unsupported(_) | Error::ContextMismatch { .. } | Error::BeyondPrecision { .. } => BaStatus::Usage,
        _ => BaStatus::Internal,
    }
}

fn guard(f: impl FnOnce() -> Result<BaStatus, (BaStatus, String)>) -> BaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            BaStatus::Internal
        }
    }
}

fn fail(e: Error) -> (BaStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (BaStatus, String) {
    (BaStatus::NullPointer, format!("{what} is null"))
}

unsafe fn session_mut<'a>(s: *mut BaSession) -> Result<&'a mut Session, (BaStatus, String)> {
    s.as_mut().map(|s| &mut s.inner).ok_or_else(|| null("session"))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (BaStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (BaStatus::Usage, format!("{what} is not UTF-8")))
}

fn give_string(s: String, out: *mut *mut c_char) -> Result<(), (BaStatus, String)> {
    let c = CString::new(s).map_err(|_| (BaStatus::Internal, "string contains NUL".to_string()))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ba_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ba_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Creates a session. `samples` is the number of random lines checked per
/// class; `seed` 0 selects the default seed. `cache_dir` may be NULL.
///
/// # Safety
/// `out` must be valid for writes; `cache_dir` must be NULL or a valid C string.
#[no_mangle]
pub unsafe extern "C" fn ba_session_new(p: u32, s: u32, samples: u64, seed: u64, cache_dir: *const c_char, out: *mut *mut BaSession) -> BaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let params = Params::new(p, s).map_err(fail)?;
        let mut cfg = RunConfig::new(params);
        cfg.samples = samples as usize;
        cfg.seed = if seed == 0 { DEFAULT_SEED } else { seed };
        if !cache_dir.is_null() {
            cfg.cache_dir = Some(read_str(cache_dir, "cache_dir")?.into());
        }
        let inner = Session::new(cfg).map_err(fail)?;
        *out = Box::into_raw(Box::new(BaSession { inner }));
        Ok(BaStatus::Ok)
    })
}

/// Releases a session. NULL is ignored.
///
/// # Safety
/// `session` must come from [`ba_session_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ba_session_free(session: *mut BaSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ba_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds (or reuses) the uniformizer and reports its exponents.
///
/// # Safety
/// `session` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ba_uniformizer(session: *mut BaSession, out: *mut BaUniformizer) -> BaStatus {
    guard(|| {
        let s = session_mut(session)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let d = &s.pipeline().map_err(fail)?.uniformizer;
        *out = BaUniformizer {
            a1: d.a1,
            a2: d.a2,
            b1: d.b1,
            b2: d.b2,
            residual_valuation: d.residual_valuation().unwrap_or(i64::MAX),
            expected_valuation: d.expected_residual_valuation(),
        };
        Ok(BaStatus::Ok)
    })
}

/// Conductor of a class (`y2`, `v1'`, `v2'`, `w`, `y1-over-K`, `ree-line`).
///
/// # Safety
/// `session`, `class_label` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ba_class_conductor(session: *mut BaSession, class_label: *const c_char, out: *mut u64) -> BaStatus {
    guard(|| {
        let s = session_mut(session)?;
        let label = read_str(class_label, "class_label")?;
        let class = CoverClass::from_label(label).ok_or_else(|| (BaStatus::Usage, format!("unknown class `{label}`")))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = s.class(class).map_err(fail)?.conductor;
        Ok(BaStatus::Ok)
    })
}

/// Genus of the top field as a decimal string; free with [`ba_string_free`].
///
/// # Safety
/// `session` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ba_genus(session: *mut BaSession, out: *mut *mut c_char) -> BaStatus {
    guard(|| {
        let s = session_mut(session)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let g = s.genus().map_err(fail)?.genus_gs.to_string();
        give_string(g, out)?;
        Ok(BaStatus::Ok)
    })
}

/// Writes 1 to `out` if `(p-1) q^6 > 2p g`, else 0.
///
/// # Safety
/// `session` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ba_big_action(session: *mut BaSession, out: *mut i32) -> BaStatus {
    guard(|| {
        let s = session_mut(session)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = s.big_action().map_err(fail)?.verdict as i32;
        Ok(BaStatus::Ok)
    })
}

/// Runs a CLI command (`verify`, `genus`, `commutators`, `audit`) and returns
/// the JSON report. The status is the report's exit code, so audit
/// mismatches give `BA_STATUS_AUDIT_MISMATCH` with a valid report.
///
/// # Safety
/// `session`, `command` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ba_report_json(session: *mut BaSession, command: *const c_char, out: *mut *mut c_char) -> BaStatus {
    guard(|| {
        let s = session_mut(session)?;
        let name = read_str(command, "command")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cmd = match name {
            "verify" => Command::Verify,
            "genus" => Command::Genus,
            "commutators" => Command::Commutators,
            "audit" => Command::Audit,
            other => return Err((BaStatus::Usage, format!("unsupported command `{other}`"))),
        };
        let report = run(s, &cmd).map_err(fail)?;
        give_string(report.to_json_string(), out)?;
        Ok(match report.exit_code() {
            0 => BaStatus::Ok,
            1 => {
                set_error(report.integrity_failures.join("; "));
                BaStatus::Integrity
            }
            _ => BaStatus::AuditMismatch,
        })
    })
}
