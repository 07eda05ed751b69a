//! C ABI over the `owpinv` simulator.
//!
//! Objects are opaque handles created by `*_new` / `*_from_file` and released
//! with the matching `*_free`. Every fallible call returns an [`OwpStatus`];
//! on failure a description is available from [`owp_last_error`] on the same
//! thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use owpinv::analysis::{contradiction_check, params_compute};
use owpinv::invert::{run_av_inv, run_inv, RunOptions, RunReport};
use owpinv::ops::{AngleMode, BadMode, PseudoIdentity, PseudoIdentitySpec};
use owpinv::perm::{Direction, Family, Permutation};
use owpinv::Error;

/// Opaque permutation handle.
pub struct OwpPermutation(Permutation);

/// Opaque pseudo-identity handle.
pub struct OwpPseudoIdentity(PseudoIdentity);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OwpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Invariant = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OwpFamily {
    Identity = 0,
    BitReversal = 1,
    /// `param` is the mask.
    XorMask = 2,
    /// Seeded random invertible matrix; `param` is the offset.
    AffineGf2 = 3,
    Random = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OwpAngleMode {
    WorstCase = 0,
    Random = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OwpBadMode {
    FullRotation = 0,
    RandomAngle = 1,
}

/// Outcome of one inversion run.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OwpRunReport {
    pub x: u64,
    pub target: u64,
    pub success_prob: f64,
    pub v2_norm: f64,
    /// First stage whose fidelity fell below threshold, or -1.
    pub first_failing_stage: i32,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OwpParams {
    pub p: f64,
    pub q: f64,
    pub claim31_count: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> OwpStatus {
    match e {
        Error::Io { .. } => OwpStatus::Io,
        Error::Parse { .. } | Error::Json(_) | Error::Csv(_) => OwpStatus::Parse,
        Error::Invariant(_) => OwpStatus::Invariant,
        _ => OwpStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (OwpStatus, String)>) -> OwpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OwpStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            OwpStatus::Panic
        }
    }
}

fn lift(e: Error) -> (OwpStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (OwpStatus, String) {
    (OwpStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_path(path: *const c_char) -> Result<String, (OwpStatus, String)> {
    if path.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(path)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| (OwpStatus::InvalidArgument, "path is not UTF-8".into()))
}

fn fill_report(r: &RunReport) -> OwpRunReport {
    OwpRunReport {
        x: r.x as u64,
        target: r.target as u64,
        success_prob: r.success_prob,
        v2_norm: r.v2_norm,
        first_failing_stage: r.first_failing_stage().map_or(-1, |j| j as i32),
    }
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn owp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Builds a permutation of `n`-bit strings.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn owp_permutation_new(
    family: OwpFamily,
    n: u32,
    seed: u64,
    param: u64,
    out: *mut *mut OwpPermutation,
) -> OwpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let family = match family {
            OwpFamily::Identity => Family::Identity,
            OwpFamily::BitReversal => Family::BitReversal,
            OwpFamily::XorMask => Family::XorMask(param as usize),
            OwpFamily::AffineGf2 => Family::AffineGf2 {
                matrix: None,
                offset: param as usize,
            },
            OwpFamily::Random => Family::Random,
        };
        let perm = Permutation::build(&family, n, Some(seed)).map_err(lift)?;
        *out = Box::into_raw(Box::new(OwpPermutation(perm)));
        Ok(())
    })
}

/// Loads a permutation table file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn owp_permutation_from_file(path: *const c_char, out: *mut *mut OwpPermutation) -> OwpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = read_path(path)?;
        let text = std::fs::read_to_string(&path).map_err(|e| (OwpStatus::Io, format!("{path}: {e}")))?;
        let perm = Permutation::parse(&text).map_err(lift)?;
        *out = Box::into_raw(Box::new(OwpPermutation(perm)));
        Ok(())
    })
}

/// Bit length of `perm`, or 0 for NULL.
///
/// # Safety
/// `perm` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn owp_permutation_n(perm: *const OwpPermutation) -> u32 {
    perm.as_ref().map_or(0, |p| p.0.n())
}

/// `f(v)`, or `f^{-1}(v)` when `inverse` is set.
///
/// # Safety
/// `perm` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn owp_permutation_apply(
    perm: *const OwpPermutation,
    v: u64,
    inverse: bool,
    out: *mut u64,
) -> OwpStatus {
    guard(|| {
        let perm = perm.as_ref().ok_or_else(|| null("perm"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let dir = if inverse { Direction::Inverse } else { Direction::Forward };
        *out = perm.0.apply(v as usize, dir).map_err(lift)? as u64;
        Ok(())
    })
}

/// # Safety
/// `perm` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn owp_permutation_free(perm: *mut OwpPermutation) {
    if !perm.is_null() {
        drop(Box::from_raw(perm));
    }
}

/// Builds a pseudo-identity on `n + k` qubits with `floor(b 2^n)` sampled
/// bad values.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn owp_pseudo_identity_new(
    n: u32,
    k: u32,
    a: f64,
    b: f64,
    angle_mode: OwpAngleMode,
    bad_mode: OwpBadMode,
    seed: u64,
    out: *mut *mut OwpPseudoIdentity,
) -> OwpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = PseudoIdentitySpec {
            n,
            k,
            a,
            b,
            angle_mode: match angle_mode {
                OwpAngleMode::WorstCase => AngleMode::WorstCase,
                OwpAngleMode::Random => AngleMode::Random,
            },
            bad_mode: match bad_mode {
                OwpBadMode::FullRotation => BadMode::FullRotation,
                OwpBadMode::RandomAngle => BadMode::RandomAngle,
            },
            bad_set: None,
            seed,
        };
        let op = PseudoIdentity::build(&spec).map_err(lift)?;
        *out = Box::into_raw(Box::new(OwpPseudoIdentity(op)));
        Ok(())
    })
}

/// Loads a serialized pseudo-identity.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn owp_pseudo_identity_from_file(
    path: *const c_char,
    out: *mut *mut OwpPseudoIdentity,
) -> OwpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = read_path(path)?;
        let text = std::fs::read_to_string(&path).map_err(|e| (OwpStatus::Io, format!("{path}: {e}")))?;
        let op = PseudoIdentity::parse(&text).map_err(lift)?;
        *out = Box::into_raw(Box::new(OwpPseudoIdentity(op)));
        Ok(())
    })
}

/// # Safety
/// `op` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn owp_pseudo_identity_free(op: *mut OwpPseudoIdentity) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Exact inversion of `x` with `k` ancilla qubits.
///
/// # Safety
/// `perm` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn owp_run_inv(perm: *const OwpPermutation, x: u64, k: u32, out: *mut OwpRunReport) -> OwpStatus {
    guard(|| {
        let perm = perm.as_ref().ok_or_else(|| null("perm"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let report = run_inv(&perm.0, x as usize, k, &RunOptions::exact().traced()).map_err(lift)?;
        *out = fill_report(&report);
        Ok(())
    })
}

/// Inversion of `x` with every reflection conjugated by `op`.
///
/// # Safety
/// `perm` and `op` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn owp_run_av_inv(
    perm: *const OwpPermutation,
    op: *const OwpPseudoIdentity,
    x: u64,
    out: *mut OwpRunReport,
) -> OwpStatus {
    guard(|| {
        let perm = perm.as_ref().ok_or_else(|| null("perm"))?;
        let op = op.as_ref().ok_or_else(|| null("op"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let report = run_av_inv(&perm.0, x as usize, &op.0, &RunOptions::pseudo().traced()).map_err(lift)?;
        *out = fill_report(&report);
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn owp_params(r: f64, n: u32, out: *mut OwpParams) -> OwpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = params_compute(r, n).map_err(lift)?;
        *out = OwpParams {
            p: p.p,
            q: p.q,
            claim31_count: p.claim31_count,
        };
        Ok(())
    })
}

/// Whether `(1/r - 1/q^2) / (1 - 1/q^2) > 1/q` at `q = r + 1`.
#[no_mangle]
pub extern "C" fn owp_contradiction_check(r: f64) -> bool {
    contradiction_check(r)
}
