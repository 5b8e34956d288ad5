//! C ABI for the `varbound` solver.
//!
//! Instances live behind an opaque [`VbInstance`] handle. Every function
//! returns a [`VbStatus`]; on failure a message for the calling thread is
//! available from [`vb_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use varbound::bounds;
use varbound::{Error, GeneratorSpec, Instance, SignVector};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    WidthExceeded = 3,
    TooLarge = 4,
    Domain = 5,
    Parse = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Opaque instance handle.
pub struct VbInstance(Instance);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VbSolveResult {
    pub max_variance: f64,
    /// Largest free set; on `VB_STATUS_WIDTH_EXCEEDED` the clique number.
    pub omega_observed: usize,
    pub m: usize,
    pub vertices_examined: u64,
    pub schedule_points: usize,
    pub wall_time_ns: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> VbStatus {
    match e {
        Error::WidthExceeded { .. } => VbStatus::WidthExceeded,
        Error::TooLarge { .. } => VbStatus::TooLarge,
        Error::Domain(_) | Error::InsufficientData(_) => VbStatus::Domain,
        Error::Parse(_) | Error::Spec(_) => VbStatus::Parse,
        _ => VbStatus::InvalidInput,
    }
}

struct Fail(VbStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(VbStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> VbStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => VbStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            VbStatus::Panic
        }
    }
}

unsafe fn instance_ref<'a>(inst: *const VbInstance) -> Result<&'a Instance, Fail> {
    inst.as_ref().map(|h| &h.0).ok_or_else(|| null("instance"))
}

unsafe fn input<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, n))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_signs(signs: &SignVector, buf: *mut i8, len: usize) -> Result<(), Fail> {
    if buf.is_null() {
        return Ok(());
    }
    if len < signs.len() {
        return Err(Fail(
            VbStatus::BufferTooSmall,
            format!("sign buffer holds {len}, need {}", signs.len()),
        ));
    }
    ptr::copy_nonoverlapping(signs.as_slice().as_ptr(), buf, signs.len());
    Ok(())
}

/// Message describing the last failure on this thread, or null. Valid until
/// the next `vb_*` call on the same thread.
#[no_mangle]
pub extern "C" fn vb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn vb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds an instance from `n` lower and `n` upper bounds.
///
/// # Safety
/// `lower` and `upper` must point to `n` readable doubles; `out` must be
/// writable. The handle must be released with [`vb_instance_free`].
#[no_mangle]
pub unsafe extern "C" fn vb_instance_new(
    lower: *const f64,
    upper: *const f64,
    n: usize,
    out: *mut *mut VbInstance,
) -> VbStatus {
    guard(|| {
        let lo = input(lower, n, "lower")?.to_vec();
        let up = input(upper, n, "upper")?.to_vec();
        let inst = Instance::new(lo, up)?;
        put(out, Box::into_raw(Box::new(VbInstance(inst))), "out")
    })
}

/// Builds an instance from centers and nonnegative radii.
///
/// # Safety
/// As for [`vb_instance_new`].
#[no_mangle]
pub unsafe extern "C" fn vb_instance_from_center_radius(
    center: *const f64,
    radius: *const f64,
    n: usize,
    out: *mut *mut VbInstance,
) -> VbStatus {
    guard(|| {
        let c = input(center, n, "center")?;
        let r = input(radius, n, "radius")?;
        let inst = Instance::from_center_radius(c, r)?;
        put(out, Box::into_raw(Box::new(VbInstance(inst))), "out")
    })
}

/// Samples `n` intervals from a generator spec string such as
/// `"center=uniform:0,1 radius=exp:1"`; `seed` overrides any seed in it.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vb_instance_generate(
    spec: *const c_char,
    n: usize,
    seed: u64,
    out: *mut *mut VbInstance,
) -> VbStatus {
    guard(|| {
        if spec.is_null() {
            return Err(null("spec"));
        }
        let text = CStr::from_ptr(spec)
            .to_str()
            .map_err(|_| Fail(VbStatus::Parse, "spec is not UTF-8".into()))?;
        let spec: GeneratorSpec = text.parse()?;
        let inst = varbound::sample_instance(&spec.with_seed(seed), n)?;
        put(out, Box::into_raw(Box::new(VbInstance(inst))), "out")
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `inst` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vb_instance_free(inst: *mut VbInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of intervals, or 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vb_instance_len(inst: *const VbInstance) -> usize {
    inst.as_ref().map_or(0, |h| h.0.len())
}

/// Copies the bounds into caller buffers of capacity `len`.
///
/// # Safety
/// `lower` and `upper` must each hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn vb_instance_bounds(
    inst: *const VbInstance,
    lower: *mut f64,
    upper: *mut f64,
    len: usize,
) -> VbStatus {
    guard(|| {
        let x = instance_ref(inst)?;
        if lower.is_null() || upper.is_null() {
            return Err(null("bounds buffer"));
        }
        if len < x.len() {
            return Err(Fail(
                VbStatus::BufferTooSmall,
                format!("buffers hold {len}, need {}", x.len()),
            ));
        }
        ptr::copy_nonoverlapping(x.lower().as_ptr(), lower, x.len());
        ptr::copy_nonoverlapping(x.upper().as_ptr(), upper, x.len());
        Ok(())
    })
}

/// Solves exactly. `argmax` may be null; otherwise it receives the
/// maximising signs (`-1` lower, `+1` upper) and must hold `argmax_len >= n`.
///
/// # Safety
/// `inst` must be a live handle, `result` writable, and `argmax` null or
/// valid for `argmax_len` writes.
#[no_mangle]
pub unsafe extern "C" fn vb_solve(
    inst: *const VbInstance,
    result: *mut VbSolveResult,
    argmax: *mut i8,
    argmax_len: usize,
) -> VbStatus {
    guard(|| {
        let x = instance_ref(inst)?;
        if result.is_null() {
            return Err(null("result"));
        }
        if !argmax.is_null() && argmax_len < x.len() {
            return Err(Fail(
                VbStatus::BufferTooSmall,
                format!("sign buffer holds {argmax_len}, need {}", x.len()),
            ));
        }
        match varbound::solve_max_variance(x) {
            Ok(r) => {
                write_signs(&r.argmax_signs, argmax, argmax_len)?;
                result.write(VbSolveResult {
                    max_variance: r.max_variance,
                    omega_observed: r.omega_observed,
                    m: r.m,
                    vertices_examined: r.vertices_examined,
                    schedule_points: r.schedule_points,
                    wall_time_ns: r.wall_time.as_nanos() as u64,
                });
                Ok(())
            }
            Err(e @ Error::WidthExceeded { width, .. }) => {
                result.write(VbSolveResult {
                    omega_observed: width,
                    ..VbSolveResult::default()
                });
                Err(e.into())
            }
            Err(e) => Err(e.into()),
        }
    })
}

/// Clique number of the narrowed-interval graph.
///
/// # Safety
/// `inst` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vb_omega(inst: *const VbInstance, out: *mut usize) -> VbStatus {
    guard(|| put(out, varbound::omega_sweep(instance_ref(inst)?), "out"))
}

/// Exhaustive maximum over all `2^n` vertices (n <= 25).
///
/// # Safety
/// As for [`vb_solve`].
#[no_mangle]
pub unsafe extern "C" fn vb_brute_force_max(
    inst: *const VbInstance,
    out: *mut f64,
    argmax: *mut i8,
    argmax_len: usize,
) -> VbStatus {
    guard(|| {
        let x = instance_ref(inst)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let (v, s) = varbound::brute_force_max(x)?;
        write_signs(&s, argmax, argmax_len)?;
        out.write(v);
        Ok(())
    })
}

/// Variance of the vertex selected by `signs` (`n` entries of `-1`/`+1`).
///
/// # Safety
/// `signs` must hold `n` readable bytes and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn vb_variance_at(
    inst: *const VbInstance,
    signs: *const i8,
    n: usize,
    out: *mut f64,
) -> VbStatus {
    guard(|| {
        let x = instance_ref(inst)?;
        if signs.is_null() {
            return Err(null("signs"));
        }
        let s = SignVector::new(slice::from_raw_parts(signs, n).to_vec())?;
        put(out, varbound::variance_direct(x, &s)?, "out")
    })
}

unsafe fn scalar(out: *mut f64, f: impl FnOnce() -> varbound::Result<f64>) -> VbStatus {
    guard(|| put(out, f()?, "out"))
}

/// `max(1, 8 L (1 + gamma) / eps)`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn vb_alpha(lipschitz: f64, gamma: f64, eps: f64, out: *mut f64) -> VbStatus {
    scalar(out, || {
        Ok(bounds::BoundParams::new(lipschitz, gamma, eps)?.alpha)
    })
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn vb_k_n(n: u64, out: *mut f64) -> VbStatus {
    scalar(out, || bounds::k_n(n))
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn vb_expected_omega_bound(n: u64, out: *mut f64) -> VbStatus {
    scalar(out, || bounds::expected_omega_bound(n))
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn vb_expected_two_omega_bound(n: u64, out: *mut f64) -> VbStatus {
    scalar(out, || bounds::expected_two_omega_bound(n))
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn vb_tail_omega_bound(n: u64, out: *mut f64) -> VbStatus {
    scalar(out, || bounds::tail_omega_bound(n))
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn vb_binomial_tail_bound(
    n: u64,
    p: f64,
    kappa: f64,
    out: *mut f64,
) -> VbStatus {
    scalar(out, || bounds::binomial_tail_bound(n, p, kappa))
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn vb_u_ell(n: u64, alpha: f64, ell: u64, out: *mut f64) -> VbStatus {
    scalar(out, || bounds::u_ell(n, alpha, ell))
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn vb_zeta_n(n: u64, alpha: f64, c: f64, out: *mut f64) -> VbStatus {
    scalar(out, || bounds::zeta_n(n, alpha, c))
}
