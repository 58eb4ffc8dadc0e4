//! C ABI over the `frit` library.
//!
//! Fields and decompositions cross the boundary as opaque handles owned by
//! the caller and released with the matching `_free`. Every fallible call
//! returns a [`FritStatus`]; the message of the most recent failure on the
//! calling thread is available from [`frit_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use frit::czd::{decompose, CzResult};
use frit::error::Error;
use frit::field::{lq_norm, distribution_measure, BoxDomain, GridField};
use frit::kernels::{gamma_beta, multiplier_symbol, KernelSpec};
use frit::testfield::{make_test_field, FieldSpec};
use frit::transform::{apply_direct, apply_spectral_padded, KernelPart};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FritStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Singularity = 3,
    Unsupported = 4,
    Geometry = 5,
    Numerical = 6,
    Io = 7,
    Panic = 8,
}

/// Which part of the kernel a direct application uses.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FritPart {
    Full = 0,
    Near = 1,
    Far = 2,
}

/// A sampled scalar field on a centred box.
pub struct FritField(GridField);

/// A Calderon-Zygmund decomposition of a field.
pub struct FritCz(CzResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FritStatus {
    match e {
        Error::Domain(_) | Error::Usage(_) | Error::LevelTooSmall(_) | Error::Format(_) | Error::Json(_) => {
            FritStatus::InvalidArgument
        }
        Error::Singularity(_) => FritStatus::Singularity,
        Error::Unsupported(_) => FritStatus::Unsupported,
        Error::Geometry(_) => FritStatus::Geometry,
        Error::Convention(_) | Error::Invariant(_) => FritStatus::Numerical,
        Error::Io(_) | Error::Csv(_) => FritStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), FritStatus>) -> FritStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FritStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside frit".into());
            FritStatus::Panic
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, FritStatus>;
}

impl<T> OrStatus<T> for frit::error::Result<T> {
    fn or_status(self) -> Result<T, FritStatus> {
        self.map_err(|e| {
            set_error(e.to_string());
            status_of(&e)
        })
    }
}

fn null() -> FritStatus {
    set_error("null pointer argument".into());
    FritStatus::NullPointer
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, FritStatus> {
    p.as_ref().ok_or_else(null)
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), FritStatus> {
    if out.is_null() {
        return Err(null());
    }
    *out = v;
    Ok(())
}

unsafe fn handle<T>(out: *mut *mut T, v: T) -> Result<(), FritStatus> {
    put(out, Box::into_raw(Box::new(v)))
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn frit_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Field of `samples^dim` row-major values copied from `values`.
///
/// # Safety
/// `values` must point to `samples^dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn frit_field_new(
    dim: usize,
    side: f64,
    samples: usize,
    values: *const f64,
    out: *mut *mut FritField,
) -> FritStatus {
    guard(|| {
        let d = BoxDomain::new(dim, side, samples).or_status()?;
        if values.is_null() {
            return Err(null());
        }
        let v = slice::from_raw_parts(values, d.len()).to_vec();
        handle(out, FritField(GridField::new(d, v).or_status()?))
    })
}

/// Synthetic field of the given kind (`gaussian_bump`, `multi_bump`,
/// `indicator_cube`, `band_limited_random`, `single_mode`). `params_json` is
/// a JSON object of parameters, or null for the defaults.
///
/// # Safety
/// `kind` and `params_json` (when non-null) must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn frit_field_make(
    dim: usize,
    side: f64,
    samples: usize,
    kind: *const c_char,
    params_json: *const c_char,
    out: *mut *mut FritField,
) -> FritStatus {
    guard(|| {
        if kind.is_null() {
            return Err(null());
        }
        let kind = CStr::from_ptr(kind).to_string_lossy();
        let params = if params_json.is_null() {
            serde_json::Value::Object(Default::default())
        } else {
            serde_json::from_slice(CStr::from_ptr(params_json).to_bytes())
                .map_err(Error::from)
                .or_status()?
        };
        let d = BoxDomain::new(dim, side, samples).or_status()?;
        let spec = FieldSpec::from_kind(&kind, &params).or_status()?;
        handle(out, FritField(make_test_field(&d, &spec).or_status()?))
    })
}

/// # Safety
/// `field` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn frit_field_free(field: *mut FritField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Number of samples in the field.
///
/// # Safety
/// `field` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn frit_field_len(field: *const FritField) -> usize {
    field.as_ref().map_or(0, |f| f.0.values().len())
}

/// Borrowed pointer to the row-major samples, valid while the handle lives.
///
/// # Safety
/// `field` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn frit_field_values(field: *const FritField) -> *const f64 {
    field.as_ref().map_or(ptr::null(), |f| f.0.values().as_ptr())
}

/// Spectral route with zero padding by `padding` (1 treats the field as
/// periodic).
///
/// # Safety
/// `field` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn frit_apply_spectral(
    field: *const FritField,
    component: usize,
    beta: f64,
    padding: usize,
    out: *mut *mut FritField,
) -> FritStatus {
    guard(|| {
        let f = &deref(field)?.0;
        let spec = KernelSpec::new(f.domain().dim(), component, beta).or_status()?;
        handle(out, FritField(apply_spectral_padded(f, &spec, padding).or_status()?))
    })
}

/// Direct (spatial convolution) route for the whole kernel or one part.
///
/// # Safety
/// `field` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn frit_apply_direct(
    field: *const FritField,
    component: usize,
    beta: f64,
    part: FritPart,
    out: *mut *mut FritField,
) -> FritStatus {
    guard(|| {
        let f = &deref(field)?.0;
        let spec = KernelSpec::new(f.domain().dim(), component, beta).or_status()?;
        let part = match part {
            FritPart::Full => KernelPart::Full,
            FritPart::Near => KernelPart::Near,
            FritPart::Far => KernelPart::Far,
        };
        handle(out, FritField(apply_direct(f, &spec, part, 2).or_status()?))
    })
}

/// `L^q` norm; pass `INFINITY` for the sup norm.
///
/// # Safety
/// `field` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn frit_lq_norm(field: *const FritField, q: f64, out: *mut f64) -> FritStatus {
    guard(|| put(out, lq_norm(&deref(field)?.0, q).or_status()?))
}

/// Measure of `{|f| > t}`.
///
/// # Safety
/// `field` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn frit_distribution_measure(field: *const FritField, t: f64, out: *mut f64) -> FritStatus {
    guard(|| put(out, distribution_measure(&deref(field)?.0, t).or_status()?))
}

/// Imaginary part of the multiplier constant (its real part is zero).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn frit_gamma_beta(dim: usize, beta: f64, out: *mut f64) -> FritStatus {
    guard(|| put(out, gamma_beta(dim, beta).or_status()?.im))
}

/// Multiplier of component `component` at frequency `y[0..dim]`, written as
/// `(re, im)` into `out[0..2]`.
///
/// # Safety
/// `y` must hold `dim` doubles and `out` two.
#[no_mangle]
pub unsafe extern "C" fn frit_multiplier_symbol(
    dim: usize,
    component: usize,
    beta: f64,
    y: *const f64,
    out: *mut f64,
) -> FritStatus {
    guard(|| {
        if y.is_null() || out.is_null() {
            return Err(null());
        }
        let spec = KernelSpec::new(dim, component, beta).or_status()?;
        let m = multiplier_symbol(slice::from_raw_parts(y, dim), &spec);
        *out = m.re;
        *out.add(1) = m.im;
        Ok(())
    })
}

/// Decomposition `f = g + b` at level `t`.
///
/// # Safety
/// `field` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn frit_czd_decompose(field: *const FritField, t: f64, out: *mut *mut FritCz) -> FritStatus {
    guard(|| handle(out, FritCz(decompose(&deref(field)?.0, t).or_status()?)))
}

/// # Safety
/// `cz` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn frit_czd_free(cz: *mut FritCz) {
    if !cz.is_null() {
        drop(Box::from_raw(cz));
    }
}

/// Number of selected cubes.
///
/// # Safety
/// `cz` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn frit_czd_num_cubes(cz: *const FritCz) -> usize {
    cz.as_ref().map_or(0, |c| c.0.cubes.len())
}

/// Copy of the good part.
///
/// # Safety
/// `cz` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn frit_czd_good(cz: *const FritCz, out: *mut *mut FritField) -> FritStatus {
    guard(|| handle(out, FritField(deref(cz)?.0.g.clone())))
}

/// Copy of the bad part.
///
/// # Safety
/// `cz` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn frit_czd_bad(cz: *const FritCz, out: *mut *mut FritField) -> FritStatus {
    guard(|| handle(out, FritField(deref(cz)?.0.b.clone())))
}
