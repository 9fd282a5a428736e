//! C ABI over polyacc. Objects are opaque heap handles; every fallible call returns
//! a status code and leaves a message retrievable with `pa_last_error`.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use polyacc::decide::{decide_complex, Status};
use polyacc::{Dag, Polynomial};

pub const PA_OK: i32 = 0;
pub const PA_ERR_NULL: i32 = 1;
pub const PA_ERR_UTF8: i32 = 2;
pub const PA_ERR_PARSE: i32 = 3;
pub const PA_ERR_DIMENSION: i32 = 4;
pub const PA_ERR_HYPOTHESIS: i32 = 5;
pub const PA_ERR_INTERNAL: i32 = 6;

pub const PA_STATUS_EVALUABLE: i32 = 0;
pub const PA_STATUS_NOT_EVALUABLE: i32 = 1;
pub const PA_STATUS_UNKNOWN: i32 = 2;

/// Opaque polynomial handle.
pub struct PaPoly(Polynomial);

/// Opaque DAG handle.
pub struct PaDag(Dag);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(code: i32, msg: &str) -> i32 {
    set_error(msg);
    code
}

fn guarded(f: impl FnOnce() -> i32) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => {
            if code == PA_OK {
                set_error("");
            }
            code
        }
        Err(_) => fail(PA_ERR_INTERNAL, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, i32> {
    if p.is_null() {
        return Err(fail(PA_ERR_NULL, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(PA_ERR_UTF8, "argument is not valid UTF-8"))
}

fn to_c_string(s: &str) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Message of the last failed call on this thread ("" after a success). The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn pa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses `text` as a polynomial in x1..x{nvars}.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pa_poly_parse(text: *const c_char, nvars: usize, out: *mut *mut PaPoly) -> i32 {
    guarded(|| {
        if out.is_null() {
            return fail(PA_ERR_NULL, "null output pointer");
        }
        *out = ptr::null_mut();
        let t = match str_arg(text) {
            Ok(t) => t,
            Err(code) => return code,
        };
        match polyacc::parse_polynomial(t, nvars) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(PaPoly(p)));
                PA_OK
            }
            Err(e) => fail(PA_ERR_PARSE, &e.to_string()),
        }
    })
}

/// # Safety
/// `p` must come from this library and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pa_poly_free(p: *mut PaPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Canonical text of the polynomial; release with `pa_string_free`.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pa_poly_to_string(p: *const PaPoly, out: *mut *mut c_char) -> i32 {
    guarded(|| {
        if p.is_null() || out.is_null() {
            return fail(PA_ERR_NULL, "null argument");
        }
        *out = to_c_string(&(*p).0.to_string());
        PA_OK
    })
}

/// Number of variables of the polynomial (0 for null).
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pa_poly_nvars(p: *const PaPoly) -> usize {
    if p.is_null() {
        0
    } else {
        (*p).0.nvars()
    }
}

/// Binary64 evaluation at `x[0..n]`.
///
/// # Safety
/// `x` must point to `n` doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn pa_poly_eval_f64(p: *const PaPoly, x: *const f64, n: usize, out: *mut f64) -> i32 {
    guarded(|| {
        if p.is_null() || out.is_null() || (x.is_null() && n > 0) {
            return fail(PA_ERR_NULL, "null argument");
        }
        let xs = if n == 0 { &[][..] } else { std::slice::from_raw_parts(x, n) };
        match (*p).0.eval_f64(xs) {
            Ok(v) => {
                *out = v;
                PA_OK
            }
            Err(e) => fail(PA_ERR_DIMENSION, &e.to_string()),
        }
    })
}

/// # Safety
/// `s` must come from this library; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Complex-case decision. `status` receives a PA_STATUS_* value; `certificate`
/// (optional) receives the certificate text, released with `pa_string_free`.
///
/// # Safety
/// `p` must be a live handle; `status` writable; `certificate` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pa_decide_complex(p: *const PaPoly, status: *mut i32, certificate: *mut *mut c_char) -> i32 {
    guarded(|| {
        if p.is_null() || status.is_null() {
            return fail(PA_ERR_NULL, "null argument");
        }
        if !certificate.is_null() {
            *certificate = ptr::null_mut();
        }
        match decide_complex(&(*p).0) {
            Ok(v) => {
                *status = match v.status {
                    Status::Evaluable => PA_STATUS_EVALUABLE,
                    Status::NotEvaluable => PA_STATUS_NOT_EVALUABLE,
                    Status::Unknown => PA_STATUS_UNKNOWN,
                };
                if !certificate.is_null() {
                    *certificate = to_c_string(&v.to_string());
                }
                PA_OK
            }
            Err(e) => fail(PA_ERR_HYPOTHESIS, &e.to_string()),
        }
    })
}

/// Parses a DAG in the text format and validates it.
///
/// # Safety
/// `text` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pa_dag_parse(text: *const c_char, out: *mut *mut PaDag) -> i32 {
    guarded(|| {
        if out.is_null() {
            return fail(PA_ERR_NULL, "null output pointer");
        }
        *out = ptr::null_mut();
        let t = match str_arg(text) {
            Ok(t) => t,
            Err(code) => return code,
        };
        let d = match Dag::parse(t) {
            Ok(d) => d,
            Err(e) => return fail(PA_ERR_PARSE, &e.to_string()),
        };
        let diags = d.validate();
        if let Some(first) = diags.first() {
            return fail(PA_ERR_PARSE, &first.to_string());
        }
        *out = Box::into_raw(Box::new(PaDag(d)));
        PA_OK
    })
}

/// # Safety
/// `d` must come from this library and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pa_dag_free(d: *mut PaDag) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Rounded evaluation in binary64 with δ given per node id; unlisted nodes get δ = 0.
///
/// # Safety
/// `x` must hold `nx` doubles; `ids`/`deltas` must each hold `nd` entries.
#[no_mangle]
pub unsafe extern "C" fn pa_dag_eval_rounded_f64(
    d: *const PaDag,
    x: *const f64,
    nx: usize,
    ids: *const u32,
    deltas: *const f64,
    nd: usize,
    out: *mut f64,
) -> i32 {
    guarded(|| {
        if d.is_null() || out.is_null() || (x.is_null() && nx > 0) || (nd > 0 && (ids.is_null() || deltas.is_null())) {
            return fail(PA_ERR_NULL, "null argument");
        }
        let dag = &(*d).0;
        let xs = if nx == 0 { &[][..] } else { std::slice::from_raw_parts(x, nx) };
        if xs.len() != dag.nvars {
            return fail(PA_ERR_DIMENSION, &format!("expected {} inputs, got {}", dag.nvars, xs.len()));
        }
        let mut map: BTreeMap<u32, f64> = dag.rounded_ids().into_iter().map(|id| (id, 0.0)).collect();
        if nd > 0 {
            let is = std::slice::from_raw_parts(ids, nd);
            let ds = std::slice::from_raw_parts(deltas, nd);
            for (&i, &v) in is.iter().zip(ds) {
                map.insert(i, v);
            }
        }
        match dag.eval_rounded_f64(xs, &map) {
            Ok(v) => {
                *out = v;
                PA_OK
            }
            Err(e) => fail(PA_ERR_INTERNAL, &e.to_string()),
        }
    })
}

/// The polynomial the DAG computes with every δ = 0.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pa_dag_extract(d: *const PaDag, out: *mut *mut PaPoly) -> i32 {
    guarded(|| {
        if d.is_null() || out.is_null() {
            return fail(PA_ERR_NULL, "null argument");
        }
        *out = ptr::null_mut();
        match (*d).0.extract_polynomial() {
            Ok(p) => {
                *out = Box::into_raw(Box::new(PaPoly(p)));
                PA_OK
            }
            Err(e) => fail(PA_ERR_INTERNAL, &e.to_string()),
        }
    })
}
