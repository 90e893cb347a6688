//! C ABI over the `pretentious` library.
//!
//! Every entry point returns a `PL_*` status code and writes results through
//! out-pointers. On failure, `pl_last_error_message` describes the most
//! recent error on the calling thread. Handles are opaque and must be
//! released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use pretentious::arith::{eval_cm, PrimeAssignment, SpfTable};
use pretentious::dirichlet::{comb_log_derivative, lambda_k_table};
use pretentious::distance::{bound_exponent_b, distance_sq_with, halasz_m_with, q_sub_t};
use pretentious::sums::{partial_sum_with, SumRequest};
use pretentious::{catalog_get, Error, FunctionSpec};

pub const PL_OK: i32 = 0;
pub const PL_ERR_NULL: i32 = 1;
pub const PL_ERR_ARGUMENT: i32 = 2;
pub const PL_ERR_CAPACITY: i32 = 3;
pub const PL_ERR_OUT_OF_RANGE: i32 = 4;
pub const PL_ERR_DIVERGENCE: i32 = 5;
pub const PL_ERR_ZERO_DENOMINATOR: i32 = 6;
pub const PL_ERR_UNKNOWN_FUNCTION: i32 = 7;
pub const PL_ERR_PARSE: i32 = 8;
pub const PL_ERR_BUFFER_TOO_SMALL: i32 = 9;
pub const PL_ERR_OTHER: i32 = 10;
pub const PL_ERR_PANIC: i32 = 11;

/// A complex number as two doubles.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for PlComplex {
    fn from(z: Complex64) -> Self {
        PlComplex { re: z.re, im: z.im }
    }
}

/// Opaque smallest-prime-factor table.
pub struct PlSpfTable {
    inner: SpfTable,
}

/// Opaque completely multiplicative function.
pub struct PlFunction {
    spec: FunctionSpec,
    inner: PrimeAssignment,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::Argument(_) | Error::OutsideUnitDisc { .. } | Error::Usage(_) => PL_ERR_ARGUMENT,
        Error::Capacity { .. } => PL_ERR_CAPACITY,
        Error::OutOfRange { .. } => PL_ERR_OUT_OF_RANGE,
        Error::Divergence { .. } => PL_ERR_DIVERGENCE,
        Error::ZeroDenominator(_) => PL_ERR_ZERO_DENOMINATOR,
        Error::UnknownFunction(_) => PL_ERR_UNKNOWN_FUNCTION,
        Error::Json(_) => PL_ERR_PARSE,
        _ => PL_ERR_OTHER,
    }
}

struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(code_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(PL_ERR_NULL, format!("{what} is null"))
}

/// Runs `body`, mapping errors and panics to status codes.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> i32 {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(String::new());
            PL_OK
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            PL_ERR_PANIC
        }
    }
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message for the last error on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn pl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds the table on `[lo, hi]`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn pl_spf_build(lo: u64, hi: u64, out: *mut *mut PlSpfTable) -> i32 {
    guard(|| {
        let t = SpfTable::build(lo, hi)?;
        put(out, Box::into_raw(Box::new(PlSpfTable { inner: t })))
    })
}

/// Smallest prime factor of `n`; writes 0 for `n = 1`.
///
/// # Safety
/// `table` must come from `pl_spf_build`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_spf_get(table: *const PlSpfTable, n: u64, out: *mut u64) -> i32 {
    guard(|| {
        let t = &deref(table, "table")?.inner;
        match t.spf(n) {
            Some(1) => put(out, 0),
            Some(p) => put(out, p),
            None => Err(Fail(PL_ERR_OUT_OF_RANGE, format!("{n} is outside [{}, {}]", t.lo(), t.limit()))),
        }
    })
}

/// # Safety
/// `table` must come from `pl_spf_build` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pl_spf_free(table: *mut PlSpfTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Factorizes `n` into `cap`-sized `primes` and `exponents` arrays;
/// `out_len` receives the number of distinct primes. When `cap` is too
/// small, `out_len` still receives the required length.
///
/// # Safety
/// `table` must come from `pl_spf_build`; the arrays must hold `cap` entries.
#[no_mangle]
pub unsafe extern "C" fn pl_factorize(
    table: *const PlSpfTable,
    n: u64,
    primes: *mut u64,
    exponents: *mut u32,
    cap: usize,
    out_len: *mut usize,
) -> i32 {
    guard(|| {
        let fac = deref(table, "table")?.inner.factorize(n)?;
        put(out_len, fac.pairs.len())?;
        if fac.pairs.len() > cap {
            return Err(Fail(PL_ERR_BUFFER_TOO_SMALL, format!("{} factors do not fit in {cap}", fac.pairs.len())));
        }
        if !fac.pairs.is_empty() && (primes.is_null() || exponents.is_null()) {
            return Err(null("factor array"));
        }
        for (i, &(p, e)) in fac.pairs.iter().enumerate() {
            primes.add(i).write(p);
            exponents.add(i).write(e);
        }
        Ok(())
    })
}

/// Parses a catalog function from its JSON description, e.g.
/// `{"name":"kronecker","params":{"d":5}}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_function_from_json(json: *const c_char, out: *mut *mut PlFunction) -> i32 {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let s = CStr::from_ptr(json).to_str().map_err(|e| Fail(PL_ERR_PARSE, e.to_string()))?;
        let spec = FunctionSpec::from_json(s)?;
        let inner = catalog_get(&spec)?;
        put(out, Box::into_raw(Box::new(PlFunction { spec, inner })))
    })
}

/// # Safety
/// `f` must come from `pl_function_from_json` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pl_function_free(f: *mut PlFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// `f(n)` through the factorization of `n`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_eval_cm(f: *const PlFunction, table: *const PlSpfTable, n: u64, out: *mut PlComplex) -> i32 {
    guard(|| {
        let v = eval_cm(&deref(f, "function")?.inner, n, &deref(table, "table")?.inner)?;
        put(out, v.into())
    })
}

/// `sum_{n <= x} f(n) (log n)^k`.
///
/// # Safety
/// `f` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_partial_sum(f: *const PlFunction, x: u64, k: u32, out: *mut PlComplex) -> i32 {
    guard(|| {
        let f = deref(f, "function")?;
        let mut req = SumRequest::new(f.spec.clone(), x);
        req.k = k;
        let r = partial_sum_with(&f.inner, &req)?;
        put(out, r.value.into())
    })
}

/// `sum_{y < p <= x} (1 - Re f(p) conj(g(p))) / p`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_distance_sq(f: *const PlFunction, g: *const PlFunction, y: u64, x: u64, out: *mut f64) -> i32 {
    guard(|| {
        let r = distance_sq_with(&deref(f, "f")?.inner, &deref(g, "g")?.inner, y, x)?;
        put(out, r.value)
    })
}

/// Halász functional `min_{|t| <= t_max} D^2(f, n^{it}; 1, x)` on a grid of
/// spacing `grid_step`; `out_t_star` may be null.
///
/// # Safety
/// `f` must be live; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_halasz_m(
    f: *const PlFunction,
    x: u64,
    t_max: f64,
    grid_step: f64,
    out_value: *mut f64,
    out_t_star: *mut f64,
) -> i32 {
    guard(|| {
        let m = halasz_m_with(&deref(f, "function")?.inner, x, t_max, grid_step)?;
        put(out_value, m.value)?;
        if !out_t_star.is_null() {
            out_t_star.write(m.t_star);
        }
        Ok(())
    })
}

/// `Q_t` for parameters `Q`, `A` and height `t`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_q_sub_t(q: f64, a: f64, t: f64, out: *mut f64) -> i32 {
    guard(|| put(out, q_sub_t(q, a, t)?))
}

/// Exponent `B(A)` for `A > 2`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_bound_exponent_b(a: f64, out: *mut f64) -> i32 {
    guard(|| put(out, bound_exponent_b(a)?))
}

/// `Lambda_k(n)` for `n <= 10^6`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_lambda_k(k: u32, n: u64, out: *mut f64) -> i32 {
    guard(|| {
        if n == 0 {
            return Err(Fail(PL_ERR_ARGUMENT, "n must be at least 1".into()));
        }
        put(out, lambda_k_table(k, n)?.get(n))
    })
}

/// `(-F'/F)^{(k-1)}(s)` from `derivs[0..len] = F(s), ..., F^{(k)}(s)`.
///
/// # Safety
/// `derivs` must hold `len` entries; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_comb_log_derivative(derivs: *const PlComplex, len: usize, out: *mut PlComplex) -> i32 {
    guard(|| {
        if derivs.is_null() {
            return Err(null("derivs"));
        }
        let d: Vec<Complex64> = std::slice::from_raw_parts(derivs, len).iter().map(|z| Complex64::new(z.re, z.im)).collect();
        put(out, comb_log_derivative(&d)?.into())
    })
}
