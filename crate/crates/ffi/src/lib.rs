//! C ABI for `diagapprox`.
//!
//! Rationals cross the boundary as `"num/den"` strings. Place sets and psi
//! functions are opaque handles. Every call returns a [`DaStatus`]; on failure
//! [`da_last_error`] describes what went wrong on the calling thread. Strings
//! written to `char **` out-parameters are owned by the caller and released
//! with [`da_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use diagapprox::arith::{format_rational, parse_rational};
use diagapprox::dirichlet::{dirichlet_approximate, LevelBallIndex};
use diagapprox::harness::montecarlo::mc_union_measure;
use diagapprox::metric::{build_approx_set, overlap_of_sets, ApproxSet, PsiFunction};
use diagapprox::{AdelicPoint, Error, PlaceSet, Rational};

/// Result code of every `da_*` call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    CapViolation = 5,
    DiagonalRational = 6,
    OutOfRange = 7,
    Internal = 8,
    Panic = 9,
}

/// Opaque set of places `{inf, p_1, ..., p_r}`.
pub struct DaPlaces(PlaceSet);

/// Opaque psi function.
pub struct DaPsi(PsiFunction);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> DaStatus {
    match e {
        Error::Parse(_) | Error::Config(_) => DaStatus::Parse,
        Error::CapViolation { .. } => DaStatus::CapViolation,
        Error::DiagonalRational => DaStatus::DiagonalRational,
        Error::OutOfRange(_) => DaStatus::OutOfRange,
        Error::Invariant(_) | Error::Io(_) | Error::Csv(_) | Error::Json(_) => DaStatus::Internal,
        _ => DaStatus::InvalidArgument,
    }
}

struct Fail(DaStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DaStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside diagapprox");
            DaStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(DaStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(DaStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(DaStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn rational(p: *const c_char, what: &str) -> Result<Rational, Fail> {
    Ok(parse_rational(text(p, what)?)?)
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(DaStatus::NullPointer, format!("{what} is null")));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String, what: &str) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(DaStatus::Internal, "string has a NUL byte".into()))?;
    put(out, c.into_raw(), what)
}

unsafe fn put_rational(out: *mut *mut c_char, q: &Rational, what: &str) -> Result<(), Fail> {
    put_string(out, format_rational(q), what)
}

fn set_for(places: &PlaceSet, psi: &PsiFunction, gamma: &Rational) -> Result<ApproxSet, Fail> {
    Ok(build_approx_set(&places.decompose(gamma)?, psi, places)?)
}

/// Message for the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn da_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned through a `char **` out-parameter.
///
/// # Safety
/// `s` is null or came from this library and has not been freed.
#[no_mangle]
pub unsafe extern "C" fn da_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the place set `{inf} ∪ primes`.
///
/// # Safety
/// `primes` points to `len` readable values; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn da_places_new(primes: *const u64, len: usize, out: *mut *mut DaPlaces) -> DaStatus {
    guard(|| {
        if primes.is_null() && len > 0 {
            return Err(Fail(DaStatus::NullPointer, "primes is null".into()));
        }
        let list = if len == 0 { &[][..] } else { std::slice::from_raw_parts(primes, len) };
        let p = PlaceSet::new(list)?;
        put(out, Box::into_raw(Box::new(DaPlaces(p))), "out")
    })
}

/// # Safety
/// `p` is null or a live handle from [`da_places_new`].
#[no_mangle]
pub unsafe extern "C" fn da_places_free(p: *mut DaPlaces) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// `psi(gamma) = c / (2 L(gamma))` with `0 <= c <= 1/2` given as a string.
///
/// # Safety
/// `c` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn da_psi_scaled_cap(c: *const c_char, out: *mut *mut DaPsi) -> DaStatus {
    guard(|| {
        let psi = PsiFunction::scaled_cap(rational(c, "c")?)?;
        put(out, Box::into_raw(Box::new(DaPsi(psi))), "out")
    })
}

/// `psi(gamma) = min(c / L(gamma)^theta, 1 / (2 L(gamma)))`.
///
/// # Safety
/// `c` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn da_psi_power(c: *const c_char, theta: u32, out: *mut *mut DaPsi) -> DaStatus {
    guard(|| {
        let psi = PsiFunction::power(rational(c, "c")?, theta)?;
        put(out, Box::into_raw(Box::new(DaPsi(psi))), "out")
    })
}

/// # Safety
/// `p` is null or a live handle from a `da_psi_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn da_psi_free(p: *mut DaPsi) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Level `l(gamma)` and `L(gamma)` of an element of `P^-1 Z`.
///
/// # Safety
/// Pointers are live and writable as their names say.
#[no_mangle]
pub unsafe extern "C" fn da_level(
    places: *const DaPlaces,
    gamma: *const c_char,
    level_out: *mut *mut c_char,
    big_l_out: *mut *mut c_char,
) -> DaStatus {
    guard(|| {
        let p = &borrow(places, "places")?.0;
        let g = p.decompose(&rational(gamma, "gamma")?)?;
        let big_l = p.big_l(&g)?;
        put_rational(level_out, &p.level(&g), "level_out")?;
        put_rational(big_l_out, &big_l, "big_l_out")
    })
}

/// `#Z_N = N prod p_i^n_i + 1`, or `OutOfRange` if it does not fit in 64 bits.
///
/// # Safety
/// `places` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn da_z_n_count(places: *const DaPlaces, n: u64, out: *mut u64) -> DaStatus {
    guard(|| {
        let p = &borrow(places, "places")?.0;
        let count = LevelBallIndex::new(p, n)?.z_n_count(p);
        let count = u64::try_from(&count).map_err(|_| Fail(DaStatus::OutOfRange, format!("#Z_N = {count}")))?;
        put(out, count, "out")
    })
}

/// Dirichlet approximant of `point` (comma-separated coordinates, infinite
/// place first) at level bound `n`: `gamma` with `0 < l(gamma) <= n` and
/// `d(gamma x, iota(beta)) <= M / n`.
///
/// # Safety
/// Pointers are live and writable as their names say.
#[no_mangle]
pub unsafe extern "C" fn da_dirichlet(
    places: *const DaPlaces,
    point: *const c_char,
    n: u64,
    beta_out: *mut *mut c_char,
    gamma_out: *mut *mut c_char,
    distance_out: *mut *mut c_char,
) -> DaStatus {
    guard(|| {
        let p = &borrow(places, "places")?.0;
        let coords = text(point, "point")?
            .split(',')
            .map(parse_rational)
            .collect::<Result<Vec<_>, _>>()?;
        let res = dirichlet_approximate(&AdelicPoint::new(coords), n, p)?;
        put_rational(beta_out, res.beta.value(), "beta_out")?;
        put_rational(gamma_out, res.gamma.value(), "gamma_out")?;
        put_rational(distance_out, &res.achieved_distance, "distance_out")
    })
}

/// Exact Haar measure of `A_gamma(psi)` with the bracket
/// `(upper / prod p_i, upper]`; `in_bounds` reports the strict bracket.
///
/// # Safety
/// Pointers are live and writable as their names say.
#[no_mangle]
pub unsafe extern "C" fn da_measure(
    places: *const DaPlaces,
    psi: *const DaPsi,
    gamma: *const c_char,
    exact_out: *mut *mut c_char,
    lower_out: *mut *mut c_char,
    upper_out: *mut *mut c_char,
    in_bounds: *mut bool,
) -> DaStatus {
    guard(|| {
        let p = &borrow(places, "places")?.0;
        let psi = &borrow(psi, "psi")?.0;
        let mb = set_for(p, psi, &rational(gamma, "gamma")?)?.measure_bounds();
        put_rational(exact_out, &mb.exact, "exact_out")?;
        put_rational(lower_out, &mb.lower, "lower_out")?;
        put_rational(upper_out, &mb.upper, "upper_out")?;
        put(in_bounds, mb.ok, "in_bounds")
    })
}

/// Exact measure of `A_beta ∩ A_gamma`.
///
/// # Safety
/// Pointers are live and writable as their names say.
#[no_mangle]
pub unsafe extern "C" fn da_overlap(
    places: *const DaPlaces,
    psi: *const DaPsi,
    beta: *const c_char,
    gamma: *const c_char,
    out: *mut *mut c_char,
) -> DaStatus {
    guard(|| {
        let p = &borrow(places, "places")?.0;
        let psi = &borrow(psi, "psi")?.0;
        let a = set_for(p, psi, &rational(beta, "beta")?)?;
        let b = set_for(p, psi, &rational(gamma, "gamma")?)?;
        put_rational(out, &overlap_of_sets(&a, &b), "out")
    })
}

/// Monte Carlo estimate of the measure of the union of `A_gamma` over the
/// comma-separated `gammas`. `digits = 0` selects the p-adic precision
/// automatically.
///
/// # Safety
/// Pointers are live and writable as their names say.
#[no_mangle]
pub unsafe extern "C" fn da_montecarlo(
    places: *const DaPlaces,
    psi: *const DaPsi,
    gammas: *const c_char,
    samples: u64,
    digits: u32,
    seed: u64,
    estimate: *mut f64,
    standard_error: *mut f64,
) -> DaStatus {
    guard(|| {
        let p = &borrow(places, "places")?.0;
        let psi = &borrow(psi, "psi")?.0;
        let sets = text(gammas, "gammas")?
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|g| set_for(p, psi, &parse_rational(g)?))
            .collect::<Result<Vec<_>, _>>()?;
        let digits = (digits > 0).then_some(digits);
        let est = mc_union_measure(&sets, p, samples, digits, seed)?;
        put(estimate, est.estimate, "estimate")?;
        put(standard_error, est.standard_error, "standard_error")
    })
}
