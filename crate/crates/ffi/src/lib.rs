//! C ABI over `heston-wings`.
//!
//! Every function returns an [`HwStatus`] and writes its result through an
//! out-pointer. On failure the out-pointer is left untouched and
//! [`hw_last_error_message`] describes the error on the calling thread.
//! Models are opaque [`HwModel`] handles released with [`hw_model_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use heston_wings::criticality::{critical_point, explosion_time};
use heston_wings::reference::{
    bs_call, call_price_numeric, density_numeric_log, implied_vol, ContourSpec, DampingSpec,
};
use heston_wings::smile::{exact_implied_vol, smile_coeffs};
use heston_wings::tails::{tail_constants_at, GAMMA_QUAD_TOL};
use heston_wings::{Error, EvalContext, ModelParams, Side};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HwStatus {
    Ok = 0,
    DomainError = 1,
    ExplodedError = 2,
    BranchError = 3,
    ToleranceError = 4,
    NoExplosionError = 5,
    ConvergenceError = 6,
    StripError = 7,
    NegativeMassError = 8,
    ArbitrageError = 9,
    BoundsError = 10,
    NullPointer = 11,
    Panic = 12,
}

impl From<&Error> for HwStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => HwStatus::DomainError,
            Error::Exploded { .. } => HwStatus::ExplodedError,
            Error::Branch(_) => HwStatus::BranchError,
            Error::Tolerance(_) => HwStatus::ToleranceError,
            Error::NoExplosion(_) => HwStatus::NoExplosionError,
            Error::Convergence(_) => HwStatus::ConvergenceError,
            Error::Strip { .. } => HwStatus::StripError,
            Error::NegativeMass { .. } => HwStatus::NegativeMassError,
            Error::Arbitrage { .. } => HwStatus::ArbitrageError,
            Error::Bounds { .. } => HwStatus::BoundsError,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HwSide {
    Upper = 0,
    Lower = 1,
}

impl From<HwSide> for Side {
    fn from(s: HwSide) -> Self {
        match s {
            HwSide::Upper => Side::Upper,
            HwSide::Lower => Side::Lower,
        }
    }
}

/// Opaque model handle: coefficients plus maturity.
pub struct HwModel {
    params: ModelParams,
    ctx: EvalContext,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HwCriticalPoint {
    pub s_crit: f64,
    pub sigma: f64,
    pub kappa: f64,
    pub dtstar_ds: f64,
}

/// `D(x) ~ c1 x^{-/+c3} exp(c2 sqrt|log x|) |log x|^power_exp`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HwTailConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub beta: f64,
    pub gamma_const: f64,
    pub power_exp: f64,
}

/// `sigma sqrt(T) ~ c_sqrt |k|^{1/2} + c_const + c_log log|k| / |k|^{1/2}`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HwSmileCoeffs {
    pub c_sqrt: f64,
    pub c_const: f64,
    pub c_log: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

/// Runs `f`, storing its value in `out`; converts errors and panics to codes.
fn guard<T>(out: *mut T, f: impl FnOnce() -> Result<T, Error>) -> HwStatus {
    if out.is_null() {
        set_last_error("output pointer is null");
        return HwStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            // SAFETY: checked non-null; the caller guarantees it is writable
            unsafe { out.write(v) };
            set_last_error("");
            HwStatus::Ok
        }
        Ok(Err(e)) => {
            set_last_error(&e.to_string());
            HwStatus::from(&e)
        }
        Err(_) => {
            set_last_error("internal panic");
            HwStatus::Panic
        }
    }
}

/// # Safety
/// `model` must be null or a live handle from this library.
unsafe fn model_ref<'a>(model: *const HwModel) -> Result<&'a HwModel, HwStatus> {
    // SAFETY: forwarded to the caller
    unsafe { model.as_ref() }.ok_or_else(|| {
        set_last_error("model handle is null");
        HwStatus::NullPointer
    })
}

fn new_model(params: Result<ModelParams, Error>, maturity: f64) -> Result<*mut HwModel, Error> {
    let model = HwModel {
        params: params?,
        ctx: EvalContext::new(maturity)?,
    };
    Ok(Box::into_raw(Box::new(model)))
}

/// Creates a model from `(a, b, c, rho, v0)` and a maturity.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn hw_model_new(
    a: f64,
    b: f64,
    c: f64,
    rho: f64,
    v0: f64,
    maturity: f64,
    out: *mut *mut HwModel,
) -> HwStatus {
    guard(out, || new_model(ModelParams::new(a, b, c, rho, v0), maturity))
}

/// Creates a model from `(vbar, lambda, c, rho, v0)`: `a = vbar lambda`, `b = -lambda`.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn hw_model_from_mean_reversion(
    vbar: f64,
    lambda: f64,
    c: f64,
    rho: f64,
    v0: f64,
    maturity: f64,
    out: *mut *mut HwModel,
) -> HwStatus {
    guard(out, || {
        new_model(ModelParams::from_mean_reversion(vbar, lambda, c, rho, v0), maturity)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hw_model_free(model: *mut HwModel) {
    if !model.is_null() {
        // SAFETY: the handle came from Box::into_raw and is freed once
        drop(unsafe { Box::from_raw(model) });
    }
}

macro_rules! with_model {
    ($model:expr) => {
        // SAFETY: the caller passes a live handle or null
        match unsafe { model_ref($model) } {
            Ok(m) => m,
            Err(status) => return status,
        }
    };
}

/// Explosion time of the moment of order `s` (`+inf` if it never explodes).
///
/// # Safety
/// `model` must be null or live; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn hw_explosion_time(model: *const HwModel, s: f64, out: *mut f64) -> HwStatus {
    let m = with_model!(model);
    guard(out, || Ok(explosion_time(&m.params, s)))
}

/// # Safety
/// `model` must be null or live; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn hw_critical_point(model: *const HwModel, side: HwSide, out: *mut HwCriticalPoint) -> HwStatus {
    let m = with_model!(model);
    guard(out, || {
        let cp = critical_point(&m.params, &m.ctx, side.into())?;
        Ok(HwCriticalPoint {
            s_crit: cp.s_crit,
            sigma: cp.sigma,
            kappa: cp.kappa,
            dtstar_ds: cp.dtstar_ds,
        })
    })
}

fn tails(m: &HwModel, side: HwSide) -> Result<heston_wings::TailConstants, Error> {
    let cp = critical_point(&m.params, &m.ctx, side.into())?;
    tail_constants_at(&m.params, &m.ctx, &cp, GAMMA_QUAD_TOL)
}

/// # Safety
/// `model` must be null or live; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn hw_tail_constants(model: *const HwModel, side: HwSide, out: *mut HwTailConstants) -> HwStatus {
    let m = with_model!(model);
    guard(out, || {
        let tc = tails(m, side)?;
        Ok(HwTailConstants {
            c1: tc.c1,
            c2: tc.c2,
            c3: tc.c3,
            beta: tc.beta,
            gamma_const: tc.gamma_const,
            power_exp: tc.power_exp,
        })
    })
}

/// # Safety
/// `model` must be null or live; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn hw_smile_coeffs(model: *const HwModel, side: HwSide, out: *mut HwSmileCoeffs) -> HwStatus {
    let m = with_model!(model);
    guard(out, || {
        let co = smile_coeffs(&tails(m, side)?, &m.params)?;
        Ok(HwSmileCoeffs {
            c_sqrt: co.c_sqrt,
            c_const: co.c_const,
            c_log: co.c_log,
        })
    })
}

/// `log D_T(x)` at `log x = log_x` by Mellin inversion along the saddle contour.
///
/// # Safety
/// `model` must be null or live; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn hw_density_log(model: *const HwModel, log_x: f64, quad_tol: f64, out: *mut f64) -> HwStatus {
    let m = with_model!(model);
    let spec = ContourSpec {
        quad_tol,
        ..ContourSpec::default()
    };
    guard(out, || density_numeric_log(&m.params, &m.ctx, log_x, &spec))
}

/// Undiscounted call on a unit forward with strike `e^k`, default damping.
///
/// # Safety
/// `model` must be null or live; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn hw_call_price(model: *const HwModel, k: f64, quad_tol: f64, out: *mut f64) -> HwStatus {
    let m = with_model!(model);
    let spec = DampingSpec {
        quad_tol,
        ..DampingSpec::default()
    };
    guard(out, || call_price_numeric(&m.params, &m.ctx, k, &spec))
}

/// Black-Scholes implied volatility of the model at log-strike `k`.
///
/// # Safety
/// `model` must be null or live; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn hw_model_implied_vol(model: *const HwModel, k: f64, quad_tol: f64, out: *mut f64) -> HwStatus {
    let m = with_model!(model);
    let spec = DampingSpec {
        quad_tol,
        ..DampingSpec::default()
    };
    guard(out, || exact_implied_vol(&m.params, &m.ctx, k, &spec))
}

/// Black-Scholes implied volatility of an undiscounted call price.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn hw_implied_vol(call_price: f64, k: f64, maturity: f64, out: *mut f64) -> HwStatus {
    guard(out, || implied_vol(call_price, k, maturity, None))
}

/// Undiscounted Black-Scholes call on a unit forward.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn hw_bs_call(k: f64, vol: f64, maturity: f64, out: *mut f64) -> HwStatus {
    guard(out, || bs_call(k, vol, maturity))
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn hw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Stable name of a status code, e.g. `"DomainError"`. Static storage.
#[no_mangle]
pub extern "C" fn hw_status_name(status: HwStatus) -> *const c_char {
    let name: &'static CStr = match status {
        HwStatus::Ok => c"Ok",
        HwStatus::DomainError => c"DomainError",
        HwStatus::ExplodedError => c"ExplodedError",
        HwStatus::BranchError => c"BranchError",
        HwStatus::ToleranceError => c"ToleranceError",
        HwStatus::NoExplosionError => c"NoExplosionError",
        HwStatus::ConvergenceError => c"ConvergenceError",
        HwStatus::StripError => c"StripError",
        HwStatus::NegativeMassError => c"NegativeMassError",
        HwStatus::ArbitrageError => c"ArbitrageError",
        HwStatus::BoundsError => c"BoundsError",
        HwStatus::NullPointer => c"NullPointer",
        HwStatus::Panic => c"Panic",
    };
    name.as_ptr()
}
