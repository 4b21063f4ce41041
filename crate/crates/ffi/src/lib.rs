//! C ABI for the casimir library.
//!
//! Handles are opaque pointers created and destroyed by this library;
//! fallible calls return a [`CasimirStatus`] and write results through out
//! pointers. The most recent error message of the calling thread is
//! available from [`casimir_last_error`]. The generated C header lives in
//! `include/casimir.h`.

// Negated float comparisons like `!(x > 0.0)` deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;

use casimir::lifshitz::{
    casimir_force_t0, casimir_force_thermal, eta_c, ideal_force, LifshitzError,
    SpherePlateGeometry,
};
use casimir::optics::{
    load_optical_table, DrudeParams, InfraredParams, OpticsError, PermittivityModel,
};
use casimir::roughness::{
    force_rough_averaged, load_histogram, stochastic_stats, RoughnessHistogram,
};
use casimir::stats::student_threshold;

/// Call outcome. Anything other than `Ok` leaves the out parameters
/// untouched and stores a message retrievable via `casimir_last_error`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CasimirStatus {
    Ok = 0,
    /// Quadrature or series failed to converge.
    NumericalError = 1,
    /// Domain, format or model-validity violation.
    InvalidInput = 2,
    /// A required pointer argument was null.
    NullPointer = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl std::fmt::Display) {
    let cleaned = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(cleaned).unwrap_or_default();
    });
}

fn classify_lifshitz(e: &LifshitzError) -> CasimirStatus {
    match e {
        LifshitzError::Quadrature(_) | LifshitzError::MatsubaraDivergent { .. } => {
            CasimirStatus::NumericalError
        }
        LifshitzError::Optics(inner) => classify_optics(inner),
        _ => CasimirStatus::InvalidInput,
    }
}

fn classify_optics(e: &OpticsError) -> CasimirStatus {
    match e {
        OpticsError::Quadrature(_) => CasimirStatus::NumericalError,
        _ => CasimirStatus::InvalidInput,
    }
}

/// Opaque dielectric-model handle.
pub struct CasimirModel {
    inner: PermittivityModel,
}

/// Opaque roughness-histogram handle.
pub struct CasimirHistogram {
    inner: RoughnessHistogram,
}

/// Most recent error message of the calling thread. The pointer stays
/// valid until the next failing call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn casimir_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn casimir_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// New Drude-model handle: eps(i xi) = 1 + wp^2/(xi(xi+gamma)), rad/s.
#[no_mangle]
pub extern "C" fn casimir_model_drude(omega_p: f64, gamma: f64) -> *mut CasimirModel {
    if !(omega_p > 0.0) || gamma < 0.0 {
        set_error("drude parameters require omega_p > 0 and gamma >= 0");
        return std::ptr::null_mut();
    }
    Box::into_raw(Box::new(CasimirModel {
        inner: PermittivityModel::Drude(DrudeParams { omega_p, gamma }),
    }))
}

/// New plasma-model handle: eps(i xi) = 1 + wp^2/xi^2.
#[no_mangle]
pub extern "C" fn casimir_model_plasma(omega_p: f64) -> *mut CasimirModel {
    if !(omega_p > 0.0) {
        set_error("plasma model requires omega_p > 0");
        return std::ptr::null_mut();
    }
    Box::into_raw(Box::new(CasimirModel {
        inner: PermittivityModel::Plasma { omega_p },
    }))
}

/// New infrared-optics model handle with relaxation nu = wp(c1 + c2 w^2/wp^2).
#[no_mangle]
pub extern "C" fn casimir_model_infrared(omega_p: f64, c1: f64, c2: f64) -> *mut CasimirModel {
    if !(omega_p > 0.0) || c1 < 0.0 || c2 < 0.0 {
        set_error("infrared model requires omega_p > 0 and non-negative c1, c2");
        return std::ptr::null_mut();
    }
    Box::into_raw(Box::new(CasimirModel {
        inner: PermittivityModel::Infrared(InfraredParams { omega_p, c1, c2 }),
    }))
}

/// New tabulated-model handle from an optical data file (`omega_or_energy,
/// n, k` rows). The Drude parameters close the table below its lowest
/// frequency unless the file carries its own `# extension:` directive.
/// Returns null on failure.
///
/// # Safety
/// `path` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn casimir_model_tabulated_from_file(
    path: *const c_char,
    ext_omega_p: f64,
    ext_gamma: f64,
) -> *mut CasimirModel {
    if path.is_null() {
        set_error("path is null");
        return std::ptr::null_mut();
    }
    let path = match CStr::from_ptr(path).to_str() {
        Ok(s) => PathBuf::from(s),
        Err(_) => {
            set_error("path is not valid UTF-8");
            return std::ptr::null_mut();
        }
    };
    match load_optical_table(
        &path,
        DrudeParams {
            omega_p: ext_omega_p,
            gamma: ext_gamma,
        },
    ) {
        Ok(table) => Box::into_raw(Box::new(CasimirModel {
            inner: PermittivityModel::tabulated(table),
        })),
        Err(e) => {
            set_error(format!("{}: {e}", path.display()));
            std::ptr::null_mut()
        }
    }
}

/// Destroy a model handle (accepts null).
///
/// # Safety
/// `model` must be a pointer returned by one of the model constructors and
/// not freed before.
#[no_mangle]
pub unsafe extern "C" fn casimir_model_free(model: *mut CasimirModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Destroy a histogram handle (accepts null).
///
/// # Safety
/// `histogram` must come from `casimir_histogram_from_file` and not be
/// freed before.
#[no_mangle]
pub unsafe extern "C" fn casimir_histogram_free(histogram: *mut CasimirHistogram) {
    if !histogram.is_null() {
        drop(Box::from_raw(histogram));
    }
}

/// eps(i xi) of a model at imaginary frequency xi (rad/s).
///
/// # Safety
/// `model` and `out_eps` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn casimir_eps_imaginary(
    model: *const CasimirModel,
    xi: f64,
    out_eps: *mut f64,
) -> CasimirStatus {
    if model.is_null() || out_eps.is_null() {
        set_error("null pointer argument");
        return CasimirStatus::NullPointer;
    }
    match (*model).inner.eps_at(xi) {
        Ok(v) => {
            *out_eps = v;
            CasimirStatus::Ok
        }
        Err(e) => {
            set_error(&e);
            classify_optics(&e)
        }
    }
}

/// Sphere-plate Casimir force in N (negative = attractive) at separation
/// `z` (m) for sphere radius `radius` (m). `temperature` is in K; values
/// <= 0 select the zero-temperature Lifshitz integral. `out_quad_error`
/// may be null.
///
/// # Safety
/// `model` and `out_force` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn casimir_force(
    model: *const CasimirModel,
    z: f64,
    radius: f64,
    temperature: f64,
    out_force: *mut f64,
    out_quad_error: *mut f64,
) -> CasimirStatus {
    if model.is_null() || out_force.is_null() {
        set_error("null pointer argument");
        return CasimirStatus::NullPointer;
    }
    let g = match SpherePlateGeometry::new(z, radius) {
        Ok(g) => g,
        Err(e) => {
            set_error(&e);
            return CasimirStatus::InvalidInput;
        }
    };
    let result = if temperature > 0.0 {
        casimir_force_thermal(&g, &(*model).inner, temperature)
    } else {
        casimir_force_t0(&g, &(*model).inner)
    };
    match result {
        Ok(f) => {
            *out_force = f.value;
            if !out_quad_error.is_null() {
                *out_quad_error = f.quad_error;
            }
            CasimirStatus::Ok
        }
        Err(e) => {
            set_error(&e);
            classify_lifshitz(&e)
        }
    }
}

/// Finite-conductivity correction factor eta_c = F/F0 at separation z.
///
/// # Safety
/// `model` and `out_eta` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn casimir_eta(
    model: *const CasimirModel,
    z: f64,
    radius: f64,
    out_eta: *mut f64,
) -> CasimirStatus {
    if model.is_null() || out_eta.is_null() {
        set_error("null pointer argument");
        return CasimirStatus::NullPointer;
    }
    let g = match SpherePlateGeometry::new(z, radius) {
        Ok(g) => g,
        Err(e) => {
            set_error(&e);
            return CasimirStatus::InvalidInput;
        }
    };
    match eta_c(&g, &(*model).inner) {
        Ok(f) => {
            *out_eta = f.value;
            CasimirStatus::Ok
        }
        Err(e) => {
            set_error(&e);
            classify_lifshitz(&e)
        }
    }
}

/// Ideal-metal force F0(z) = -pi^3 hbar c R/(360 z^3), N.
///
/// # Safety
/// `out_force` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn casimir_ideal_force(
    z: f64,
    radius: f64,
    out_force: *mut f64,
) -> CasimirStatus {
    if out_force.is_null() {
        set_error("null pointer argument");
        return CasimirStatus::NullPointer;
    }
    match SpherePlateGeometry::new(z, radius) {
        Ok(g) => {
            *out_force = ideal_force(&g);
            CasimirStatus::Ok
        }
        Err(e) => {
            set_error(&e);
            CasimirStatus::InvalidInput
        }
    }
}

/// Load a roughness histogram file (`height_nm, fraction` rows). Returns
/// null on failure.
///
/// # Safety
/// `path` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn casimir_histogram_from_file(path: *const c_char) -> *mut CasimirHistogram {
    if path.is_null() {
        set_error("path is null");
        return std::ptr::null_mut();
    }
    let path = match CStr::from_ptr(path).to_str() {
        Ok(s) => PathBuf::from(s),
        Err(_) => {
            set_error("path is not valid UTF-8");
            return std::ptr::null_mut();
        }
    };
    match load_histogram(&path) {
        Ok(h) => Box::into_raw(Box::new(CasimirHistogram { inner: h })),
        Err(e) => {
            set_error(format!("{}: {e}", path.display()));
            std::ptr::null_mut()
        }
    }
}

/// Roughness statistics of a histogram, all in m: zero level H0, amplitude
/// A = h_max - H0, standard deviation delta_st, stochastic amplitude
/// A_st = sqrt(2) delta_st. Out pointers may individually be null.
///
/// # Safety
/// `histogram` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn casimir_roughness_stats(
    histogram: *const CasimirHistogram,
    out_h0: *mut f64,
    out_amplitude: *mut f64,
    out_delta_st: *mut f64,
    out_a_st: *mut f64,
) -> CasimirStatus {
    if histogram.is_null() {
        set_error("null pointer argument");
        return CasimirStatus::NullPointer;
    }
    let s = stochastic_stats(&(*histogram).inner);
    if !out_h0.is_null() {
        *out_h0 = s.h0;
    }
    if !out_amplitude.is_null() {
        *out_amplitude = s.amplitude;
    }
    if !out_delta_st.is_null() {
        *out_delta_st = s.delta_st;
    }
    if !out_a_st.is_null() {
        *out_a_st = s.a_st;
    }
    CasimirStatus::Ok
}

/// Casimir force geometrically averaged over the roughness histogram
/// (used for both bodies), N.
///
/// # Safety
/// `model`, `histogram` and `out_force` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn casimir_rough_averaged_force(
    model: *const CasimirModel,
    histogram: *const CasimirHistogram,
    z: f64,
    radius: f64,
    temperature: f64,
    out_force: *mut f64,
) -> CasimirStatus {
    if model.is_null() || histogram.is_null() || out_force.is_null() {
        set_error("null pointer argument");
        return CasimirStatus::NullPointer;
    }
    let hist = &(*histogram).inner;
    let model = &(*model).inner;
    // errors inside the averaging closure are parked and surfaced after
    let pending: RefCell<Option<LifshitzError>> = RefCell::new(None);
    let force_fn = |s: f64| -> f64 {
        let result = SpherePlateGeometry::new(s, radius).and_then(|g| {
            if temperature > 0.0 {
                casimir_force_thermal(&g, model, temperature)
            } else {
                casimir_force_t0(&g, model)
            }
        });
        match result {
            Ok(f) => f.value,
            Err(e) => {
                pending.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    match force_rough_averaged(z, hist, hist, force_fn) {
        Ok(v) if v.is_finite() => {
            *out_force = v;
            CasimirStatus::Ok
        }
        Ok(_) => match pending.borrow_mut().take() {
            Some(e) => {
                set_error(&e);
                classify_lifshitz(&e)
            }
            None => {
                set_error("force evaluation produced a non-finite value");
                CasimirStatus::NumericalError
            }
        },
        Err(e) => {
            set_error(&e);
            CasimirStatus::InvalidInput
        }
    }
}

/// Student-t quantile t_p(f) with p = (1+beta)/2 and f = n-1.
///
/// # Safety
/// `out_t` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn casimir_student_threshold(
    beta: f64,
    n: u32,
    out_t: *mut f64,
) -> CasimirStatus {
    if out_t.is_null() {
        set_error("null pointer argument");
        return CasimirStatus::NullPointer;
    }
    match student_threshold(beta, n as usize) {
        Ok(t) => {
            *out_t = t;
            CasimirStatus::Ok
        }
        Err(e) => {
            set_error(&e);
            match e {
                casimir::stats::StatsError::InverseT { .. } => CasimirStatus::NumericalError,
                _ => CasimirStatus::InvalidInput,
            }
        }
    }
}
