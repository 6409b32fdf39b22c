//! C ABI over the `edept` toolkit.
//!
//! Every function returns an [`EdeptStatus`]. On failure a message is kept
//! per thread and can be read with [`edept_last_error_message`]. Panics are
//! caught at the boundary and reported as `EDEPT_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use edept::asymptotics::{fit_power_law, log_radii, polar_direction, sample_radial_profile, Quantity};
use edept::field::{
    energy_density, maxwell_residuals, vector_potential, Branch, EdeptParams, FieldError, SpacetimePoint,
};
use edept::numerics::DifferentiationScheme;
use edept::spectrum::{helicity_amplitudes, spectral_energy, FieldKind, FieldSlice, PolarizationBasis, SpectralSetup, SpectrumError};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdeptStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    Numerical = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdeptBranch {
    /// Real part for odd α, imaginary part for even α.
    ParityDefault = 0,
    RealPart = 1,
    ImagPart = 2,
    Analytic = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdeptQuantity {
    AbsA = 0,
    AbsE = 1,
    AbsB = 2,
    UTotal = 3,
    UElectric = 4,
    DetectionRate = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EdeptEnergy {
    pub u_total: f64,
    pub u_electric: f64,
    pub u_magnetic: f64,
    pub detection_rate: f64,
}

/// Opaque parameter set.
pub struct EdeptParamsHandle(EdeptParams);

/// Opaque photon state computed on the default grids.
pub struct EdeptSpectrumHandle {
    norm: f64,
    spectral_energy: f64,
    position_energy: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

type Failure = (EdeptStatus, String);

fn field_failure(e: FieldError) -> Failure {
    let status = match e {
        FieldError::OutOfRange(_) => EdeptStatus::OutOfRange,
        FieldError::InvalidParams(_) | FieldError::InvalidPoint(_) => EdeptStatus::InvalidArgument,
        FieldError::Numerics(_) => EdeptStatus::Numerical,
    };
    (status, e.to_string())
}

fn spectrum_failure(e: SpectrumError) -> Failure {
    match e {
        SpectrumError::Field(f) => field_failure(f),
        other => (EdeptStatus::Numerical, other.to_string()),
    }
}

fn boundary(f: impl FnOnce() -> Result<(), Failure>) -> EdeptStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            EdeptStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            EdeptStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err((EdeptStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn edept_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a parameter set.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn edept_params_new(
    alpha: u32,
    g0: f64,
    g1: f64,
    g2: f64,
    branch: EdeptBranch,
    out: *mut *mut EdeptParamsHandle,
) -> EdeptStatus {
    boundary(|| {
        non_null(out, "out")?;
        let p = EdeptParams::new(alpha, g0, g1, g2).map_err(field_failure)?;
        let p = match branch {
            EdeptBranch::ParityDefault => p,
            EdeptBranch::RealPart => p.with_branch(Branch::RealPart),
            EdeptBranch::ImagPart => p.with_branch(Branch::ImagPart),
            EdeptBranch::Analytic => p.with_branch(Branch::Analytic),
        };
        *out = Box::into_raw(Box::new(EdeptParamsHandle(p)));
        Ok(())
    })
}

/// Releases a parameter set. Null is ignored.
///
/// # Safety
/// `handle` must come from `edept_params_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn edept_params_free(handle: *mut EdeptParamsHandle) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

unsafe fn params<'a>(h: *const EdeptParamsHandle) -> Result<&'a EdeptParams, Failure> {
    non_null(h, "params")?;
    Ok(&(*h).0)
}

/// Complex azimuthal potential `A_θ` at `(t, ρ, z)`.
///
/// # Safety
/// `handle` must be live; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn edept_vector_potential(
    handle: *const EdeptParamsHandle,
    t: f64,
    rho: f64,
    z: f64,
    re: *mut f64,
    im: *mut f64,
) -> EdeptStatus {
    boundary(|| {
        let p = params(handle)?;
        non_null(re, "re")?;
        non_null(im, "im")?;
        let pt = SpacetimePoint::cylindrical(t, rho, 0.0, z).map_err(field_failure)?;
        let a = vector_potential(p, &pt).map_err(field_failure)?;
        *re = a.re;
        *im = a.im;
        Ok(())
    })
}

/// Energy densities and detection rate at a Cartesian point.
///
/// # Safety
/// `handle` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn edept_energy_density(
    handle: *const EdeptParamsHandle,
    t: f64,
    x: f64,
    y: f64,
    z: f64,
    out: *mut EdeptEnergy,
) -> EdeptStatus {
    boundary(|| {
        let p = params(handle)?;
        non_null(out, "out")?;
        let pt = SpacetimePoint::cartesian(t, x, y, z).map_err(field_failure)?;
        let u = energy_density(p, &pt, DifferentiationScheme::DualNumber).map_err(field_failure)?;
        *out = EdeptEnergy {
            u_total: u.u_total,
            u_electric: u.u_electric,
            u_magnetic: u.u_magnetic,
            detection_rate: u.detection_rate,
        };
        Ok(())
    })
}

/// Largest relative Maxwell residual at a Cartesian point, exact derivatives.
///
/// # Safety
/// `handle` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn edept_maxwell_residual(
    handle: *const EdeptParamsHandle,
    t: f64,
    x: f64,
    y: f64,
    z: f64,
    out: *mut f64,
) -> EdeptStatus {
    boundary(|| {
        let p = params(handle)?;
        non_null(out, "out")?;
        let pt = SpacetimePoint::cartesian(t, x, y, z).map_err(field_failure)?;
        let r = maxwell_residuals(p, &pt, DifferentiationScheme::DualNumber).map_err(field_failure)?;
        *out = r.worst();
        Ok(())
    })
}

/// Fitted fall-off exponent of `quantity` along the ray at polar angle
/// `theta` (radians), from `n` log-spaced samples on `[r_min, r_max]`.
///
/// # Safety
/// `handle` must be live; `exponent` and `r_squared` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn edept_fit_exponent(
    handle: *const EdeptParamsHandle,
    quantity: EdeptQuantity,
    theta: f64,
    t: f64,
    r_min: f64,
    r_max: f64,
    n: u32,
    exponent: *mut f64,
    r_squared: *mut f64,
) -> EdeptStatus {
    boundary(|| {
        let p = params(handle)?;
        non_null(exponent, "exponent")?;
        non_null(r_squared, "r_squared")?;
        let q = match quantity {
            EdeptQuantity::AbsA => Quantity::AbsA,
            EdeptQuantity::AbsE => Quantity::AbsE,
            EdeptQuantity::AbsB => Quantity::AbsB,
            EdeptQuantity::UTotal => Quantity::UTotal,
            EdeptQuantity::UElectric => Quantity::UElectric,
            EdeptQuantity::DetectionRate => Quantity::DetectionRate,
        };
        let bad = |e: edept::asymptotics::AsymptoticsError| (EdeptStatus::InvalidArgument, e.to_string());
        let radii = log_radii(r_min, r_max, n as usize).map_err(bad)?;
        let prof = sample_radial_profile(p, q, polar_direction(theta), t, &radii).map_err(bad)?;
        let window = edept::asymptotics::FitWindow::new(r_min, r_max);
        let fit = fit_power_law(&prof, window, 0.0).map_err(|e| (EdeptStatus::Numerical, e.to_string()))?;
        *exponent = fit.exponent;
        *r_squared = fit.r_squared;
        Ok(())
    })
}

/// Builds the photon state at `t0` on the default grids (a few seconds).
///
/// # Safety
/// `handle` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn edept_spectrum_new(
    handle: *const EdeptParamsHandle,
    t0: f64,
    out: *mut *mut EdeptSpectrumHandle,
) -> EdeptStatus {
    boundary(|| {
        let p = params(handle)?;
        non_null(out, "out")?;
        if !t0.is_finite() {
            return Err((EdeptStatus::InvalidArgument, format!("t0 must be finite, got {t0}")));
        }
        let setup = SpectralSetup::default_for(p);
        let slice = FieldSlice::sample(p, t0, &setup.grid).map_err(spectrum_failure)?;
        let spec = slice.spectrum(&setup, FieldKind::Potential).map_err(spectrum_failure)?;
        let h = helicity_amplitudes(&spec, &setup.modes, &PolarizationBasis::default(), 1e-6).map_err(spectrum_failure)?;
        let position_energy = slice.total_energy(p, &setup.grid).map_err(spectrum_failure)?;
        *out = Box::into_raw(Box::new(EdeptSpectrumHandle {
            norm: h.norm,
            spectral_energy: spectral_energy(&spec, &setup.modes),
            position_energy,
        }));
        Ok(())
    })
}

/// Norm, spectral energy and position-space energy of a photon state. Any
/// output pointer may be null to skip it.
///
/// # Safety
/// `handle` must be live; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn edept_spectrum_scalars(
    handle: *const EdeptSpectrumHandle,
    norm: *mut f64,
    spectral_energy: *mut f64,
    position_energy: *mut f64,
) -> EdeptStatus {
    boundary(|| {
        non_null(handle, "spectrum")?;
        let s = &*handle;
        for (dst, v) in [(norm, s.norm), (spectral_energy, s.spectral_energy), (position_energy, s.position_energy)] {
            if !dst.is_null() {
                *dst = v;
            }
        }
        Ok(())
    })
}

/// Releases a photon state. Null is ignored.
///
/// # Safety
/// `handle` must come from `edept_spectrum_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn edept_spectrum_free(handle: *mut EdeptSpectrumHandle) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_are_contained() {
        let s = boundary(|| panic!("boom"));
        assert_eq!(s, EdeptStatus::Panic);
        let msg = unsafe { std::ffi::CStr::from_ptr(edept_last_error_message()) };
        assert!(msg.to_str().unwrap().contains("boom"));
    }
}
