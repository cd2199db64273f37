//! C ABI over `kinetic-lift`.
//!
//! Scenarios and fields are opaque heap handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns a
//! [`KlStatus`]; on failure the message is available from
//! [`kl_last_error_message`] until the next failing call on the same thread.
//! Panics never cross the boundary; they surface as `KL_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kinetic_lift::cr::{equilibrium_field, lift, restrict_lift_error};
use kinetic_lift::diagnostics::{cr_jacobian_radius, cr_jacobian_spectrum, SpectrumParams};
use kinetic_lift::io::{read_snapshot, write_snapshot};
use kinetic_lift::kinetic::{restrict, DistributionField};
use kinetic_lift::projection::{naive_projector, ConservedProjector};
use kinetic_lift::scenario::Scenario;
use kinetic_lift::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad input: arguments, config, snapshot or grid mismatch.
    Argument = 2,
    /// Solver failure: non-convergence, non-finite values, singular systems.
    Numerical = 3,
    Io = 4,
    Panic = 5,
}

/// Opaque scenario handle.
pub struct KlScenario(Scenario);

/// Opaque distribution field handle.
pub struct KlField(DistributionField);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct KlLiftSummary {
    /// `|f - f_c|_2` in stored units.
    pub error_lift: f64,
    /// `|f_eq - f_c|_2` for the local equilibrium of the same moments.
    pub error_equilibrium: f64,
    pub iterations: usize,
    pub gmres_iterations: usize,
    pub moment_drift: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> KlStatus {
    match err {
        Error::Io(_) => KlStatus::Io,
        e if e.is_argument_error() => KlStatus::Argument,
        _ => KlStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (KlStatus, String)>) -> KlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KlStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            KlStatus::Panic
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (KlStatus, String)>;
}

impl<T> IntoFfi<T> for kinetic_lift::Result<T> {
    fn ffi(self) -> Result<T, (KlStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (KlStatus, String) {
    (KlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (KlStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (KlStatus::Argument, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, (KlStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (KlStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn kl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads a scenario file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_scenario_load(
    path: *const c_char,
    out: *mut *mut KlScenario,
) -> KlStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let s = Scenario::from_path(str_arg(path, "path")?).ffi()?;
        *out = Box::into_raw(Box::new(KlScenario(s)));
        Ok(())
    })
}

/// Parses scenario text (`key = value` lines).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_scenario_parse(
    text: *const c_char,
    out: *mut *mut KlScenario,
) -> KlStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let s = Scenario::parse(str_arg(text, "text")?).ffi()?;
        *out = Box::into_raw(Box::new(KlScenario(s)));
        Ok(())
    })
}

/// # Safety
/// `scenario` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kl_scenario_free(scenario: *mut KlScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Grid sizes of a scenario.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kl_scenario_dims(
    scenario: *const KlScenario,
    n_cells: *mut usize,
    n_velocities: *mut usize,
) -> KlStatus {
    guard(|| {
        let s = &handle(scenario, "scenario")?.0;
        *out_ptr(n_cells, "n_cells")? = s.n_cells;
        *out_ptr(n_velocities, "n_velocities")? = s.n_velocities;
        Ok(())
    })
}

/// Overrides the grid size; `n_velocities = 0` keeps the current value.
///
/// # Safety
/// `scenario` must be valid.
#[no_mangle]
pub unsafe extern "C" fn kl_scenario_set_grid(
    scenario: *mut KlScenario,
    n_cells: usize,
    n_velocities: usize,
) -> KlStatus {
    guard(|| {
        let s = &mut out_ptr(scenario, "scenario")?.0;
        let mut next = s.clone();
        next.n_cells = n_cells;
        if n_velocities > 0 {
            next.n_velocities = n_velocities;
        }
        next.validate().ffi()?;
        *s = next;
        Ok(())
    })
}

/// Sets the CR extrapolation order and the solver (0 Picard, 1 Newton).
///
/// # Safety
/// `scenario` must be valid.
#[no_mangle]
pub unsafe extern "C" fn kl_scenario_set_lifting(
    scenario: *mut KlScenario,
    order: usize,
    newton: c_int,
) -> KlStatus {
    use kinetic_lift::cr::SolverKind;
    guard(|| {
        let s = &mut out_ptr(scenario, "scenario")?.0;
        let mut next = s.clone();
        next.cr_order = order;
        next.cr_solver = if newton != 0 {
            SolverKind::Newton
        } else {
            SolverKind::Picard
        };
        next.validate().ffi()?;
        *s = next;
        Ok(())
    })
}

/// Time step of the scenario's finite-volume scheme, in seconds.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kl_scenario_dt(scenario: *const KlScenario, dt: *mut f64) -> KlStatus {
    guard(|| {
        let s = &handle(scenario, "scenario")?.0;
        *out_ptr(dt, "dt")? = s.dt().ffi()?;
        Ok(())
    })
}

/// Advances the ambient equilibrium `steps` steps.
///
/// # Safety
/// `scenario` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_reference_run(
    scenario: *const KlScenario,
    steps: usize,
    out: *mut *mut KlField,
) -> KlStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let s = &handle(scenario, "scenario")?.0;
        let stepper = s.stepper().ffi()?;
        let f = stepper.advance(&s.initial_field().ffi()?, steps).ffi()?;
        *out = Box::into_raw(Box::new(KlField(f)));
        Ok(())
    })
}

/// # Safety
/// `field` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kl_field_free(field: *mut KlField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kl_field_dims(
    field: *const KlField,
    n_cells: *mut usize,
    n_velocities: *mut usize,
) -> KlStatus {
    guard(|| {
        let f = &handle(field, "field")?.0;
        *out_ptr(n_cells, "n_cells")? = f.n_cells();
        *out_ptr(n_velocities, "n_velocities")? = f.n_velocities();
        Ok(())
    })
}

/// Copies the cell-major values (`N * Nv` doubles, stored units) into `buf`.
///
/// # Safety
/// `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn kl_field_values(
    field: *const KlField,
    buf: *mut f64,
    len: usize,
) -> KlStatus {
    guard(|| {
        let f = &handle(field, "field")?.0;
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len != f.values.len() {
            return Err((
                KlStatus::Argument,
                format!("buffer holds {len} values, field has {}", f.values.len()),
            ));
        }
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(&f.values);
        Ok(())
    })
}

/// Reads a `KLIFT1` snapshot.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kl_field_read(path: *const c_char, out: *mut *mut KlField) -> KlStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let f = read_snapshot(str_arg(path, "path")?).ffi()?;
        *out = Box::into_raw(Box::new(KlField(f)));
        Ok(())
    })
}

/// Writes a `KLIFT1` snapshot.
///
/// # Safety
/// `field` must be valid; `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn kl_field_write(field: *const KlField, path: *const c_char) -> KlStatus {
    guard(|| {
        let f = &handle(field, "field")?.0;
        write_snapshot(str_arg(path, "path")?, f).ffi()
    })
}

/// Density (1/m^3), velocity (m/s) and temperature (K) per cell; each
/// buffer holds `len = N` doubles.
///
/// # Safety
/// Buffers must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn kl_restrict(
    scenario: *const KlScenario,
    field: *const KlField,
    n: *mut f64,
    u: *mut f64,
    t: *mut f64,
    len: usize,
) -> KlStatus {
    guard(|| {
        let s = &handle(scenario, "scenario")?.0;
        let f = &handle(field, "field")?.0;
        if n.is_null() || u.is_null() || t.is_null() {
            return Err(null("output buffer"));
        }
        if len != f.n_cells() {
            return Err((
                KlStatus::Argument,
                format!("buffers hold {len} cells, field has {}", f.n_cells()),
            ));
        }
        let m = restrict(f, &s.gas).ffi()?;
        let (n, u, t) = (
            std::slice::from_raw_parts_mut(n, len),
            std::slice::from_raw_parts_mut(u, len),
            std::slice::from_raw_parts_mut(t, len),
        );
        for (j, st) in m.states().enumerate() {
            n[j] = st.n;
            u[j] = st.u;
            t[j] = st.t;
        }
        Ok(())
    })
}

/// Restricts `reference`, lifts the moments with the scenario's CR settings
/// and compares against the reference.
///
/// # Safety
/// Handles must be valid; `lifted` and `summary` must be writable. `lifted`
/// may be null if the field is not wanted.
#[no_mangle]
pub unsafe extern "C" fn kl_lift(
    scenario: *const KlScenario,
    reference: *const KlField,
    lifted: *mut *mut KlField,
    summary: *mut KlLiftSummary,
) -> KlStatus {
    guard(|| {
        let s = &handle(scenario, "scenario")?.0;
        let fc = &handle(reference, "reference")?.0;
        let summary = out_ptr(summary, "summary")?;
        let stepper = s.stepper().ffi()?;
        if !fc.same_grids(&s.initial_field().ffi()?) {
            return Err((
                KlStatus::Argument,
                "reference field does not match the scenario grids".into(),
            ));
        }
        let basis = s.moment_basis().ffi()?;
        let cfg = s.cr_config().ffi()?;
        let macro_fields = restrict(fc, &s.gas).ffi()?;
        let (f, report) = lift(&stepper, &basis, &macro_fields, &cfg).ffi()?;
        let feq = equilibrium_field(&stepper, &macro_fields).ffi()?;
        *summary = KlLiftSummary {
            error_lift: restrict_lift_error(fc, &f).ffi()?.two_norm,
            error_equilibrium: restrict_lift_error(fc, &feq).ffi()?.two_norm,
            iterations: report.iterations,
            gmres_iterations: report.gmres_iterations,
            moment_drift: report.moment_drift,
        };
        if let Some(out) = lifted.as_mut() {
            *out = Box::into_raw(Box::new(KlField(f)));
        }
        Ok(())
    })
}

/// Spectral radius of the CR map Jacobian at `state` (the scenario's initial
/// field when null). `naive != 0` resets with `I - M^{-1} M^0`. With
/// `krylov_dim = 0` the dense spectrum is used, otherwise an Arnoldi estimate.
///
/// # Safety
/// `scenario` must be valid, `state` valid or null, `radius` writable.
#[no_mangle]
pub unsafe extern "C" fn kl_jacobian_spectral_radius(
    scenario: *const KlScenario,
    state: *const KlField,
    naive: c_int,
    krylov_dim: usize,
    radius: *mut f64,
) -> KlStatus {
    guard(|| {
        let s = &handle(scenario, "scenario")?.0;
        let radius = out_ptr(radius, "radius")?;
        let stepper = s.stepper().ffi()?;
        let initial;
        let f0 = match state.as_ref() {
            Some(f) => &f.0,
            None => {
                initial = s.initial_field().ffi()?;
                &initial
            }
        };
        let basis = s.moment_basis().ffi()?;
        let cfg = s.cr_config().ffi()?;
        let naive_p;
        let proj: &dyn ConservedProjector = if naive != 0 {
            naive_p = naive_projector(&basis).ffi()?;
            &naive_p
        } else {
            &basis
        };
        *radius = if krylov_dim == 0 {
            cr_jacobian_spectrum(
                &stepper,
                &basis,
                proj,
                &f0.values,
                &cfg,
                SpectrumParams::default(),
            )
            .ffi()?
            .spectral_radius
        } else {
            cr_jacobian_radius(&stepper, &basis, proj, &f0.values, &cfg, krylov_dim).ffi()?
        };
        Ok(())
    })
}
