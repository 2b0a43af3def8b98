//! C interface to `vdp-core`.
//!
//! States are opaque handles created by a `*_new` function and released with
//! [`vdp_state_free`]. Every fallible call returns a [`VdpStatus`]; on failure
//! [`vdp_last_error_message`] describes the cause for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use vdp_core::analytic::{coherence, critical_drive, limit_cycle};
use vdp_core::fock::{DensityMatrix, FockSpace};
use vdp_core::liouvillian::{auto_dim, build_element_form, SystemParams};
use vdp_core::metrics::{all_metrics, MetricsOptions, Regime};
use vdp_core::steady::solve_steady_state;
use vdp_core::tomography::{tomogram, wigner, PhaseSpaceGrid, QuadratureGrid};
use vdp_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VdpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// `kappa2 < 0.1` with `dim == 0`.
    CutoffRequired = 3,
    ComputationFailed = 4,
    IndexOutOfRange = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VdpRegime {
    Antibunched = 0,
    SingleQuantum = 1,
    CollectiveBursts = 2,
    Undefined = 3,
}

impl From<Regime> for VdpRegime {
    fn from(r: Regime) -> Self {
        match r {
            Regime::Antibunched => VdpRegime::Antibunched,
            Regime::SingleQuantum => VdpRegime::SingleQuantum,
            Regime::CollectiveBursts => VdpRegime::CollectiveBursts,
            Regime::Undefined => VdpRegime::Undefined,
        }
    }
}

/// Model parameters in units of `kappa1`. `dim == 0` picks the cutoff automatically.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct VdpParams {
    pub detuning: f64,
    pub drive: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub dim: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct VdpMetrics {
    /// NaN when the mode is empty (`regime == Undefined`).
    pub g2: f64,
    pub mean_n: f64,
    pub coherence: f64,
    pub delta: f64,
    pub delta_error: f64,
    pub purity: f64,
    pub regime: VdpRegime,
}

/// Opaque density matrix.
pub struct VdpState {
    rho: DensityMatrix,
    residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: VdpStatus, msg: impl Into<String>) -> VdpStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> VdpStatus {
    let status = match e {
        Error::InvalidParameter(_) | Error::InvalidDimension { .. } | Error::GridTooSmall { .. } => {
            VdpStatus::InvalidArgument
        }
        Error::CutoffRequired(_) => VdpStatus::CutoffRequired,
        Error::LevelOutOfRange { .. } | Error::QuadratureOutOfRange(_) => VdpStatus::IndexOutOfRange,
        _ => VdpStatus::ComputationFailed,
    };
    fail(status, e.to_string())
}

/// Run `f`, turning errors and panics into status codes.
fn guard<F>(f: F) -> VdpStatus
where
    F: FnOnce() -> Result<(), VdpStatus> + UnwindSafe,
{
    match catch_unwind(f) {
        Ok(Ok(())) => VdpStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(VdpStatus::Panic, "internal panic"),
    }
}

fn core<T>(r: vdp_core::Result<T>) -> Result<T, VdpStatus> {
    r.map_err(from_error)
}

unsafe fn state_ref<'a>(state: *const VdpState) -> Result<&'a VdpState, VdpStatus> {
    state.as_ref().ok_or_else(|| fail(VdpStatus::NullPointer, "state is null"))
}

unsafe fn out_mut<'a, T>(out: *mut T, name: &str) -> Result<&'a mut T, VdpStatus> {
    out.as_mut().ok_or_else(|| fail(VdpStatus::NullPointer, format!("{name} is null")))
}

fn publish(out: *mut *mut VdpState, state: VdpState) {
    // SAFETY: callers check `out` for null first
    unsafe { *out = Box::into_raw(Box::new(state)) };
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn vdp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn vdp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Solve for the steady state and store a new handle in `*out`.
///
/// # Safety
/// `params` must point to a valid [`VdpParams`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vdp_steady_state_new(params: *const VdpParams, out: *mut *mut VdpState) -> VdpStatus {
    guard(|| {
        let p = *params.as_ref().ok_or_else(|| fail(VdpStatus::NullPointer, "params is null"))?;
        out_mut(out, "out")?;
        let sp = core(match p.dim {
            0 => auto_dim(p.drive, p.kappa1, p.kappa2),
            d => Ok(d),
        }
        .and_then(|dim| SystemParams::with_dim(p.detuning, p.drive, p.kappa1, p.kappa2, dim)))?;
        let sol = core(solve_steady_state(&build_element_form(&sp)))?;
        publish(
            out,
            VdpState {
                rho: sol.rho,
                residual: sol.residual,
            },
        );
        Ok(())
    })
}

/// The undriven deep-quantum state `diag(2/3, 1/3, 0, ...)` in `dim` levels.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vdp_limit_cycle_new(dim: usize, out: *mut *mut VdpState) -> VdpStatus {
    guard(|| {
        out_mut(out, "out")?;
        let space = core(FockSpace::new(dim))?;
        publish(
            out,
            VdpState {
                rho: limit_cycle(space),
                residual: 0.0,
            },
        );
        Ok(())
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `state` must come from a `*_new` call and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn vdp_state_free(state: *mut VdpState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vdp_state_dim(state: *const VdpState, out: *mut usize) -> VdpStatus {
    guard(|| {
        *out_mut(out, "out")? = state_ref(state)?.rho.dim();
        Ok(())
    })
}

/// Residual `|L rho|` reported by the solver (0 for analytic states).
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vdp_state_residual(state: *const VdpState, out: *mut f64) -> VdpStatus {
    guard(|| {
        *out_mut(out, "out")? = state_ref(state)?.residual;
        Ok(())
    })
}

/// Matrix element `rho_mn` as real and imaginary parts.
///
/// # Safety
/// `state` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vdp_state_get_entry(
    state: *const VdpState,
    m: usize,
    n: usize,
    re: *mut f64,
    im: *mut f64,
) -> VdpStatus {
    guard(|| {
        let s = state_ref(state)?;
        let (re, im) = (out_mut(re, "re")?, out_mut(im, "im")?);
        let d = s.rho.dim();
        if m >= d || n >= d {
            return Err(fail(VdpStatus::IndexOutOfRange, format!("entry ({m}, {n}) outside dim {d}")));
        }
        let z = s.rho.get(m, n);
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// Synchronization metrics; `n_theta == 0` uses the library default.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vdp_state_metrics(state: *const VdpState, n_theta: usize, out: *mut VdpMetrics) -> VdpStatus {
    guard(|| {
        let s = state_ref(state)?;
        let out = out_mut(out, "out")?;
        let mut options = MetricsOptions::default();
        if n_theta != 0 {
            options.n_theta = n_theta;
        }
        let m = core(all_metrics(&s.rho, &options))?;
        *out = VdpMetrics {
            g2: m.g2.unwrap_or(f64::NAN),
            mean_n: m.mean_n,
            coherence: m.coherence_01,
            delta: m.delta,
            delta_error: m.delta_error,
            purity: m.purity,
            regime: m.regime.into(),
        };
        Ok(())
    })
}

/// Tomogram on `n_theta` angles in `[0, 2pi)` and `n_x` points in
/// `[x_min, x_max]`, written row-major (theta rows) into `buf`, which must
/// hold `n_theta * n_x` values.
///
/// # Safety
/// `state` must be a live handle; `buf` must be valid for `buf_len` writes.
#[no_mangle]
pub unsafe extern "C" fn vdp_state_tomogram(
    state: *const VdpState,
    x_min: f64,
    x_max: f64,
    n_x: usize,
    n_theta: usize,
    buf: *mut f64,
    buf_len: usize,
) -> VdpStatus {
    guard(|| {
        let s = state_ref(state)?;
        if buf.is_null() {
            return Err(fail(VdpStatus::NullPointer, "buf is null"));
        }
        let need = n_x.saturating_mul(n_theta);
        if buf_len < need {
            return Err(fail(VdpStatus::BufferTooSmall, format!("buffer holds {buf_len}, need {need}")));
        }
        let grid = core(QuadratureGrid::new(x_min, x_max, n_x, n_theta))?;
        let t = core(tomogram(&s.rho, &grid))?;
        let out = std::slice::from_raw_parts_mut(buf, need);
        for i in 0..n_theta {
            for j in 0..n_x {
                out[i * n_x + j] = t.values[(i, j)];
            }
        }
        Ok(())
    })
}

/// Wigner function on the square `[-half_extent, half_extent]^2` with `n`
/// points per axis, row-major in x into `buf` (`n * n` values).
///
/// # Safety
/// `state` must be a live handle; `buf` must be valid for `buf_len` writes.
#[no_mangle]
pub unsafe extern "C" fn vdp_state_wigner(
    state: *const VdpState,
    half_extent: f64,
    n: usize,
    buf: *mut f64,
    buf_len: usize,
) -> VdpStatus {
    guard(|| {
        let s = state_ref(state)?;
        if buf.is_null() {
            return Err(fail(VdpStatus::NullPointer, "buf is null"));
        }
        let need = n.saturating_mul(n);
        if buf_len < need {
            return Err(fail(VdpStatus::BufferTooSmall, format!("buffer holds {buf_len}, need {need}")));
        }
        if !(half_extent > 0.0) || n < 2 {
            return Err(fail(VdpStatus::InvalidArgument, "need half_extent > 0 and n >= 2"));
        }
        let w = core(wigner(&s.rho, &PhaseSpaceGrid::square(half_extent, n)))?;
        let out = std::slice::from_raw_parts_mut(buf, need);
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = w.values[(i, j)];
            }
        }
        Ok(())
    })
}

fn check_rates(values: &[(&str, f64)], kappa1: f64) -> Result<(), VdpStatus> {
    if let Some((name, v)) = values.iter().find(|(_, v)| !v.is_finite()) {
        return Err(fail(VdpStatus::InvalidArgument, format!("{name} = {v} is not finite")));
    }
    if !(kappa1 > 0.0 && kappa1.is_finite()) {
        return Err(fail(VdpStatus::InvalidArgument, format!("kappa1 = {kappa1} must be positive")));
    }
    Ok(())
}

/// Closed-form `|rho_01|` in the strong-damping limit.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vdp_analytic_coherence(drive: f64, detuning: f64, kappa1: f64, out: *mut f64) -> VdpStatus {
    guard(|| {
        let out = out_mut(out, "out")?;
        check_rates(&[("drive", drive), ("detuning", detuning)], kappa1)?;
        if drive < 0.0 {
            return Err(fail(VdpStatus::InvalidArgument, format!("drive = {drive} must be >= 0")));
        }
        *out = coherence(drive, detuning, kappa1);
        Ok(())
    })
}

/// Drive at which [`vdp_analytic_coherence`] peaks.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vdp_critical_drive(detuning: f64, kappa1: f64, out: *mut f64) -> VdpStatus {
    guard(|| {
        let out = out_mut(out, "out")?;
        check_rates(&[("detuning", detuning)], kappa1)?;
        *out = critical_drive(detuning, kappa1);
        Ok(())
    })
}
