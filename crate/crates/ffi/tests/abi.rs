use std::ffi::CStr;
use std::ptr;

use vdp_ffi::*;

fn last_error() -> String {
    let p = vdp_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn steady(params: VdpParams) -> Result<*mut VdpState, VdpStatus> {
    let mut s = ptr::null_mut();
    match unsafe { vdp_steady_state_new(&params, &mut s) } {
        VdpStatus::Ok => Ok(s),
        e => Err(e),
    }
}

fn params(detuning: f64, drive: f64, kappa2: f64, dim: usize) -> VdpParams {
    VdpParams {
        detuning,
        drive,
        kappa1: 1.0,
        kappa2,
        dim,
    }
}

#[test]
fn limit_cycle_round_trip() {
    let s = steady(params(0.0, 0.0, 1e3, 8)).unwrap();
    let mut dim = 0;
    let (mut re, mut im) = (0.0, 0.0);
    unsafe {
        assert_eq!(vdp_state_dim(s, &mut dim), VdpStatus::Ok);
        assert_eq!(dim, 8);
        assert_eq!(vdp_state_get_entry(s, 0, 0, &mut re, &mut im), VdpStatus::Ok);
        assert!((re - 2.0 / 3.0).abs() < 1e-3 && im == 0.0);
        let mut m = std::mem::zeroed::<VdpMetrics>();
        assert_eq!(vdp_state_metrics(s, 0, &mut m), VdpStatus::Ok);
        assert_eq!(m.regime, VdpRegime::Antibunched);
        assert!((m.mean_n - 1.0 / 3.0).abs() < 1e-3);
        let mut r = 1.0;
        assert_eq!(vdp_state_residual(s, &mut r), VdpStatus::Ok);
        assert!(r < 1e-10);
        vdp_state_free(s);
    }
}

#[test]
fn analytic_state_and_closed_forms() {
    let mut s = ptr::null_mut();
    let mut fc = 0.0;
    let mut c = 0.0;
    unsafe {
        assert_eq!(vdp_limit_cycle_new(4, &mut s), VdpStatus::Ok);
        let mut m = std::mem::zeroed::<VdpMetrics>();
        assert_eq!(vdp_state_metrics(s, 360, &mut m), VdpStatus::Ok);
        assert!((m.delta - 1.292854).abs() < 1e-6);
        assert_eq!(m.g2, 0.0);
        vdp_state_free(s);

        assert_eq!(vdp_critical_drive(0.0, 1.0, &mut fc), VdpStatus::Ok);
        assert!((fc - (9.0f64 / 8.0).sqrt()).abs() < 1e-15);
        assert_eq!(vdp_analytic_coherence(fc, 0.0, 1.0, &mut c), VdpStatus::Ok);
        assert!((c - 1.0 / (6.0 * 2f64.sqrt())).abs() < 1e-15);
        assert_eq!(vdp_analytic_coherence(1.0, 0.0, -1.0, &mut c), VdpStatus::InvalidArgument);
        assert!(last_error().contains("kappa1"));
        assert_eq!(vdp_critical_drive(f64::NAN, 1.0, &mut fc), VdpStatus::InvalidArgument);
    }
}

#[test]
fn error_codes() {
    assert_eq!(steady(params(0.0, 1.0, 0.01, 0)).unwrap_err(), VdpStatus::CutoffRequired);
    assert!(last_error().contains("cutoff"));
    assert_eq!(steady(params(0.0, -1.0, 1.0, 8)).unwrap_err(), VdpStatus::InvalidArgument);
    assert_eq!(steady(params(0.0, 1.0, 1.0, 2)).unwrap_err(), VdpStatus::InvalidArgument);
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(vdp_steady_state_new(ptr::null(), &mut s), VdpStatus::NullPointer);
        let p = params(0.0, 1.0, 1.0, 8);
        assert_eq!(vdp_steady_state_new(&p, ptr::null_mut()), VdpStatus::NullPointer);
        let mut dim = 0;
        assert_eq!(vdp_state_dim(ptr::null(), &mut dim), VdpStatus::NullPointer);
        vdp_state_free(ptr::null_mut());

        let s = steady(p).unwrap();
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(vdp_state_get_entry(s, 8, 0, &mut re, &mut im), VdpStatus::IndexOutOfRange);
        assert!(last_error().contains("(8, 0)"));
        let mut small = [0.0; 10];
        assert_eq!(
            vdp_state_tomogram(s, -6.0, 6.0, 11, 4, small.as_mut_ptr(), small.len()),
            VdpStatus::BufferTooSmall
        );
        assert_eq!(vdp_state_wigner(s, 0.5, 11, small.as_mut_ptr(), small.len()), VdpStatus::BufferTooSmall);
        let mut w = vec![0.0; 121];
        assert_eq!(vdp_state_wigner(s, 1.0, 11, w.as_mut_ptr(), w.len()), VdpStatus::InvalidArgument);
        assert!(last_error().contains("grid too small"));
        vdp_state_free(s);
    }
}

#[test]
fn tomogram_and_wigner_buffers() {
    let s = steady(params(2.0, 1.0, 1e3, 12)).unwrap();
    let (nx, nt) = (241, 8);
    let mut buf = vec![0.0; nx * nt];
    unsafe {
        assert_eq!(vdp_state_tomogram(s, -8.0, 8.0, nx, nt, buf.as_mut_ptr(), buf.len()), VdpStatus::Ok);
    }
    let h = 16.0 / (nx - 1) as f64;
    for row in buf.chunks(nx) {
        let integral: f64 = h * (row.iter().sum::<f64>() - 0.5 * (row[0] + row[nx - 1]));
        assert!((integral - 1.0).abs() < 1e-6);
        assert!(row.iter().all(|&w| w >= -1e-12));
    }
    let n = 81;
    let mut w = vec![0.0; n * n];
    unsafe {
        assert_eq!(vdp_state_wigner(s, 6.0, n, w.as_mut_ptr(), w.len()), VdpStatus::Ok);
        vdp_state_free(s);
    }
    let h = 12.0 / (n - 1) as f64;
    let total: f64 = w.iter().sum::<f64>() * h * h;
    assert!((total - 1.0).abs() < 1e-3);
}

#[test]
fn errors_are_per_thread() {
    assert_eq!(steady(params(0.0, 1.0, 0.01, 0)).unwrap_err(), VdpStatus::CutoffRequired);
    std::thread::spawn(|| assert!(vdp_last_error_message().is_null()))
        .join()
        .unwrap();
    assert!(!vdp_last_error_message().is_null());
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(vdp_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
