//! Closed-form steady state of the three-level deep-quantum ansatz
//!
//! ```text
//!        | r00  r01  0  |
//! rho =  | r10  r11  0  |      (coherence only between |0> and |1>)
//!        | 0    0    r22|
//! ```
//!
//! and the quantities derived from it: the limit cycle, the tomogram, the
//! mean excitation, the 0-1 coherence, its critical drive and its slope.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{CMatrix, DensityMatrix, FockSpace, C64, I, ZERO};
use crate::liouvillian::SystemParams;
use crate::tomography::quadrature_wavefunctions;

/// The ansatz is only trusted up to this drive.
pub const ANSATZ_MAX_DRIVE: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NonlinearDamping {
    Finite(f64),
    /// `kappa2 -> infinity`, evaluated with `kappa1/kappa2 = 0` exactly.
    Limit,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeepQuantumParams {
    pub detuning: f64,
    pub drive: f64,
    pub kappa1: f64,
    pub kappa2: NonlinearDamping,
}

impl DeepQuantumParams {
    pub fn limit(detuning: f64, drive: f64, kappa1: f64) -> Self {
        Self {
            detuning,
            drive,
            kappa1,
            kappa2: NonlinearDamping::Limit,
        }
    }

    pub fn finite(detuning: f64, drive: f64, kappa1: f64, kappa2: f64) -> Self {
        Self {
            detuning,
            drive,
            kappa1,
            kappa2: NonlinearDamping::Finite(kappa2),
        }
    }

    fn gain_ratio(&self) -> Result<f64> {
        match self.kappa2 {
            NonlinearDamping::Limit => Ok(0.0),
            NonlinearDamping::Finite(k2) if k2 > 0.0 => Ok(self.kappa1 / k2),
            NonlinearDamping::Finite(k2) => Err(Error::Domain(format!(
                "closed form needs kappa2 > 0, got {k2}"
            ))),
        }
    }
}

impl From<&SystemParams> for DeepQuantumParams {
    fn from(p: &SystemParams) -> Self {
        Self::finite(p.detuning, p.drive, p.kappa1, p.kappa2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSteadyState {
    pub rho00: f64,
    pub rho11: f64,
    pub rho22: f64,
    pub rho01: C64,
    /// `R = (12F^2 + 4D^2 + 9k1^2)(3 + k1/k2) - 12F^2`.
    pub denominator: f64,
    /// False when `F > 10`, outside the range the ansatz is meant for.
    pub within_ansatz_range: bool,
}

impl AnalyticSteadyState {
    /// The 3x3 ansatz embedded in `space` (needs `dim >= 3`).
    pub fn to_density(&self, space: FockSpace) -> Result<DensityMatrix> {
        if space.dim() < 3 {
            return Err(Error::InvalidDimension {
                dim: space.dim(),
                min: 3,
            });
        }
        let d = space.dim();
        let mut m = CMatrix::zeros(d, d);
        m[(0, 0)] = C64::new(self.rho00, 0.0);
        m[(1, 1)] = C64::new(self.rho11, 0.0);
        m[(2, 2)] = C64::new(self.rho22, 0.0);
        m[(0, 1)] = self.rho01;
        m[(1, 0)] = self.rho01.conj();
        DensityMatrix::from_matrix(space, m)
    }

    pub fn get(&self, m: usize, n: usize) -> C64 {
        match (m, n) {
            (0, 0) => C64::new(self.rho00, 0.0),
            (1, 1) => C64::new(self.rho11, 0.0),
            (2, 2) => C64::new(self.rho22, 0.0),
            (0, 1) => self.rho01,
            (1, 0) => self.rho01.conj(),
            _ => ZERO,
        }
    }
}

pub fn analytic_steady_state(params: &DeepQuantumParams) -> Result<AnalyticSteadyState> {
    let ratio = params.gain_ratio()?;
    let (f2, d2, k) = (
        params.drive * params.drive,
        params.detuning * params.detuning,
        params.kappa1,
    );
    let k2sq = k * k;
    let r = (12.0 * f2 + 4.0 * d2 + 9.0 * k2sq) * (3.0 + ratio) - 12.0 * f2;
    Ok(AnalyticSteadyState {
        rho00: 2.0 * (6.0 * f2 + 4.0 * d2 + 9.0 * k2sq) / r,
        rho11: (12.0 * f2 + 4.0 * d2 + 9.0 * k2sq) / r,
        rho22: 1.0 - 3.0 * (8.0 * f2 + 4.0 * d2 + 9.0 * k2sq) / r,
        rho01: C64::new(-2.0 * params.detuning, 3.0 * k) * (2.0 * params.drive / r),
        denominator: r,
        within_ansatz_range: params.drive <= ANSATZ_MAX_DRIVE,
    })
}

/// Stationarity conditions of the three-level truncation of the
/// matrix-element equations, evaluated at `state`:
///
/// ```text
/// 0 = -iF(r10 - r01) - k1 r00 + 2 k2 r22
/// 0 =  iF(r10 - r01) + k1 (r00 - 2 r11)
/// 0 =  2 k1 r11 - (3 k1 + 2 k2) r22
/// 0 = (iD - 3/2 k1) r01 - iF (r11 - r00)
/// ```
///
/// The elements of [`analytic_steady_state`] satisfy the first, second and
/// fourth rows exactly. The third leaves `-3 k1 r22`, which only vanishes for
/// `kappa2 -> infinity`. Only meaningful for finite `kappa2`.
pub fn stationarity_residuals(state: &AnalyticSteadyState, params: &DeepQuantumParams) -> Result<[C64; 4]> {
    let k2 = match params.kappa2 {
        NonlinearDamping::Finite(k2) if k2 > 0.0 => k2,
        _ => return Err(Error::Domain("stationarity needs a finite kappa2 > 0".into())),
    };
    let (f, delta, k1) = (params.drive, params.detuning, params.kappa1);
    let (r00, r11, r22) = (state.rho00, state.rho11, state.rho22);
    let r01 = state.rho01;
    let r10 = r01.conj();
    let ifc = I * f;
    Ok([
        -ifc * (r10 - r01) - k1 * r00 + 2.0 * k2 * r22,
        ifc * (r10 - r01) + k1 * (r00 - 2.0 * r11),
        C64::new(2.0 * k1 * r11 - (3.0 * k1 + 2.0 * k2) * r22, 0.0),
        (I * delta - 1.5 * k1) * r01 - ifc * (r11 - r00),
    ])
}

/// `(2/3)|0><0| + (1/3)|1><1|`.
pub fn limit_cycle(space: FockSpace) -> DensityMatrix {
    DensityMatrix::diagonal(space, &[2.0 / 3.0, 1.0 / 3.0]).expect("dim >= 2")
}

/// Tomogram of the ansatz state, `sum_{m,n<=2} rho_mn psi_m psi_n e^{i(n-m)theta}`.
pub fn analytic_tomogram(params: &DeepQuantumParams, x: f64, theta: f64) -> Result<f64> {
    let s = analytic_steady_state(params)?;
    let psi = quadrature_wavefunctions(2, x)?;
    let c: Vec<C64> = (0..3)
        .map(|n| C64::from_polar(psi[n], n as f64 * theta))
        .collect();
    let mut acc = ZERO;
    for m in 0..3 {
        for n in 0..3 {
            acc += c[m].conj() * s.get(m, n) * c[n];
        }
    }
    Ok(acc.re)
}

/// Gaussian-modulated polynomial form of the driven tomogram as it is usually
/// written out. Agrees with [`analytic_tomogram`] only for `kappa2 -> infinity`.
pub fn tomogram_polynomial(params: &DeepQuantumParams, x: f64, theta: f64) -> Result<f64> {
    let r = analytic_steady_state(params)?.denominator;
    let (f, d, k) = (params.drive, params.detuning, params.kappa1);
    let (f2, d2, k2) = (f * f, d * d, k * k);
    let x2 = x * x;
    let bracket = x2 * x2 * (r - 24.0 * f2 - 12.0 * d2 - 27.0 * k2)
        - 2.0 * x2 * (r - 48.0 * f2 - 20.0 * d2 - 45.0 * k2)
        - 8.0 * 2f64.sqrt() * f * x * (3.0 * k * theta.sin() + 2.0 * d * theta.cos())
        + (4.0 * d2 + 9.0 * k2 + r);
    Ok((-x2).exp() / (2.0 * std::f64::consts::PI.sqrt() * r) * bracket)
}

/// Undriven limit-cycle tomogram `(2/(3 sqrt(pi))) (1 + X^2) e^{-X^2}`.
pub fn undriven_tomogram(x: f64) -> f64 {
    2.0 / (3.0 * std::f64::consts::PI.sqrt()) * (1.0 + x * x) * (-x * x).exp()
}

fn lorentz_denominator(drive: f64, detuning: f64, kappa1: f64) -> f64 {
    24.0 * drive * drive + 12.0 * detuning * detuning + 27.0 * kappa1 * kappa1
}

/// `N = 1/3 + 4F^2/(24F^2 + 12D^2 + 27k1^2)` for `kappa2 -> infinity`.
pub fn mean_excitation(drive: f64, detuning: f64, kappa1: f64) -> f64 {
    1.0 / 3.0 + 4.0 * drive * drive / lorentz_denominator(drive, detuning, kappa1)
}

/// `S = |rho01| = 2F sqrt(4D^2 + 9k1^2)/(24F^2 + 12D^2 + 27k1^2)` for `kappa2 -> infinity`.
pub fn coherence(drive: f64, detuning: f64, kappa1: f64) -> f64 {
    let w = (4.0 * detuning * detuning + 9.0 * kappa1 * kappa1).sqrt();
    2.0 * drive * w / lorentz_denominator(drive, detuning, kappa1)
}

/// Drive maximizing [`coherence`]: `F_c = sqrt((9k1^2 + 4D^2)/8)`.
pub fn critical_drive(detuning: f64, kappa1: f64) -> f64 {
    ((9.0 * kappa1 * kappa1 + 4.0 * detuning * detuning) / 8.0).sqrt()
}

/// `dS/dF = 2 sqrt(4D^2 + 9k1^2)(12D^2 + 27k1^2 - 24F^2)/(24F^2 + 12D^2 + 27k1^2)^2`.
pub fn coherence_gradient(drive: f64, detuning: f64, kappa1: f64) -> f64 {
    let w = (4.0 * detuning * detuning + 9.0 * kappa1 * kappa1).sqrt();
    let den = lorentz_denominator(drive, detuning, kappa1);
    let num = 12.0 * detuning * detuning + 27.0 * kappa1 * kappa1 - 24.0 * drive * drive;
    2.0 * w * num / (den * den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    #[test]
    fn undriven_limit_is_the_limit_cycle() {
        for delta in [0.0, 2.0, -5.0] {
            let s = analytic_steady_state(&DeepQuantumParams::limit(delta, 0.0, 1.0)).unwrap();
            assert_abs_diff_eq!(s.rho00, 2.0 / 3.0, epsilon = 1e-15);
            assert_abs_diff_eq!(s.rho11, 1.0 / 3.0, epsilon = 1e-15);
            assert_abs_diff_eq!(s.rho22, 0.0, epsilon = 1e-15);
            assert_eq!(s.rho01, ZERO);
        }
    }

    #[test]
    fn unit_drive_on_resonance() {
        let s = analytic_steady_state(&DeepQuantumParams::limit(0.0, 1.0, 1.0)).unwrap();
        assert_abs_diff_eq!(s.denominator, 51.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.rho01.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.rho01.im, 6.0 / 51.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.rho01.im, 0.11765, epsilon = 1e-5);
        assert_abs_diff_eq!(s.rho11, 21.0 / 51.0, epsilon = 1e-15);
    }

    #[test]
    fn finite_damping_vacuum_population() {
        let s = analytic_steady_state(&DeepQuantumParams::finite(0.0, 0.0, 1.0, 1e3)).unwrap();
        assert_abs_diff_eq!(s.rho00, 2.0 / 3.001, epsilon = 1e-15);
        assert_abs_diff_eq!(s.rho00, 0.66644, epsilon = 1e-5);
    }

    #[test]
    fn zero_damping_is_a_domain_error() {
        let p = DeepQuantumParams::finite(0.0, 1.0, 1.0, 0.0);
        assert!(matches!(analytic_steady_state(&p), Err(Error::Domain(_))));
        assert!(analytic_tomogram(&p, 0.0, 0.0).is_err());
    }

    #[test]
    fn validity_flag() {
        let inside = analytic_steady_state(&DeepQuantumParams::limit(0.0, 10.0, 1.0)).unwrap();
        let outside = analytic_steady_state(&DeepQuantumParams::limit(0.0, 10.5, 1.0)).unwrap();
        assert!(inside.within_ansatz_range);
        assert!(!outside.within_ansatz_range);
    }

    #[test]
    fn large_damping_empties_level_two() {
        for &(delta, f) in &[(0.0, 1.0), (2.0, 5.0), (-5.0, 10.0)] {
            let lim = analytic_steady_state(&DeepQuantumParams::limit(delta, f, 1.0)).unwrap();
            assert!(lim.rho22.abs() <= 1e-15);
            // rho22 ~ k1/(3 k2) for large k2
            let s = analytic_steady_state(&DeepQuantumParams::finite(delta, f, 1.0, 1e6)).unwrap();
            assert!(s.rho22 > 0.0 && s.rho22 <= 1e-6, "{}", s.rho22);
            let s = analytic_steady_state(&DeepQuantumParams::finite(delta, f, 1.0, 1e9)).unwrap();
            assert!(s.rho22.abs() <= 1e-9, "{}", s.rho22);
        }
    }

    #[test]
    fn two_thirds_coherence_coefficient_is_inconsistent() {
        // the 0-1 coherence equation holds with -3/2 k1 (which the matrix-element
        // recursion gives at m=0, n=1), not with -2/3 k1
        let p = DeepQuantumParams::finite(2.0, 1.0, 1.0, 50.0);
        let s = analytic_steady_state(&p).unwrap();
        let with_two_thirds = (I * 2.0 - 2.0 / 3.0) * s.rho01 - I * (s.rho11 - s.rho00);
        assert!(with_two_thirds.norm() > 1e-2);
        let res = stationarity_residuals(&s, &p).unwrap();
        assert!(res[3].norm() <= 1e-14);
    }

    #[test]
    fn undriven_tomogram_values() {
        let p = DeepQuantumParams::limit(0.0, 0.0, 1.0);
        for theta in [0.0, 1.0, 4.0] {
            assert_abs_diff_eq!(
                analytic_tomogram(&p, 0.0, theta).unwrap(),
                2.0 / (3.0 * SQRT_PI),
                epsilon = 1e-15
            );
        }
        assert_abs_diff_eq!(undriven_tomogram(0.0), 0.37613, epsilon = 1e-5);
        for i in -20..=20 {
            let x = 0.3 * i as f64;
            assert_abs_diff_eq!(
                analytic_tomogram(&p, x, 0.7).unwrap(),
                undriven_tomogram(x),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn polynomial_form_matches_only_in_the_limit() {
        let lim = DeepQuantumParams::limit(2.0, 3.0, 1.0);
        let fin = DeepQuantumParams::finite(2.0, 3.0, 1.0, 1.0);
        let mut worst_lim: f64 = 0.0;
        let mut worst_fin: f64 = 0.0;
        for i in 0..=20 {
            for t in 0..16 {
                let x = -4.0 + 0.4 * i as f64;
                let th = t as f64 * std::f64::consts::TAU / 16.0;
                worst_lim = worst_lim.max(
                    (analytic_tomogram(&lim, x, th).unwrap() - tomogram_polynomial(&lim, x, th).unwrap()).abs(),
                );
                worst_fin = worst_fin.max(
                    (analytic_tomogram(&fin, x, th).unwrap() - tomogram_polynomial(&fin, x, th).unwrap()).abs(),
                );
            }
        }
        assert!(worst_lim <= 1e-14, "{worst_lim}");
        assert!(worst_fin > 1e-3, "{worst_fin}");
    }

    #[test]
    fn tomogram_is_normalized() {
        let n = 4001;
        let h = 16.0 / (n - 1) as f64;
        for &(delta, f, k2) in &[(0.0, 1.0, 1e3), (2.0, 5.0, 10.0), (-1.0, 10.0, 1.0)] {
            let p = DeepQuantumParams::finite(delta, f, 1.0, k2);
            for theta in [0.0, 1.3, 3.0] {
                let mut sum = 0.0;
                for i in 0..n {
                    let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                    sum += w * analytic_tomogram(&p, -8.0 + h * i as f64, theta).unwrap();
                }
                assert_abs_diff_eq!(sum * h, 1.0, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn mean_excitation_values() {
        assert_abs_diff_eq!(mean_excitation(0.0, 3.0, 1.0), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mean_excitation(1.0, 0.0, 1.0), 1.0 / 3.0 + 4.0 / 51.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mean_excitation(1.0, 0.0, 1.0), 0.41176, epsilon = 1e-5);
        assert_abs_diff_eq!(mean_excitation(1e8, 1.0, 1.0), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn coherence_values() {
        assert_eq!(coherence(0.0, 2.0, 1.0), 0.0);
        for delta in [0.0, 1.0, -4.0] {
            let fc = critical_drive(delta, 1.0);
            assert_abs_diff_eq!(coherence(fc, delta, 1.0), 1.0 / (6.0 * 2f64.sqrt()), epsilon = 1e-15);
        }
        assert_abs_diff_eq!(1.0 / (6.0 * 2f64.sqrt()), 0.11785, epsilon = 1e-5);
        assert!(coherence(1e9, 0.0, 1.0) < 1e-8);
    }

    #[test]
    fn critical_drive_values() {
        assert_abs_diff_eq!(critical_drive(0.0, 1.0), (9.0f64 / 8.0).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(critical_drive(0.0, 1.0), 1.06066, epsilon = 1e-5);
        assert_abs_diff_eq!(critical_drive(2.0, 1.0), 1.76777, epsilon = 1e-5);
        assert_abs_diff_eq!(critical_drive(6.0, 3.0), 3.0 * critical_drive(2.0, 1.0), epsilon = 1e-14);
    }

    #[test]
    fn gradient_vanishes_at_critical_drive() {
        for delta in [0.0, 2.0, 5.0] {
            let fc = critical_drive(delta, 1.0);
            assert!(coherence_gradient(fc, delta, 1.0).abs() <= 1e-12);
            assert!(coherence_gradient(0.5 * fc, delta, 1.0) > 0.0);
            assert!(coherence_gradient(2.0 * fc, delta, 1.0) < 0.0);
        }
    }

    proptest! {
        #[test]
        fn closed_form_invariants(
            delta in -5.0f64..5.0, f in 0.0f64..10.0, k1 in 0.1f64..3.0, k2 in 0.5f64..1e5,
        ) {
            let p = DeepQuantumParams::finite(delta, f, k1, k2);
            let s = analytic_steady_state(&p).unwrap();
            prop_assert!((s.rho00 + s.rho11 + s.rho22 - 1.0).abs() <= 1e-14);
            prop_assert!(s.rho01.norm_sqr() <= s.rho00 * s.rho11);
            prop_assert!(s.rho22 >= -1e-14);
            let res = stationarity_residuals(&s, &p).unwrap();
            for i in [0, 1, 3] {
                prop_assert!(res[i].norm() <= 1e-12 * (1.0 + k2), "{:?}", res);
            }
            // level-2 balance is off by the decay 3 k1 r22 that the three-level
            // truncation drops; it vanishes only as k2 -> infinity
            prop_assert!((res[2].re + 3.0 * k1 * s.rho22).abs() <= 1e-12 * (1.0 + k2));
        }

        #[test]
        fn limit_matches_scalar_formulas(delta in -5.0f64..5.0, f in 0.0f64..10.0, k1 in 0.1f64..3.0) {
            let s = analytic_steady_state(&DeepQuantumParams::limit(delta, f, k1)).unwrap();
            prop_assert!((s.rho11 + 2.0 * s.rho22 - mean_excitation(f, delta, k1)).abs() <= 1e-14);
            prop_assert!((s.rho01.norm() - coherence(f, delta, k1)).abs() <= 1e-14);
        }

        #[test]
        fn gradient_matches_central_difference(delta in -5.0f64..5.0, f in 0.0f64..10.0) {
            let h = 1e-5;
            let fd = (coherence(f + h, delta, 1.0) - coherence(f - h, delta, 1.0)) / (2.0 * h);
            prop_assert!((coherence_gradient(f, delta, 1.0) - fd).abs() <= 1e-6);
        }

        #[test]
        fn tongue_shape(f in 0.0f64..10.0, df in 0.01f64..1.0, delta in 0.0f64..5.0) {
            prop_assert!(mean_excitation(f + df, delta, 1.0) > mean_excitation(f, delta, 1.0));
            prop_assert!(mean_excitation(f, 0.0, 1.0) >= mean_excitation(f, delta, 1.0));
        }
    }
}
