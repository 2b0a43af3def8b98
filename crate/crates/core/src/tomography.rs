//! Homodyne tomograms, quadrature noise and Wigner maps.
//!
//! The overlap convention is `<n|X, theta> = psi_n(X) e^{i n theta}` throughout.
//! Phase space uses `alpha = (x + i p)/sqrt(2)`, so `X_theta = x cos(theta) + p sin(theta)`.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, C64, ZERO};

/// Quadrature values beyond this underflow `psi_0`.
pub const MAX_QUADRATURE: f64 = 30.0;
/// Highest Fock level the wavefunction recurrence is used for.
pub const MAX_LEVEL: usize = 512;
pub const NORMALIZATION_TOL: f64 = 1e-6;
const IMAG_RESIDUE_TOL: f64 = 1e-12;
const VARIANCE_TOL: f64 = 1e-10;
pub const DEFAULT_N_THETA: usize = 360;
pub const MIN_N_THETA: usize = 16;
/// Populations below this do not count toward the Wigner extent check.
const SUPPORT_TOL: f64 = 1e-10;

/// `psi_0..=psi_nmax` at `x`.
pub fn quadrature_wavefunctions(nmax: usize, x: f64) -> Result<Vec<f64>> {
    if nmax > MAX_LEVEL {
        return Err(Error::LevelOutOfRange { n: nmax, max: MAX_LEVEL });
    }
    if !(x.abs() <= MAX_QUADRATURE) {
        return Err(Error::QuadratureOutOfRange(x));
    }
    let mut psi = Vec::with_capacity(nmax + 1);
    psi.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if nmax >= 1 {
        psi.push(2f64.sqrt() * x * psi[0]);
    }
    for k in 1..nmax {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * psi[k] - (kf / (kf + 1.0)).sqrt() * psi[k - 1];
        psi.push(next);
    }
    Ok(psi)
}

pub fn quadrature_wavefunction(n: usize, x: f64) -> Result<f64> {
    Ok(quadrature_wavefunctions(n, x)?[n])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_x: usize,
    pub n_theta: usize,
}

impl QuadratureGrid {
    pub fn new(x_min: f64, x_max: f64, n_x: usize, n_theta: usize) -> Result<Self> {
        let g = Self { x_min, x_max, n_x, n_theta };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min < self.x_max) || !self.x_min.is_finite() || !self.x_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "quadrature range [{}, {}] is empty",
                self.x_min, self.x_max
            )));
        }
        if self.x_min.abs().max(self.x_max.abs()) > MAX_QUADRATURE {
            return Err(Error::QuadratureOutOfRange(self.x_min.abs().max(self.x_max.abs())));
        }
        if self.n_x < 2 || self.n_theta < 4 {
            return Err(Error::InvalidParameter(format!(
                "grid needs n_x >= 2 and n_theta >= 4, got {} x {}",
                self.n_x, self.n_theta
            )));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_x - 1) as f64
    }

    pub fn xs(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.n_x).map(|i| self.x_min + h * i as f64).collect()
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.n_theta)
            .map(|t| TAU * t as f64 / self.n_theta as f64)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tomogram {
    pub grid: QuadratureGrid,
    /// `n_theta x n_x`.
    pub values: DMatrix<f64>,
}

impl Tomogram {
    pub fn get(&self, theta_index: usize, x_index: usize) -> f64 {
        self.values[(theta_index, x_index)]
    }

    fn trapezoid(&self, t: usize, f: impl Fn(f64) -> f64) -> f64 {
        let h = self.grid.step();
        let xs = self.grid.xs();
        let n = xs.len();
        let mut s = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            s += w * f(x) * self.values[(t, i)];
        }
        s * h
    }

    pub fn row_integral(&self, theta_index: usize) -> f64 {
        self.trapezoid(theta_index, |_| 1.0)
    }

    /// Standard deviation of `X_theta` estimated from the sampled row.
    pub fn row_std(&self, theta_index: usize) -> f64 {
        let norm = self.row_integral(theta_index);
        let m1 = self.trapezoid(theta_index, |x| x) / norm;
        let m2 = self.trapezoid(theta_index, |x| x * x) / norm;
        (m2 - m1 * m1).max(0.0).sqrt()
    }

    /// Largest change of the tomogram with `theta` at fixed `X`.
    pub fn theta_oscillation(&self) -> f64 {
        (0..self.grid.n_x)
            .map(|i| {
                let col = self.values.column(i);
                col.max() - col.min()
            })
            .fold(0.0, f64::max)
    }
}

/// Tomogram `omega(X, theta) = <X, theta| rho |X, theta>` on `grid`.
pub fn tomogram(rho: &DensityMatrix, grid: &QuadratureGrid) -> Result<Tomogram> {
    grid.validate()?;
    let d = rho.dim();
    let xs = grid.xs();
    let psi: Vec<Vec<f64>> = xs
        .iter()
        .map(|&x| quadrature_wavefunctions(d - 1, x))
        .collect::<Result<_>>()?;
    let rho_m = rho.entries();
    let rows: Vec<Result<Vec<f64>>> = grid
        .thetas()
        .into_par_iter()
        .map(|theta| {
            let phases: Vec<C64> = (0..d).map(|k| C64::from_polar(1.0, k as f64 * theta)).collect();
            let mut row = Vec::with_capacity(xs.len());
            let mut c = vec![ZERO; d];
            for p in &psi {
                for k in 0..d {
                    c[k] = phases[k] * p[k];
                }
                let mut acc = ZERO;
                for n in 0..d {
                    let mut inner = ZERO;
                    for m in 0..d {
                        inner += c[m].conj() * rho_m[(m, n)];
                    }
                    acc += inner * c[n];
                }
                if acc.im.abs() > IMAG_RESIDUE_TOL {
                    return Err(Error::InvalidState(format!(
                        "tomogram has imaginary residue {:.3e}; state is not Hermitian",
                        acc.im
                    )));
                }
                row.push(acc.re);
            }
            Ok(row)
        })
        .collect();
    let mut values = DMatrix::zeros(grid.n_theta, grid.n_x);
    for (t, row) in rows.into_iter().enumerate() {
        for (i, v) in row?.into_iter().enumerate() {
            values[(t, i)] = v;
        }
    }
    let tomo = Tomogram { grid: *grid, values };
    let leakage = (0..grid.n_theta)
        .map(|t| (1.0 - tomo.row_integral(t)).abs())
        .fold(0.0, f64::max);
    if leakage > NORMALIZATION_TOL {
        return Err(Error::Normalization { leakage });
    }
    Ok(tomo)
}

/// First and second moments of `a`, enough for every `X_theta` variance.
#[derive(Clone, Copy, Debug)]
struct QuadratureMoments {
    a: C64,
    a2: C64,
    n: f64,
}

impl QuadratureMoments {
    fn of(rho: &DensityMatrix) -> Self {
        let d = rho.dim();
        let mut a = ZERO;
        let mut a2 = ZERO;
        let mut n = 0.0;
        for k in 0..d {
            n += k as f64 * rho.get(k, k).re;
            if k + 1 < d {
                a += ((k + 1) as f64).sqrt() * rho.get(k + 1, k);
            }
            if k + 2 < d {
                a2 += (((k + 1) * (k + 2)) as f64).sqrt() * rho.get(k + 2, k);
            }
        }
        Self { a, a2, n }
    }

    fn std_at(&self, theta: f64) -> Result<f64> {
        let mean = 2f64.sqrt() * (self.a * C64::from_polar(1.0, -theta)).re;
        let second = (self.a2 * C64::from_polar(1.0, -2.0 * theta)).re + self.n + 0.5;
        let var = second - mean * mean;
        if var < -VARIANCE_TOL {
            return Err(Error::NegativeVariance(var));
        }
        Ok(var.max(0.0).sqrt())
    }
}

/// Standard deviation of `X_theta` from operator moments.
pub fn quadrature_std(rho: &DensityMatrix, theta: f64) -> Result<f64> {
    QuadratureMoments::of(rho).std_at(theta)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaEstimate {
    pub delta: f64,
    /// `|delta(2 n_theta) - delta(n_theta)|`.
    pub error: f64,
}

fn area_sum(m: &QuadratureMoments, n_theta: usize) -> Result<f64> {
    let mut s = 0.0;
    for t in 0..n_theta {
        s += m.std_at(TAU * t as f64 / n_theta as f64)?;
    }
    Ok(TAU * s / n_theta as f64 - 2f64.sqrt() * PI)
}

/// Nonclassical area `delta = int_0^{2 pi} dX_theta dtheta - sqrt(2) pi`.
pub fn nonclassical_area(rho: &DensityMatrix, n_theta: usize) -> Result<f64> {
    Ok(nonclassical_area_estimate(rho, n_theta)?.delta)
}

/// [`nonclassical_area`] with a quadrature error bound from doubling `n_theta`.
pub fn nonclassical_area_estimate(rho: &DensityMatrix, n_theta: usize) -> Result<AreaEstimate> {
    if n_theta < MIN_N_THETA {
        return Err(Error::InvalidParameter(format!(
            "n_theta = {n_theta} is below {MIN_N_THETA}"
        )));
    }
    let m = QuadratureMoments::of(rho);
    let delta = area_sum(&m, n_theta)?;
    let fine = area_sum(&m, 2 * n_theta)?;
    Ok(AreaEstimate {
        delta,
        error: (fine - delta).abs(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_x: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub n_p: usize,
}

impl Default for PhaseSpaceGrid {
    fn default() -> Self {
        Self::square(5.0, 201)
    }
}

impl PhaseSpaceGrid {
    pub fn square(half_extent: f64, n: usize) -> Self {
        Self {
            x_min: -half_extent,
            x_max: half_extent,
            n_x: n,
            p_min: -half_extent,
            p_max: half_extent,
            n_p: n,
        }
    }

    pub fn half_extent(&self) -> f64 {
        [self.x_min.abs(), self.x_max.abs(), self.p_min.abs(), self.p_max.abs()]
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    fn axis(min: f64, max: f64, n: usize) -> Vec<f64> {
        let h = (max - min) / (n - 1) as f64;
        (0..n).map(|i| min + h * i as f64).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x_min, self.x_max, self.n_x)
    }

    pub fn ps(&self) -> Vec<f64> {
        Self::axis(self.p_min, self.p_max, self.n_p)
    }

    fn validate(&self) -> Result<()> {
        let ok = self.x_min < self.x_max
            && self.p_min < self.p_max
            && self.n_x >= 2
            && self.n_p >= 2
            && self.x_min <= 0.0
            && self.x_max >= 0.0
            && self.p_min <= 0.0
            && self.p_max >= 0.0;
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "phase-space grid must contain the origin with at least 2 points per axis: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WignerMap {
    pub grid: PhaseSpaceGrid,
    /// `n_x x n_p`.
    pub values: DMatrix<f64>,
}

impl WignerMap {
    pub fn integral(&self) -> f64 {
        let hx = (self.grid.x_max - self.grid.x_min) / (self.grid.n_x - 1) as f64;
        let hp = (self.grid.p_max - self.grid.p_min) / (self.grid.n_p - 1) as f64;
        let w = |i: usize, n: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        let mut s = 0.0;
        for i in 0..self.grid.n_x {
            for j in 0..self.grid.n_p {
                s += w(i, self.grid.n_x) * w(j, self.grid.n_p) * self.values[(i, j)];
            }
        }
        s * hx * hp
    }
}

/// Highest occupied level plus one.
fn support_dim(rho: &DensityMatrix) -> usize {
    rho.populations()
        .iter()
        .rposition(|&p| p > SUPPORT_TOL)
        .map_or(1, |n| n + 1)
}

/// Extent a phase-space grid must reach for `rho`.
pub fn required_extent(rho: &DensityMatrix) -> f64 {
    3.0 + (support_dim(rho) as f64).sqrt()
}

struct WignerKernel {
    sqrt: Vec<f64>,
}

impl WignerKernel {
    fn new(d: usize) -> Self {
        Self {
            sqrt: (0..=d).map(|k| (k as f64).sqrt()).collect(),
        }
    }

    // Laguerre recurrence over the upper triangle of rho, one column of
    // displaced-parity matrix elements at a time.
    fn eval(&self, rho: &DensityMatrix, x: f64, p: f64, work: &mut [C64]) -> f64 {
        let d = rho.dim();
        let a = C64::new(x, p) * std::f64::consts::FRAC_1_SQRT_2;
        let a2 = 2.0 * a;
        let s = &self.sqrt;
        work[0] = C64::new((-2.0 * a.norm_sqr()).exp() / PI, 0.0);
        let mut w = rho.get(0, 0).re * work[0].re;
        for n in 1..d {
            work[n] = a2 * work[n - 1] / s[n];
            w += 2.0 * (rho.get(0, n) * work[n]).re;
        }
        for m in 1..d {
            let mut temp = work[m];
            work[m] = (a2.conj() * temp - s[m] * work[m - 1]) / s[m];
            w += (rho.get(m, m) * work[m]).re;
            for n in (m + 1)..d {
                let next = (a2 * work[n - 1] - s[m] * temp) / s[n];
                temp = work[n];
                work[n] = next;
                w += 2.0 * (rho.get(m, n) * work[n]).re;
            }
        }
        w
    }
}

/// Wigner function at a single phase-space point.
pub fn wigner_point(rho: &DensityMatrix, x: f64, p: f64) -> f64 {
    let mut work = vec![ZERO; rho.dim()];
    WignerKernel::new(rho.dim()).eval(rho, x, p, &mut work)
}

/// Wigner function on `grid`; the grid must reach [`required_extent`].
pub fn wigner(rho: &DensityMatrix, grid: &PhaseSpaceGrid) -> Result<WignerMap> {
    grid.validate()?;
    let required = required_extent(rho);
    let extent = grid.half_extent();
    if extent < required {
        return Err(Error::GridTooSmall { extent, required });
    }
    let kernel = WignerKernel::new(rho.dim());
    let ps = grid.ps();
    let rows: Vec<Vec<f64>> = grid
        .xs()
        .into_par_iter()
        .map(|x| {
            let mut work = vec![ZERO; rho.dim()];
            ps.iter().map(|&p| kernel.eval(rho, x, p, &mut work)).collect()
        })
        .collect();
    let values = DMatrix::from_fn(grid.n_x, grid.n_p, |i, j| rows[i][j]);
    Ok(WignerMap { grid: *grid, values })
}
