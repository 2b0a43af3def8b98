//! Lindblad generator of the driven van der Pol oscillator,
//!
//! ```text
//! drho/dt = -i[D a^dag a + F (a + a^dag), rho] + k1 D[a^dag] rho + k2 D[a^2] rho,
//! D[O] rho = (2 O rho O^dag - O^dag O rho - rho O^dag O) / 2,
//! ```
//!
//! in the rotating frame of the drive. Density matrices are vectorized by
//! column stacking: `vec(rho)[m + n*dim] = rho[m][n]`, so that
//! `vec(A X B) = (B^T (x) A) vec(X)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{CMatrix, DensityMatrix, FockSpace, Operator, C64, I, ONE, ZERO};

/// Below this `kappa2/kappa1` the model has no cutoff-independent steady state
/// at the drives of interest; callers must choose the cutoff themselves.
pub const CUTOFF_KAPPA2_THRESHOLD: f64 = 0.1;

/// Physical parameters, all in units of the linear gain `kappa1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub detuning: f64,
    pub drive: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub dim: usize,
}

impl SystemParams {
    /// `kappa1 = 1` and the automatic Fock cutoff.
    pub fn new(detuning: f64, drive: f64, kappa2: f64) -> Result<Self> {
        let dim = auto_dim(drive, 1.0, kappa2)?;
        Self::with_dim(detuning, drive, 1.0, kappa2, dim)
    }

    pub fn with_dim(detuning: f64, drive: f64, kappa1: f64, kappa2: f64, dim: usize) -> Result<Self> {
        let p = Self {
            detuning,
            drive,
            kappa1,
            kappa2,
            dim,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.detuning, self.drive, self.kappa1, self.kappa2]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("parameters must be finite".into()));
        }
        if self.kappa1 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "kappa1 must be positive, got {}",
                self.kappa1
            )));
        }
        if self.kappa2 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "kappa2 must be non-negative, got {}",
                self.kappa2
            )));
        }
        if self.drive < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "drive must be non-negative, got {}",
                self.drive
            )));
        }
        if self.dim < 3 {
            return Err(Error::InvalidDimension {
                dim: self.dim,
                min: 3,
            });
        }
        Ok(())
    }

    pub fn space(&self) -> FockSpace {
        FockSpace::new(self.dim).expect("validated dim")
    }

    /// True when the steady state depends on the Fock cutoff (weak nonlinear damping).
    pub fn cutoff_dependent(&self) -> bool {
        self.kappa2 / self.kappa1 < CUTOFF_KAPPA2_THRESHOLD
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning = detuning;
        self
    }

    pub fn with_cutoff(mut self, dim: usize) -> Self {
        self.dim = dim;
        self
    }
}

/// Default cutoff `max(12, ceil(6 (1 + F/sqrt(k2))))` in units of `kappa1`.
pub fn auto_dim(drive: f64, kappa1: f64, kappa2: f64) -> Result<usize> {
    let k2 = kappa2 / kappa1;
    if !(k2 >= CUTOFF_KAPPA2_THRESHOLD) {
        return Err(Error::CutoffRequired(kappa2));
    }
    let f = drive / kappa1;
    Ok(12.max((6.0 * (1.0 + f / k2.sqrt())).ceil() as usize))
}

pub fn vec_index(dim: usize, m: usize, n: usize) -> usize {
    m + n * dim
}

pub fn vectorize(rho: &DensityMatrix) -> Vec<C64> {
    // nalgebra storage is column-major, which is exactly column stacking
    rho.entries().as_slice().to_vec()
}

pub fn unvectorize(space: FockSpace, v: &[C64]) -> Result<DensityMatrix> {
    let d = space.dim();
    if v.len() != d * d {
        return Err(Error::ShapeMismatch {
            expected: format!("vector of length {}", d * d),
            found: format!("length {}", v.len()),
        });
    }
    DensityMatrix::from_matrix(space, CMatrix::from_column_slice(d, d, v))
}

/// Sparse (CSR) `dim^2 x dim^2` generator acting on `vec(rho)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    space: FockSpace,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl Superoperator {
    /// Duplicates are summed; entries that end up exactly zero are dropped.
    pub fn from_triplets(space: FockSpace, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        let size = space.dim() * space.dim();
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; size + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < size && c < size, "triplet ({r}, {c}) outside {size}x{size}");
            if rows.last() == Some(&r) && cols.last() == Some(&c) {
                *vals.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                cols.push(c);
                vals.push(v);
            }
        }
        let mut keep_cols = Vec::with_capacity(cols.len());
        let mut keep_vals = Vec::with_capacity(vals.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v != ZERO {
                row_ptr[r + 1] += 1;
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for r in 0..size {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            space,
            row_ptr,
            cols: keep_cols,
            vals: keep_vals,
        }
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    /// Side length `dim^2`.
    pub fn size(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.size()];
        self.apply_into(x, &mut y);
        y
    }

    pub(crate) fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }

    /// `L(rho)` as a matrix.
    pub fn act(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_space(rho.space())?;
        unvectorize(self.space, &self.apply(&vectorize(rho)))
    }

    pub fn to_dense(&self) -> CMatrix {
        let n = self.size();
        let mut m = CMatrix::zeros(n, n);
        for r in 0..n {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// Largest entrywise difference over the union of both sparsity patterns.
    pub fn max_abs_diff(&self, other: &Superoperator) -> Result<f64> {
        self.check_space(other.space)?;
        let mut worst: f64 = 0.0;
        for r in 0..self.size() {
            for (c, v) in self.row(r) {
                worst = worst.max((v - other.get(r, c)).norm());
            }
            for (c, v) in other.row(r) {
                worst = worst.max((v - self.get(r, c)).norm());
            }
        }
        Ok(worst)
    }

    /// Gershgorin bound on the spectral radius.
    pub fn gershgorin_radius(&self) -> f64 {
        (0..self.size())
            .map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Lower and upper bandwidths of the sparsity pattern.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut lower = 0;
        let mut upper = 0;
        for r in 0..self.size() {
            for (c, _) in self.row(r) {
                if c < r {
                    lower = lower.max(r - c);
                } else {
                    upper = upper.max(c - r);
                }
            }
        }
        (lower, upper)
    }

    fn check_space(&self, space: FockSpace) -> Result<()> {
        if space != self.space {
            return Err(Error::ShapeMismatch {
                expected: format!("dim {}", self.space.dim()),
                found: format!("dim {}", space.dim()),
            });
        }
        Ok(())
    }
}

/// Adds `coeff * (A (x) B)` to `out`, skipping structural zeros.
fn push_kron(out: &mut Vec<(usize, usize, C64)>, a: &CMatrix, b: &CMatrix, coeff: C64) {
    let nb = b.nrows();
    let nz = |m: &CMatrix| -> Vec<(usize, usize, C64)> {
        let mut v = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                if m[(i, j)] != ZERO {
                    v.push((i, j, m[(i, j)]));
                }
            }
        }
        v
    };
    let bnz = nz(b);
    for (ia, ja, va) in nz(a) {
        for &(ib, jb, vb) in &bnz {
            out.push((ia * nb + ib, ja * nb + jb, coeff * va * vb));
        }
    }
}

/// Adds `rate * D[op]` in superoperator form.
fn push_dissipator(out: &mut Vec<(usize, usize, C64)>, op: &Operator, rate: f64) {
    if rate == 0.0 {
        return;
    }
    let d = op.space().dim();
    let id = CMatrix::identity(d, d);
    let o = op.entries();
    let odo = o.adjoint() * o;
    let r = C64::new(rate, 0.0);
    // O rho O^dag  ->  conj(O) (x) O
    push_kron(out, &o.map(|z| z.conj()), o, r);
    push_kron(out, &id, &odo, -0.5 * r);
    push_kron(out, &odo.transpose(), &id, -0.5 * r);
}

pub fn hamiltonian(params: &SystemParams) -> Operator {
    let s = params.space();
    let a = Operator::annihilation(s);
    let drive = a.add(&a.adjoint()).expect("same space");
    Operator::number(s)
        .scale(C64::new(params.detuning, 0.0))
        .add(&drive.scale(C64::new(params.drive, 0.0)))
        .expect("same space")
}

/// Generator assembled from Kronecker products of the truncated ladder operators.
pub fn build_operator_form(params: &SystemParams) -> Superoperator {
    let s = params.space();
    let d = s.dim();
    let id = CMatrix::identity(d, d);
    let h = hamiltonian(params);
    let mut t = Vec::new();
    // -i (H rho - rho H)
    push_kron(&mut t, &id, h.entries(), -I);
    push_kron(&mut t, &h.entries().transpose(), &id, I);
    push_dissipator(&mut t, &Operator::creation(s), params.kappa1);
    push_dissipator(&mut t, &Operator::squared_annihilation(s), params.kappa2);
    Superoperator::from_triplets(s, t)
}

/// Generator assembled entry by entry from the `d rho_mn / dt` recursion.
///
/// Terms that reference a level outside `[0, dim)` are dropped. The gain
/// anticommutator `(m + n + 2)` splits into `(m + 1) + (n + 1)`, each piece
/// passing through level `m + 1` (resp. `n + 1`), so each is dropped on its
/// own at the top level; that keeps the generator trace preserving and equal
/// to the truncated operator algebra.
pub fn build_element_form(params: &SystemParams) -> Superoperator {
    let s = params.space();
    let d = s.dim();
    let (delta, f, k1, k2) = (params.detuning, params.drive, params.kappa1, params.kappa2);
    let sq = |x: usize| (x as f64).sqrt();
    let mut t = Vec::with_capacity(8 * d * d);
    for n in 0..d {
        for m in 0..d {
            let row = vec_index(d, m, n);
            let (mf, nf) = (m as f64, n as f64);

            let mut diag = C64::new(0.0, -delta * (mf - nf));
            let mut gain_out = 0.0;
            if m + 1 < d {
                gain_out += mf + 1.0;
            }
            if n + 1 < d {
                gain_out += nf + 1.0;
            }
            diag -= 0.5 * k1 * gain_out;
            diag -= 0.5 * k2 * (mf * mf + nf * nf - mf - nf);
            t.push((row, row, diag));

            if f != 0.0 {
                let drive = C64::new(0.0, -f);
                if m >= 1 {
                    t.push((row, vec_index(d, m - 1, n), drive * sq(m)));
                }
                if m + 1 < d {
                    t.push((row, vec_index(d, m + 1, n), drive * sq(m + 1)));
                }
                if n >= 1 {
                    t.push((row, vec_index(d, m, n - 1), -drive * sq(n)));
                }
                if n + 1 < d {
                    t.push((row, vec_index(d, m, n + 1), -drive * sq(n + 1)));
                }
            }
            if m >= 1 && n >= 1 {
                t.push((row, vec_index(d, m - 1, n - 1), C64::new(k1 * sq(m * n), 0.0)));
            }
            if k2 != 0.0 && m + 2 < d && n + 2 < d {
                let c = ((mf + 1.0) * (mf + 2.0) * (nf + 1.0) * (nf + 2.0)).sqrt();
                t.push((row, vec_index(d, m + 2, n + 2), C64::new(k2 * c, 0.0)));
            }
        }
    }
    Superoperator::from_triplets(s, t)
}

/// `max |L vec(rho)|`.
pub fn residual(l: &Superoperator, rho: &DensityMatrix) -> Result<f64> {
    l.check_space(rho.space())?;
    Ok(l.apply(&vectorize(rho))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

/// Largest `dt * scale` accepted by [`evolve`].
pub const STABILITY_LIMIT: f64 = 0.1;

/// Spectral-scale estimate used by the step-size guard.
pub fn spectral_scale(params: &SystemParams) -> f64 {
    let d = params.dim as f64;
    params.kappa2 * d * d + (params.kappa1 + params.detuning.abs()) * d + 2.0 * params.drive * d.sqrt()
}

/// Fixed-step classical RK4 integration of `d vec(rho)/dt = L vec(rho)`.
///
/// The step is shrunk to `t_final / ceil(t_final / dt)` so the run ends exactly
/// at `t_final`.
pub fn evolve(rho0: &DensityMatrix, params: &SystemParams, t_final: f64, dt: f64) -> Result<DensityMatrix> {
    params.validate()?;
    if !(t_final > 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t_final and dt must be positive (got {t_final}, {dt})"
        )));
    }
    let max_dt = STABILITY_LIMIT / spectral_scale(params);
    if dt > max_dt {
        return Err(Error::StepSize { dt, max_dt });
    }
    let l = build_operator_form(params);
    l.check_space(rho0.space())?;

    let steps = (t_final / dt).ceil() as usize;
    let h = t_final / steps as f64;
    let n = l.size();
    let mut x = vectorize(rho0);
    let (mut k1, mut k2, mut k3, mut k4) = (vec![ZERO; n], vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]);
    let mut tmp = vec![ZERO; n];
    let half = C64::new(0.5 * h, 0.0);
    let full = C64::new(h, 0.0);
    let sixth = C64::new(h / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);
    for _ in 0..steps {
        l.apply_into(&x, &mut k1);
        for i in 0..n {
            tmp[i] = x[i] + half * k1[i];
        }
        l.apply_into(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + half * k2[i];
        }
        l.apply_into(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + full * k3[i];
        }
        l.apply_into(&tmp, &mut k4);
        for i in 0..n {
            x[i] += sixth * (k1[i] + two * (k2[i] + k3[i]) + k4[i]);
        }
    }
    unvectorize(rho0.space(), &x)
}

pub(crate) fn identity_trace_vector(dim: usize) -> Vec<C64> {
    let mut t = vec![ZERO; dim * dim];
    for m in 0..dim {
        t[vec_index(dim, m, m)] = ONE;
    }
    t
}
