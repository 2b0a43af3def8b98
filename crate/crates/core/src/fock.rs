//! Truncated Fock-space operator algebra.
//!
//! Basis states are ordered by ascending photon number, `|0>, |1>, ..., |dim-1>`,
//! everywhere in the crate. Operators and states are dense complex matrices; the
//! dimensions that matter here stay well below a few hundred levels.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Hermiticity tolerance of a valid density matrix.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Trace tolerance of a valid density matrix.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted as numerical noise.
pub const PSD_TOL: f64 = 1e-8;

/// A single bosonic mode truncated to `dim` levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockSpace {
    dim: usize,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension { dim, min: 2 });
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

pub fn make_space(dim: usize) -> Result<FockSpace> {
    FockSpace::new(dim)
}

fn check_square(space: FockSpace, m: &CMatrix) -> Result<()> {
    let d = space.dim();
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::ShapeMismatch {
            expected: format!("{d}x{d}"),
            found: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    Ok(())
}

fn check_same_space(a: FockSpace, b: FockSpace) -> Result<()> {
    if a != b {
        return Err(Error::ShapeMismatch {
            expected: format!("dim {}", a.dim()),
            found: format!("dim {}", b.dim()),
        });
    }
    Ok(())
}

/// A linear operator on a truncated Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: FockSpace,
    entries: CMatrix,
}

impl Operator {
    pub fn from_matrix(space: FockSpace, entries: CMatrix) -> Result<Self> {
        check_square(space, &entries)?;
        Ok(Self { space, entries })
    }

    pub fn identity(space: FockSpace) -> Self {
        Self {
            space,
            entries: CMatrix::identity(space.dim(), space.dim()),
        }
    }

    /// `a|n> = sqrt(n)|n-1>`.
    pub fn annihilation(space: FockSpace) -> Self {
        let d = space.dim();
        let mut entries = CMatrix::zeros(d, d);
        for n in 1..d {
            entries[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
        }
        Self { space, entries }
    }

    pub fn creation(space: FockSpace) -> Self {
        Self::annihilation(space).adjoint()
    }

    pub fn number(space: FockSpace) -> Self {
        Self::creation(space)
            .compose(&Self::annihilation(space))
            .expect("same space")
    }

    pub fn squared_annihilation(space: FockSpace) -> Self {
        let a = Self::annihilation(space);
        a.compose(&a).expect("same space")
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.entries[(m, n)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space,
            entries: self.entries.adjoint(),
        }
    }

    /// Operator product `self * other`.
    pub fn compose(&self, other: &Operator) -> Result<Self> {
        check_same_space(self.space, other.space)?;
        Ok(Self {
            space: self.space,
            entries: &self.entries * &other.entries,
        })
    }

    pub fn commutator(&self, other: &Operator) -> Result<Self> {
        check_same_space(self.space, other.space)?;
        Ok(Self {
            space: self.space,
            entries: &self.entries * &other.entries - &other.entries * &self.entries,
        })
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            space: self.space,
            entries: &self.entries * factor,
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        check_same_space(self.space, other.space)?;
        Ok(Self {
            space: self.space,
            entries: &self.entries + &other.entries,
        })
    }

    pub fn apply(&self, state: &[C64]) -> Result<Vec<C64>> {
        if state.len() != self.space.dim() {
            return Err(Error::ShapeMismatch {
                expected: format!("vector of length {}", self.space.dim()),
                found: format!("length {}", state.len()),
            });
        }
        let v = DVector::from_column_slice(state);
        Ok((&self.entries * v).iter().copied().collect())
    }
}

/// A density matrix in the truncated Fock basis.
///
/// Construction only checks the shape; [`validate_density`] reports the
/// physical checks (Hermiticity, unit trace, positivity).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: FockSpace,
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn from_matrix(space: FockSpace, entries: CMatrix) -> Result<Self> {
        check_square(space, &entries)?;
        Ok(Self { space, entries })
    }

    /// Like [`DensityMatrix::from_matrix`] but rejects states failing [`validate_density`].
    pub fn checked(space: FockSpace, entries: CMatrix) -> Result<Self> {
        let rho = Self::from_matrix(space, entries)?;
        let report = validate_density(&rho);
        if !report.passed {
            return Err(Error::InvalidState(format!("{report:?}")));
        }
        Ok(rho)
    }

    pub fn fock(space: FockSpace, n: usize) -> Result<Self> {
        if n >= space.dim() {
            return Err(Error::LevelOutOfRange {
                n,
                max: space.dim() - 1,
            });
        }
        let mut entries = CMatrix::zeros(space.dim(), space.dim());
        entries[(n, n)] = ONE;
        Ok(Self { space, entries })
    }

    pub fn vacuum(space: FockSpace) -> Self {
        Self::fock(space, 0).expect("dim >= 2")
    }

    /// Diagonal mixture with the given level populations (padded with zeros).
    pub fn diagonal(space: FockSpace, populations: &[f64]) -> Result<Self> {
        if populations.len() > space.dim() {
            return Err(Error::LevelOutOfRange {
                n: populations.len() - 1,
                max: space.dim() - 1,
            });
        }
        let mut entries = CMatrix::zeros(space.dim(), space.dim());
        for (n, &p) in populations.iter().enumerate() {
            entries[(n, n)] = C64::new(p, 0.0);
        }
        Ok(Self { space, entries })
    }

    /// `|psi><psi|` for the normalized version of `amplitudes`.
    pub fn pure(space: FockSpace, amplitudes: &[C64]) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::ShapeMismatch {
                expected: format!("vector of length {}", space.dim()),
                found: format!("length {}", amplitudes.len()),
            });
        }
        let v = DVector::from_column_slice(amplitudes);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v = v / C64::new(norm, 0.0);
        Ok(Self {
            space,
            entries: &v * v.adjoint(),
        })
    }

    /// Truncated coherent state `|alpha>`, renormalized inside the cutoff.
    pub fn coherent(space: FockSpace, alpha: C64) -> Self {
        let mut amps = Vec::with_capacity(space.dim());
        let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        for n in 0..space.dim() {
            if n > 0 {
                c = c * alpha / (n as f64).sqrt();
            }
            amps.push(c);
        }
        Self::pure(space, &amps).expect("nonzero amplitudes")
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.entries[(m, n)]
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.entries[(n, n)].re).collect()
    }

    pub fn purity(&self) -> f64 {
        // tr(rho^2) = sum |rho_mn|^2 for Hermitian rho
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `(rho + rho^dagger)/2` rescaled to unit trace.
    pub fn hermitized(&self) -> Self {
        let h = (&self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0);
        let tr = h.trace().re;
        Self {
            space: self.space,
            entries: h / C64::new(tr, 0.0),
        }
    }

    /// Phase-space rotation `exp(-i phi n) rho exp(i phi n)`.
    pub fn rotated(&self, phi: f64) -> Self {
        let d = self.dim();
        let entries = CMatrix::from_fn(d, d, |m, n| {
            self.entries[(m, n)] * C64::from_polar(1.0, -phi * (m as f64 - n as f64))
        });
        Self {
            space: self.space,
            entries,
        }
    }

    /// Copy into a larger space, padding with zeros.
    pub fn embed(&self, space: FockSpace) -> Result<Self> {
        if space.dim() < self.dim() {
            return Err(Error::ShapeMismatch {
                expected: format!("dim >= {}", self.dim()),
                found: format!("dim {}", space.dim()),
            });
        }
        let mut entries = CMatrix::zeros(space.dim(), space.dim());
        entries
            .view_mut((0, 0), (self.dim(), self.dim()))
            .copy_from(&self.entries);
        Ok(Self { space, entries })
    }

    /// Largest entrywise modulus difference; spaces must agree.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        check_same_space(self.space, other.space)?;
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// `tr(rho * op)`.
pub fn expectation(rho: &DensityMatrix, op: &Operator) -> Result<C64> {
    check_same_space(rho.space, op.space)?;
    let d = rho.dim();
    let mut acc = ZERO;
    for m in 0..d {
        for n in 0..d {
            acc += rho.entries[(m, n)] * op.entries[(n, m)];
        }
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
    pub passed: bool,
}

pub fn validate_density(rho: &DensityMatrix) -> DiagnosticsReport {
    let m = &rho.entries;
    let trace_error = (m.trace() - ONE).norm();
    let hermiticity_error = m
        .iter()
        .zip(m.adjoint().iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let min_eigenvalue = SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let passed = trace_error <= TRACE_TOL
        && hermiticity_error <= HERMITICITY_TOL
        && min_eigenvalue >= -PSD_TOL;
    DiagnosticsReport {
        trace_error,
        hermiticity_error,
        min_eigenvalue,
        passed,
    }
}
