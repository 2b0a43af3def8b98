//! Scalar synchronization measures of a single density matrix.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::DensityMatrix;
use crate::tomography::{nonclassical_area_estimate, DEFAULT_N_THETA};

/// Below this mean occupation g2 is reported as undefined.
pub const G2_MIN_OCCUPATION: f64 = 1e-9;
pub const DEFAULT_REGIME_TOL: f64 = 0.1;

pub fn mean_occupation(rho: &DensityMatrix) -> f64 {
    rho.populations()
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum()
}

/// `<a^dag a^dag a a> / <a^dag a>^2`, or `None` when the mode is essentially empty.
pub fn g2_zero(rho: &DensityMatrix) -> Option<f64> {
    let pops = rho.populations();
    let mut first = 0.0;
    let mut second = 0.0;
    for (n, p) in pops.iter().enumerate() {
        let n = n as f64;
        first += n * p;
        second += n * (n - 1.0) * p;
    }
    if first < G2_MIN_OCCUPATION {
        None
    } else {
        Some(second / (first * first))
    }
}

/// `|rho_01|`.
pub fn numeric_coherence(rho: &DensityMatrix) -> f64 {
    rho.get(0, 1).norm()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    Antibunched,
    SingleQuantum,
    CollectiveBursts,
    Undefined,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Antibunched => "antibunched",
            Regime::SingleQuantum => "single_quantum",
            Regime::CollectiveBursts => "collective_bursts",
            Regime::Undefined => "undefined",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Regime::Antibunched,
            Regime::SingleQuantum,
            Regime::CollectiveBursts,
            Regime::Undefined,
        ]
        .into_iter()
        .find(|r| r.as_str() == s)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown regime label {s:?}")))
    }
}

/// Bands of g2 around 1: below `1 - tol`, within `tol`, above `1 + tol`.
pub fn classify_regime(g2: Option<f64>, tol: f64) -> Result<Regime> {
    if !(tol > 0.0 && tol < 0.5) {
        return Err(Error::InvalidParameter(format!("regime tolerance {tol} not in (0, 0.5)")));
    }
    Ok(match g2 {
        None => Regime::Undefined,
        Some(g) if g < 1.0 - tol => Regime::Antibunched,
        Some(g) if g > 1.0 + tol => Regime::CollectiveBursts,
        Some(_) => Regime::SingleQuantum,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsOptions {
    pub n_theta: usize,
    pub regime_tol: f64,
}

impl Default for MetricsOptions {
    fn default() -> Self {
        Self {
            n_theta: DEFAULT_N_THETA,
            regime_tol: DEFAULT_REGIME_TOL,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub g2: Option<f64>,
    pub mean_n: f64,
    pub coherence_01: f64,
    pub delta: f64,
    pub delta_error: f64,
    /// Solver-health diagnostic, `tr(rho^2)`.
    pub purity: f64,
    pub regime: Regime,
    pub regime_tol: f64,
}

pub fn all_metrics(rho: &DensityMatrix, options: &MetricsOptions) -> Result<MetricsRecord> {
    let area = nonclassical_area_estimate(rho, options.n_theta)?;
    let g2 = g2_zero(rho);
    Ok(MetricsRecord {
        g2,
        mean_n: mean_occupation(rho),
        coherence_01: numeric_coherence(rho),
        delta: area.delta,
        delta_error: area.error,
        purity: rho.purity(),
        regime: classify_regime(g2, options.regime_tol)?,
        regime_tol: options.regime_tol,
    })
}
