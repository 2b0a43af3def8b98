//! Steady states, tomograms and synchronization measures of a driven quantum
//! van der Pol oscillator.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod fock;
pub mod io;
pub mod liouvillian;
pub mod metrics;
pub mod steady;
pub mod sweep;
pub mod tomography;
pub mod validate;

pub use error::{Error, Result};
