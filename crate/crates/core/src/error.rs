//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid domain geometry or discretization parameters.
    #[error("domain error: {0}")]
    Domain(String),

    /// Source is numerically zero at every grid node (e.g. an aliased sine).
    #[error("source is numerically zero on the grid (2-norm {norm:.3e})")]
    ZeroSource { norm: f64 },

    /// Amplitude vector norm deviates from 1 beyond the stated tolerance.
    #[error("amplitude norm {norm} deviates from 1 beyond {tolerance}")]
    Normalization { norm: f64, tolerance: f64 },

    /// Truncation mode counts outside [1, N] x [1, M].
    #[error("truncation ({taux}, {tauy}) outside [1, {nx}] x [1, {ny}]")]
    Truncation {
        taux: usize,
        tauy: usize,
        nx: usize,
        ny: usize,
    },

    /// Solution fields evaluated on different point sets.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Invalid quadrature specification.
    #[error("quadrature error: {0}")]
    Quadrature(String),

    /// Iterative solver failed to reach its residual target.
    #[error("solver did not converge: residual {residual:.3e} after {iterations} iterations (target {target:.3e})")]
    Convergence {
        residual: f64,
        target: f64,
        iterations: usize,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
