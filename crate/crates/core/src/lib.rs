//! Hybrid quantum-spectral solver for the 2D Poisson equation with
//! homogeneous Dirichlet boundary conditions.
//!
//! The quantum route amplitude-encodes the sampled source, applies a
//! register-wise 2D QFT, estimates modal magnitudes from measurement shots,
//! applies an empirical correction profile, divides by the Laplacian
//! eigenvalues, and resums the solution in the sine eigenbasis. Classical
//! baselines (per-mode quadrature, a DST fast path, and a finite-difference
//! oracle) pin the accuracy, and a phase-level benchmark harness compares
//! the two pipelines.

pub mod bench;
pub mod classical;
pub mod domain;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod qsim;
pub mod spectral;

pub use error::{Error, Result};
