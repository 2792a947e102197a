//! Rectangular domain, grid discretization, and the source-function catalog.
//!
//! The grid is half-open: each axis holds exactly `2^qubits` nodes including
//! the left boundary and excluding the right, so the sampled values fill the
//! register's Hilbert space dimension exactly. Flattening is x-major (x index
//! outer, y index inner); the x register occupies the high-order qubits.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Desk-scale cap: 12 qubits per axis keeps the dense statevector at or
/// below 2^24 complex doubles (~256 MB).
pub const MAX_QUBITS_PER_AXIS: u32 = 12;

/// Sources whose sampled 2-norm falls below this are rejected as aliased
/// zeros; any genuine catalog source is orders of magnitude above it.
pub const ZERO_SOURCE_NORM: f64 = 1e-12;

/// Rectangular domain geometry plus qubit counts defining the discretization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    /// Domain extent along x.
    pub lx: f64,
    /// Domain extent along y.
    pub ly: f64,
    /// Qubits in the x register.
    pub n: u32,
    /// Qubits in the y register.
    pub m: u32,
    /// Points along x: 2^n.
    pub nx: usize,
    /// Points along y: 2^m.
    pub ny: usize,
}

impl Grid2D {
    /// Build a grid with nodes `x_i = i * lx / 2^n`, `y_j = j * ly / 2^m`.
    pub fn new(lx: f64, ly: f64, n: u32, m: u32) -> Result<Self> {
        if !(lx > 0.0) || !(ly > 0.0) {
            return Err(Error::Domain(format!(
                "domain lengths must be positive, got ({lx}, {ly})"
            )));
        }
        for (axis, q) in [("n", n), ("m", m)] {
            if q < 1 || q > MAX_QUBITS_PER_AXIS {
                return Err(Error::Domain(format!(
                    "qubit count {axis}={q} outside [1, {MAX_QUBITS_PER_AXIS}]"
                )));
            }
        }
        Ok(Self {
            lx,
            ly,
            n,
            m,
            nx: 1 << n,
            ny: 1 << m,
        })
    }

    /// x coordinate of node `i` (half-open: never reaches `lx`).
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.lx / self.nx as f64
    }

    /// y coordinate of node `j`.
    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.ly / self.ny as f64
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|j| self.y(j)).collect()
    }

    /// Total number of grid nodes (statevector length).
    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// x-major flat index of node (i, j).
    #[inline]
    pub fn flat_index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    /// Inverse of [`flat_index`](Self::flat_index).
    #[inline]
    pub fn unflatten(&self, idx: usize) -> (usize, usize) {
        (idx / self.ny, idx % self.ny)
    }
}

/// Build a grid; alias for [`Grid2D::new`] matching the operation vocabulary.
pub fn build_grid(lx: f64, ly: f64, n: u32, m: u32) -> Result<Grid2D> {
    Grid2D::new(lx, ly, n, m)
}

/// One of the catalog source functions.
///
/// Harmonic parameters exist only on the kinds that use them; Gaussian
/// centers only on the Gaussian kinds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceSpec {
    /// sin(k1 pi x) sin(k2 pi y)
    Sinusoid { k1: u32, k2: u32 },
    /// x(1-x) y(1-y)
    PolynomialBump,
    /// sin(k1 pi x) sin(k2 pi y) (x^2 + 2xy + 3y^2 - x + 4y + 5)
    AnisotropicSinusoid { k1: u32, k2: u32 },
    /// exp(-((x-x0)^2 + (y-y0)^2))
    Gaussian { x0: f64, y0: f64 },
    /// Gaussian plus sinusoid.
    GaussianPlusSinusoid { k1: u32, k2: u32, x0: f64, y0: f64 },
}

impl SourceSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            SourceSpec::Sinusoid { .. } => "sinusoid",
            SourceSpec::PolynomialBump => "polynomial_bump",
            SourceSpec::AnisotropicSinusoid { .. } => "anisotropic_sinusoid",
            SourceSpec::Gaussian { .. } => "gaussian",
            SourceSpec::GaussianPlusSinusoid { .. } => "gaussian_plus_sinusoid",
        }
    }

    /// Harmonic parameters, where the kind carries them.
    pub fn harmonics(&self) -> Option<(u32, u32)> {
        match *self {
            SourceSpec::Sinusoid { k1, k2 }
            | SourceSpec::AnisotropicSinusoid { k1, k2 }
            | SourceSpec::GaussianPlusSinusoid { k1, k2, .. } => Some((k1, k2)),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((k1, k2)) = self.harmonics() {
            if k1 < 1 || k2 < 1 {
                return Err(Error::Domain(format!(
                    "harmonics must be >= 1, got ({k1}, {k2})"
                )));
            }
        }
        Ok(())
    }

    /// Apply the harmonic shift to every harmonic parameter, leaving other
    /// kinds untouched. Used as optional preprocessing before sampling.
    pub fn with_shifted_harmonics(&self) -> Result<SourceSpec> {
        let shift = |k: u32| -> Result<u32> { Ok(k + harmonic_shift(k)?) };
        Ok(match *self {
            SourceSpec::Sinusoid { k1, k2 } => SourceSpec::Sinusoid {
                k1: shift(k1)?,
                k2: shift(k2)?,
            },
            SourceSpec::AnisotropicSinusoid { k1, k2 } => SourceSpec::AnisotropicSinusoid {
                k1: shift(k1)?,
                k2: shift(k2)?,
            },
            SourceSpec::GaussianPlusSinusoid { k1, k2, x0, y0 } => {
                SourceSpec::GaussianPlusSinusoid {
                    k1: shift(k1)?,
                    k2: shift(k2)?,
                    x0,
                    y0,
                }
            }
            other => other,
        })
    }
}

/// Pointwise value of the selected source. Total function.
pub fn eval_source(spec: &SourceSpec, x: f64, y: f64) -> f64 {
    match *spec {
        SourceSpec::Sinusoid { k1, k2 } => {
            (k1 as f64 * PI * x).sin() * (k2 as f64 * PI * y).sin()
        }
        SourceSpec::PolynomialBump => x * (1.0 - x) * y * (1.0 - y),
        SourceSpec::AnisotropicSinusoid { k1, k2 } => {
            let poly = x * x + 2.0 * x * y + 3.0 * y * y - x + 4.0 * y + 5.0;
            (k1 as f64 * PI * x).sin() * (k2 as f64 * PI * y).sin() * poly
        }
        SourceSpec::Gaussian { x0, y0 } => {
            let dx = x - x0;
            let dy = y - y0;
            (-(dx * dx + dy * dy)).exp()
        }
        SourceSpec::GaussianPlusSinusoid { k1, k2, x0, y0 } => {
            eval_source(&SourceSpec::Gaussian { x0, y0 }, x, y)
                + eval_source(&SourceSpec::Sinusoid { k1, k2 }, x, y)
        }
    }
}

/// Harmonic shift: 0 for m <= 2, m - 2 otherwise. Callers compute
/// `k = m + harmonic_shift(m)`.
pub fn harmonic_shift(m: u32) -> Result<u32> {
    if m < 1 {
        return Err(Error::Domain(format!("harmonic index {m} must be >= 1")));
    }
    Ok(if m <= 2 { 0 } else { m - 2 })
}

/// Source sampled at grid nodes, with its discrete 2-norm and the flattened
/// unit amplitude vector.
#[derive(Debug, Clone)]
pub struct SourceField {
    pub grid: Grid2D,
    /// f sampled at the nodes, shape (nx, ny).
    pub values: Array2<f64>,
    /// Discrete 2-norm of `values`.
    pub norm2: f64,
    /// x-major flattening of `values / norm2`, unit Euclidean norm.
    pub amplitudes: Array1<Complex64>,
}

/// Sample a source on the grid and normalize into a unit amplitude vector.
pub fn sample_source(spec: &SourceSpec, grid: &Grid2D) -> Result<SourceField> {
    sample_source_impl(spec, grid, false)
}

/// Same as [`sample_source`] but evaluates rows in parallel. Per-node values
/// and the sequentially reduced norm are bitwise identical to the sequential
/// path.
pub fn sample_source_par(spec: &SourceSpec, grid: &Grid2D) -> Result<SourceField> {
    sample_source_impl(spec, grid, true)
}

fn sample_source_impl(spec: &SourceSpec, grid: &Grid2D, parallel: bool) -> Result<SourceField> {
    use rayon::prelude::*;

    spec.validate()?;
    let (nx, ny) = (grid.nx, grid.ny);
    let mut values = Array2::zeros((nx, ny));
    {
        let fill_row = |i: usize, row: &mut [f64]| {
            let x = grid.x(i);
            for (j, v) in row.iter_mut().enumerate() {
                *v = eval_source(spec, x, grid.y(j));
            }
        };
        let slice = values.as_slice_mut().expect("freshly built array is contiguous");
        if parallel {
            slice
                .par_chunks_mut(ny)
                .enumerate()
                .for_each(|(i, row)| fill_row(i, row));
        } else {
            slice
                .chunks_mut(ny)
                .enumerate()
                .for_each(|(i, row)| fill_row(i, row));
        }
    }

    // Norm is always reduced sequentially so parallel sampling stays
    // bitwise identical.
    let sumsq: f64 = values.iter().map(|v| v * v).sum();
    let norm2 = sumsq.sqrt();
    if norm2 < ZERO_SOURCE_NORM {
        return Err(Error::ZeroSource { norm: norm2 });
    }

    let amplitudes = Array1::from_iter(
        values
            .iter()
            .map(|&v| Complex64::new(v / norm2, 0.0)),
    );
    Ok(SourceField {
        grid: *grid,
        values,
        norm2,
        amplitudes,
    })
}
