//! Classical baselines and oracles: per-mode quadrature of the coefficient
//! integral, a fast DST coefficient path, and an independent
//! finite-difference Poisson solver.
//!
//! The quadrature route deliberately re-evaluates the integrand for every
//! mode, mirroring the per-coefficient cost structure of a direct
//! double-integration baseline. The DST path and the FD solver are the
//! cross-checking oracles: the former shares the sine basis but not the
//! integration, the latter shares nothing with the spectral machinery.

use ndarray::Array2;
use rustfft::{num_complex::Complex as FftComplex, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::domain::{eval_source, Grid2D, SourceField, SourceSpec};
use crate::error::{Error, Result};
use crate::spectral::{evaluate_sine_series, SignConvention, SolutionField, SolutionMeta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    Trapezoid,
    Simpson,
}

/// Deterministic composite quadrature specification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: QuadratureRule,
    pub subdivisions_x: usize,
    pub subdivisions_y: usize,
}

impl QuadratureSpec {
    pub fn simpson(subdivisions: usize) -> Self {
        Self {
            rule: QuadratureRule::Simpson,
            subdivisions_x: subdivisions,
            subdivisions_y: subdivisions,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (axis, s) in [("x", self.subdivisions_x), ("y", self.subdivisions_y)] {
            if s < 8 {
                return Err(Error::Quadrature(format!(
                    "subdivisions_{axis} = {s} below the minimum of 8"
                )));
            }
            if self.rule == QuadratureRule::Simpson && s % 2 != 0 {
                return Err(Error::Quadrature(format!(
                    "Simpson rule requires even subdivision counts, got subdivisions_{axis} = {s}"
                )));
            }
        }
        Ok(())
    }
}

/// Composite-rule nodes and weights on [0, length].
fn rule_1d(rule: QuadratureRule, subdivisions: usize, length: f64) -> (Vec<f64>, Vec<f64>) {
    let h = length / subdivisions as f64;
    let nodes: Vec<f64> = (0..=subdivisions).map(|i| i as f64 * h).collect();
    let weights: Vec<f64> = match rule {
        QuadratureRule::Trapezoid => (0..=subdivisions)
            .map(|i| {
                if i == 0 || i == subdivisions {
                    h / 2.0
                } else {
                    h
                }
            })
            .collect(),
        QuadratureRule::Simpson => (0..=subdivisions)
            .map(|i| {
                if i == 0 || i == subdivisions {
                    h / 3.0
                } else if i % 2 == 1 {
                    4.0 * h / 3.0
                } else {
                    2.0 * h / 3.0
                }
            })
            .collect(),
    };
    (nodes, weights)
}

/// Composite-rule approximation of the sine-series coefficient
/// a_{kx,ky} = 4/(Lx Ly) * integral of f sin(kx pi x/Lx) sin(ky pi y/Ly).
pub fn quadrature_coefficient(
    spec: &SourceSpec,
    kx: usize,
    ky: usize,
    grid: &Grid2D,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if kx < 1 || ky < 1 {
        return Err(Error::Quadrature(format!(
            "mode indices must be >= 1, got ({kx}, {ky})"
        )));
    }
    quad.validate()?;
    let (xs, wx) = rule_1d(quad.rule, quad.subdivisions_x, grid.lx);
    let (ys, wy) = rule_1d(quad.rule, quad.subdivisions_y, grid.ly);
    let fx = PI * kx as f64 / grid.lx;
    let fy = PI * ky as f64 / grid.ly;
    let mut integral = 0.0;
    for (x, wxa) in xs.iter().zip(&wx) {
        let sx = (fx * x).sin();
        let mut row = 0.0;
        for (y, wyb) in ys.iter().zip(&wy) {
            row += wyb * eval_source(spec, *x, *y) * (fy * y).sin();
        }
        integral += wxa * sx * row;
    }
    Ok(4.0 * integral / (grid.lx * grid.ly))
}

/// All coefficients a_{kx,ky} for kx = 1..=modes_x, ky = 1..=modes_y,
/// each by an independent quadrature pass.
pub fn classical_coefficients(
    spec: &SourceSpec,
    grid: &Grid2D,
    quad: &QuadratureSpec,
    modes: (usize, usize),
) -> Result<Array2<f64>> {
    let (kx_max, ky_max) = modes;
    if kx_max < 1 || ky_max < 1 {
        return Err(Error::Quadrature(format!(
            "mode counts must be >= 1, got ({kx_max}, {ky_max})"
        )));
    }
    if kx_max > grid.nx || ky_max > grid.ny {
        return Err(Error::Quadrature(format!(
            "mode counts ({kx_max}, {ky_max}) exceed grid ({}, {})",
            grid.nx, grid.ny
        )));
    }
    let mut a = Array2::zeros((kx_max, ky_max));
    for kx in 1..=kx_max {
        for ky in 1..=ky_max {
            a[[kx - 1, ky - 1]] = quadrature_coefficient(spec, kx, ky, grid, quad)?;
        }
    }
    Ok(a)
}

/// Solution coefficients -a/lambda from raw sine coefficients.
pub fn divide_by_eigenvalues(a: &Array2<f64>, lx: f64, ly: f64) -> Array2<f64> {
    let mut c = a.clone();
    for ((i, j), v) in c.indexed_iter_mut() {
        let lamx = PI * (i + 1) as f64 / lx;
        let lamy = PI * (j + 1) as f64 / ly;
        *v = -*v / (lamx * lamx + lamy * lamy);
    }
    c
}

/// Truncated sine-series solution of Delta u = f via direct integration of
/// the coefficients, evaluated at the grid nodes.
pub fn classical_solve(
    spec: &SourceSpec,
    grid: &Grid2D,
    quad: &QuadratureSpec,
    modes: (usize, usize),
) -> Result<SolutionField> {
    classical_solve_at(spec, grid, quad, modes, &grid.xs(), &grid.ys())
}

/// Same as [`classical_solve`] on an explicit evaluation lattice.
pub fn classical_solve_at(
    spec: &SourceSpec,
    grid: &Grid2D,
    quad: &QuadratureSpec,
    modes: (usize, usize),
    xs: &[f64],
    ys: &[f64],
) -> Result<SolutionField> {
    let a = classical_coefficients(spec, grid, quad, modes)?;
    Ok(solution_from_coefficients(&a, grid, modes, xs, ys, spec))
}

/// Evaluate u = -sum a/lambda sin sin from raw sine coefficients.
pub fn solution_from_coefficients(
    a: &Array2<f64>,
    grid: &Grid2D,
    modes: (usize, usize),
    xs: &[f64],
    ys: &[f64],
    spec: &SourceSpec,
) -> SolutionField {
    let c = divide_by_eigenvalues(a, grid.lx, grid.ly);
    evaluate_solution_series(&c, grid, modes, xs, ys, spec)
}

/// Resum an already eigenvalue-divided coefficient matrix.
pub fn evaluate_solution_series(
    c: &Array2<f64>,
    grid: &Grid2D,
    modes: (usize, usize),
    xs: &[f64],
    ys: &[f64],
    spec: &SourceSpec,
) -> SolutionField {
    let values = evaluate_sine_series(c, xs, ys, grid.lx, grid.ly, false);
    SolutionField {
        xs: xs.to_vec(),
        ys: ys.to_vec(),
        values,
        truncation: modes,
        meta: SolutionMeta {
            source: Some(*spec),
            correction: None,
            provenance: None,
            sign: SignConvention::Poisson,
        },
    }
}

/// Sine-series coefficients via a type-I discrete sine transform of the
/// interior samples, normalized so a pure eigenmode yields coefficient 1.
/// Output shape is (N-1, M-1): interior modes k = 1..N-1, l = 1..M-1.
pub fn dst_coefficients(field: &SourceField) -> Array2<f64> {
    let (nx, ny) = (field.grid.nx, field.grid.ny);
    let (px, py) = (nx - 1, ny - 1);
    let mut planner = FftPlanner::<f64>::new();

    // DST-I along x for each interior column.
    let mut after_x = Array2::zeros((px, py));
    {
        let fft = planner.plan_fft_forward(2 * nx);
        let mut buf = vec![FftComplex::new(0.0, 0.0); 2 * nx];
        for j in 1..ny {
            for slot in buf.iter_mut() {
                *slot = FftComplex::new(0.0, 0.0);
            }
            for i in 1..nx {
                let v = field.values[[i, j]];
                buf[i] = FftComplex::new(v, 0.0);
                buf[2 * nx - i] = FftComplex::new(-v, 0.0);
            }
            fft.process(&mut buf);
            for k in 1..nx {
                after_x[[k - 1, j - 1]] = -buf[k].im / 2.0;
            }
        }
    }

    // DST-I along y for each row of the half-transformed data.
    let mut coeffs = Array2::zeros((px, py));
    {
        let fft = planner.plan_fft_forward(2 * ny);
        let mut buf = vec![FftComplex::new(0.0, 0.0); 2 * ny];
        let scale = 4.0 / (nx as f64 * ny as f64);
        for k in 0..px {
            for slot in buf.iter_mut() {
                *slot = FftComplex::new(0.0, 0.0);
            }
            for j in 0..py {
                let v = after_x[[k, j]];
                buf[j + 1] = FftComplex::new(v, 0.0);
                buf[2 * ny - (j + 1)] = FftComplex::new(-v, 0.0);
            }
            fft.process(&mut buf);
            for l in 1..ny {
                coeffs[[k, l - 1]] = scale * (-buf[l].im / 2.0);
            }
        }
    }
    coeffs
}

/// Independent finite-difference Poisson oracle on the unit square.
///
/// Solves Delta u = f with u = 0 on the boundary via the 5-point Laplacian
/// on a (resolution+1)^2 closed lattice, using conjugate gradients on the
/// positive-definite form to a relative residual below 1e-10.
pub fn fd_poisson_solve(spec: &SourceSpec, resolution: usize) -> Result<SolutionField> {
    if resolution < 16 {
        return Err(Error::Domain(format!(
            "fd resolution {resolution} below the minimum of 16"
        )));
    }
    let r = resolution;
    let h = 1.0 / r as f64;
    let interior = r - 1;
    let idx = |i: usize, j: usize| (i - 1) * interior + (j - 1);

    // -Delta_h u = -f, interior unknowns only.
    let mut rhs = vec![0.0; interior * interior];
    for i in 1..r {
        for j in 1..r {
            rhs[idx(i, j)] = -eval_source(spec, i as f64 * h, j as f64 * h);
        }
    }
    let rhs_norm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let target = 1e-10 * rhs_norm.max(f64::MIN_POSITIVE);

    let apply = |u: &[f64], out: &mut [f64]| {
        let inv_h2 = 1.0 / (h * h);
        for i in 1..r {
            for j in 1..r {
                let c = u[idx(i, j)];
                let e = if i + 1 < r { u[idx(i + 1, j)] } else { 0.0 };
                let w = if i > 1 { u[idx(i - 1, j)] } else { 0.0 };
                let n = if j + 1 < r { u[idx(i, j + 1)] } else { 0.0 };
                let s = if j > 1 { u[idx(i, j - 1)] } else { 0.0 };
                out[idx(i, j)] = (4.0 * c - e - w - n - s) * inv_h2;
            }
        }
    };

    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let mut u = vec![0.0; rhs.len()];
    let mut residual = rhs.clone();
    let mut direction = residual.clone();
    let mut tmp = vec![0.0; rhs.len()];
    let mut rr = dot(&residual, &residual);
    let max_iterations = 40 * r;
    let mut converged = rr.sqrt() <= target;
    let mut iterations = 0;

    for it in 0..max_iterations {
        if converged {
            break;
        }
        iterations = it + 1;
        apply(&direction, &mut tmp);
        let alpha = rr / dot(&direction, &tmp);
        for (ui, di) in u.iter_mut().zip(&direction) {
            *ui += alpha * di;
        }
        for (ri, ti) in residual.iter_mut().zip(&tmp) {
            *ri -= alpha * ti;
        }
        let rr_next = dot(&residual, &residual);
        if rr_next.sqrt() <= target {
            converged = true;
            break;
        }
        let beta = rr_next / rr;
        for (di, ri) in direction.iter_mut().zip(&residual) {
            *di = ri + beta * *di;
        }
        rr = rr_next;
    }
    let final_residual = dot(&residual, &residual).sqrt();
    if !converged && final_residual > target {
        return Err(Error::Convergence {
            residual: final_residual,
            target,
            iterations,
        });
    }

    // Embed into the closed lattice with the zero boundary ring.
    let xs: Vec<f64> = (0..=r).map(|i| i as f64 * h).collect();
    let ys = xs.clone();
    let mut values = Array2::zeros((r + 1, r + 1));
    for i in 1..r {
        for j in 1..r {
            values[[i, j]] = u[idx(i, j)];
        }
    }
    Ok(SolutionField {
        xs,
        ys,
        values,
        truncation: (interior, interior),
        meta: SolutionMeta {
            source: Some(*spec),
            correction: None,
            provenance: None,
            sign: SignConvention::Poisson,
        },
    })
}
