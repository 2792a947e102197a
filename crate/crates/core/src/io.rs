//! Plain-text serialization of the pipeline artifacts.
//!
//! All emitters are deterministic: counts iterate in sorted (k, l) order and
//! floats use Rust's shortest round-trip formatting, so identical inputs
//! yield byte-identical output.

use std::fmt::Write;

use crate::domain::SourceField;
use crate::qsim::{CountsMap, QuantumState};
use crate::spectral::{SolutionField, SpectrumEstimate};

/// `x,y,f` rows in x-major order.
pub fn source_field_csv(field: &SourceField) -> String {
    let mut out = String::from("x,y,f\n");
    for i in 0..field.grid.nx {
        for j in 0..field.grid.ny {
            writeln!(
                out,
                "{},{},{}",
                field.grid.x(i),
                field.grid.y(j),
                field.values[[i, j]]
            )
            .unwrap();
        }
    }
    out
}

/// `k,l,count` sorted by (k, l).
pub fn counts_csv(counts: &CountsMap) -> String {
    let mut out = String::from("k,l,count\n");
    for (&(k, l), &c) in &counts.counts {
        writeln!(out, "{k},{l},{c}").unwrap();
    }
    out
}

/// `index,re,im` over the full amplitude vector.
pub fn state_csv(state: &QuantumState) -> String {
    let mut out = String::from("index,re,im\n");
    for (idx, a) in state.amplitudes().iter().enumerate() {
        writeln!(out, "{idx},{},{}", a.re, a.im).unwrap();
    }
    out
}

/// `i,j,re_a,im_a,lambda,re_b,im_b` over all modes.
pub fn spectrum_csv(estimate: &SpectrumEstimate) -> String {
    let mut out = String::from("i,j,re_a,im_a,lambda,re_b,im_b\n");
    for i in 0..estimate.grid.nx {
        for j in 0..estimate.grid.ny {
            let a = estimate.a[[i, j]];
            let b = estimate.b[[i, j]];
            writeln!(
                out,
                "{i},{j},{},{},{},{},{}",
                a.re,
                a.im,
                estimate.eigenvalues[[i, j]],
                b.re,
                b.im
            )
            .unwrap();
        }
    }
    out
}

/// Classical coefficient matrix in the spectrum schema, so the two
/// pipelines' coefficient files diff column-for-column. `re_b` holds
/// a/lambda; the Poisson sign is applied at reconstruction, as in the
/// spectral pipeline.
pub fn classical_coefficients_csv(a: &ndarray::Array2<f64>, lx: f64, ly: f64) -> String {
    let pi = std::f64::consts::PI;
    let mut out = String::from("i,j,re_a,im_a,lambda,re_b,im_b\n");
    for ((i, j), &v) in a.indexed_iter() {
        let lamx = pi * (i + 1) as f64 / lx;
        let lamy = pi * (j + 1) as f64 / ly;
        let lambda = lamx * lamx + lamy * lamy;
        writeln!(out, "{i},{j},{v},0,{lambda},{},0", v / lambda).unwrap();
    }
    out
}

/// `x,y,u` rows over the evaluation lattice.
pub fn solution_csv(solution: &SolutionField) -> String {
    let mut out = String::from("x,y,u\n");
    for (i, &x) in solution.xs.iter().enumerate() {
        for (j, &y) in solution.ys.iter().enumerate() {
            writeln!(out, "{x},{y},{}", solution.values[[i, j]]).unwrap();
        }
    }
    out
}

/// Gnuplot-compatible matrix block: one row per x node, columns over y,
/// suitable for `splot 'file' matrix`.
pub fn solution_gnuplot_matrix(solution: &SolutionField) -> String {
    let mut out = String::new();
    for i in 0..solution.xs.len() {
        let row: Vec<String> = (0..solution.ys.len())
            .map(|j| solution.values[[i, j]].to_string())
            .collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}
