//! End-to-end pipeline assembly, broken into the phases the benchmark
//! harness attributes time to: state preparation, coefficient calculation,
//! correction plus eigenvalue division, and solution reconstruction.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical::{classical_coefficients, solution_from_coefficients, QuadratureSpec};
use crate::domain::{sample_source, sample_source_par, Grid2D, SourceField, SourceSpec};
use crate::error::Result;
use crate::qsim::{
    apply_qft_2d, measure_counts, prepare_state, CountsMap, QftImpl, QuantumState,
};
use crate::spectral::{
    amplitudes_to_coefficients, counts_to_coefficients, dominant_mode_estimate, reconstruct,
    CorrectionProfile, Provenance, ReconstructOptions, SignConvention, SolutionField,
    SpectrumEstimate,
};

/// Whether coefficients come from seeded shot sampling or from the exact
/// post-QFT amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientMode {
    Sampled,
    Exact,
}

/// How the outcome spectrum becomes modal coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// Direct DFT-index -> sine-mode reinterpretation (the default).
    BinMap,
    /// Total spectral weight concentrated on the leading bin's mode;
    /// exact for pure eigenmode sources.
    DominantMode,
}

/// Full configuration of a quantum solve.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuantumRunConfig {
    pub grid: Grid2D,
    pub source: SourceSpec,
    pub shots: u64,
    pub seed: u64,
    pub mode: CoefficientMode,
    pub estimator: Estimator,
    pub correction: CorrectionProfile,
    pub truncation: Option<(usize, usize)>,
    pub sign: SignConvention,
    /// Apply the harmonic shift to the source before sampling.
    pub shift: bool,
    pub parallel: bool,
}

/// Artifacts of a quantum solve.
#[derive(Debug, Clone)]
pub struct QuantumRun {
    pub field: SourceField,
    /// Present in sampled mode only.
    pub counts: Option<CountsMap>,
    /// Post-QFT state, kept in exact mode for amplitude dumps.
    pub post_qft: Option<QuantumState>,
    pub estimate: SpectrumEstimate,
    pub solution: SolutionField,
}

/// Phase 1: sample the (optionally shifted) source and amplitude-encode it.
pub fn quantum_state_preparation(cfg: &QuantumRunConfig) -> Result<(SourceField, QuantumState)> {
    let spec = if cfg.shift {
        cfg.source.with_shifted_harmonics()?
    } else {
        cfg.source
    };
    let field = if cfg.parallel {
        sample_source_par(&spec, &cfg.grid)?
    } else {
        sample_source(&spec, &cfg.grid)?
    };
    let state = prepare_state(&field)?;
    Ok((field, state))
}

/// Phase 2: 2D QFT, then coefficient extraction (shot sampling or exact).
/// The seed is only consulted in sampled mode.
pub fn quantum_coefficients(
    cfg: &QuantumRunConfig,
    state: &QuantumState,
) -> (Array2<Complex64>, Option<CountsMap>, Option<QuantumState>) {
    let transformed = apply_qft_2d(state, QftImpl::Dense);
    match cfg.mode {
        CoefficientMode::Sampled => {
            let counts = measure_counts(&transformed, cfg.shots, cfg.seed);
            let a = counts_to_coefficients(&counts, &cfg.grid);
            (a, Some(counts), None)
        }
        CoefficientMode::Exact => {
            let a = amplitudes_to_coefficients(&transformed);
            (a, None, Some(transformed))
        }
    }
}

/// Phase 3: correction profile, eigenvalues, and the division b = B/lambda.
pub fn quantum_spectrum(cfg: &QuantumRunConfig, a: Array2<Complex64>) -> SpectrumEstimate {
    let a = match cfg.estimator {
        Estimator::BinMap => a,
        Estimator::DominantMode => dominant_mode_estimate(&a),
    };
    let provenance = match cfg.mode {
        CoefficientMode::Sampled => Provenance::Sampled {
            shots: cfg.shots,
            seed: cfg.seed,
        },
        CoefficientMode::Exact => Provenance::Exact,
    };
    let profile = match cfg.estimator {
        // The dominant-mode estimate is identity-equivalent by definition.
        Estimator::DominantMode => CorrectionProfile::Identity,
        Estimator::BinMap => cfg.correction,
    };
    SpectrumEstimate::new(cfg.grid, a, profile, provenance)
}

/// Phase 4: resum the sine series on the grid nodes.
pub fn quantum_reconstruction(
    cfg: &QuantumRunConfig,
    estimate: &SpectrumEstimate,
) -> Result<SolutionField> {
    quantum_reconstruction_at(cfg, estimate, &cfg.grid.xs(), &cfg.grid.ys())
}

/// Phase 4 on an explicit evaluation lattice.
pub fn quantum_reconstruction_at(
    cfg: &QuantumRunConfig,
    estimate: &SpectrumEstimate,
    xs: &[f64],
    ys: &[f64],
) -> Result<SolutionField> {
    let mut solution = reconstruct(
        estimate,
        xs,
        ys,
        &ReconstructOptions {
            truncation: cfg.truncation,
            sign: cfg.sign,
            parallel: cfg.parallel,
        },
    )?;
    solution.meta.source = Some(cfg.source);
    solution.meta.correction = Some(match cfg.estimator {
        Estimator::DominantMode => CorrectionProfile::Identity,
        Estimator::BinMap => cfg.correction,
    });
    Ok(solution)
}

/// Run the whole quantum pipeline.
pub fn run_quantum(cfg: &QuantumRunConfig) -> Result<QuantumRun> {
    let (field, state) = quantum_state_preparation(cfg)?;
    let (a, counts, post_qft) = quantum_coefficients(cfg, &state);
    let estimate = quantum_spectrum(cfg, a);
    let solution = quantum_reconstruction(cfg, &estimate)?;
    Ok(QuantumRun {
        field,
        counts,
        post_qft,
        estimate,
        solution,
    })
}

/// Full configuration of a classical solve.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ClassicalRunConfig {
    pub grid: Grid2D,
    pub source: SourceSpec,
    pub quadrature: QuadratureSpec,
    /// Retained modes per axis.
    pub modes: (usize, usize),
    pub shift: bool,
}

/// Artifacts of a classical solve.
#[derive(Debug, Clone)]
pub struct ClassicalRun {
    pub coefficients: Array2<f64>,
    pub solution: SolutionField,
}

/// Classical coefficient phase: one quadrature pass per mode.
pub fn classical_coefficient_phase(cfg: &ClassicalRunConfig) -> Result<Array2<f64>> {
    let spec = if cfg.shift {
        cfg.source.with_shifted_harmonics()?
    } else {
        cfg.source
    };
    classical_coefficients(&spec, &cfg.grid, &cfg.quadrature, cfg.modes)
}

/// Classical reconstruction phase at the grid nodes.
pub fn classical_reconstruction(
    cfg: &ClassicalRunConfig,
    coefficients_over_lambda: &Array2<f64>,
) -> SolutionField {
    classical_reconstruction_at(
        cfg,
        coefficients_over_lambda,
        &cfg.grid.xs(),
        &cfg.grid.ys(),
    )
}

/// Classical reconstruction phase on an explicit lattice.
pub fn classical_reconstruction_at(
    cfg: &ClassicalRunConfig,
    coefficients: &Array2<f64>,
    xs: &[f64],
    ys: &[f64],
) -> SolutionField {
    solution_from_coefficients(coefficients, &cfg.grid, cfg.modes, xs, ys, &cfg.source)
}

/// Run the whole classical pipeline.
pub fn run_classical(cfg: &ClassicalRunConfig) -> Result<ClassicalRun> {
    let coefficients = classical_coefficient_phase(cfg)?;
    let solution = classical_reconstruction(cfg, &coefficients);
    Ok(ClassicalRun {
        coefficients,
        solution,
    })
}
