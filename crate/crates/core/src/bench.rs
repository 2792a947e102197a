//! Phase-level benchmarking of the quantum and classical pipelines.
//!
//! Each run executes both pipelines end-to-end on the same source and grid
//! and attributes every stage's wall time (and peak-RSS delta) to exactly
//! one phase. The quantum coefficient phase covers QFT + sampling + counts
//! conversion; the correction-and-division phase is recorded separately.
//! Everything except the timing and memory fields is deterministic under a
//! fixed seed.

use serde::{Deserialize, Serialize};
use std::time::Instant;

use crate::classical::{divide_by_eigenvalues, QuadratureSpec};
use crate::domain::{Grid2D, SourceSpec};
use crate::error::Result;
use crate::pipeline::{
    classical_coefficient_phase, quantum_coefficients, quantum_reconstruction,
    quantum_spectrum, quantum_state_preparation, ClassicalRunConfig, CoefficientMode, Estimator,
    QuantumRunConfig,
};
use crate::spectral::{mse, CorrectionProfile, SignConvention, SolutionField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    Classical,
    Quantum,
}

impl Pipeline {
    pub fn name(&self) -> &'static str {
        match self {
            Pipeline::Classical => "classical",
            Pipeline::Quantum => "quantum",
        }
    }
}

/// Phase taxonomy. The first four name the timing breakdown; Initialization
/// and FinalPhase are the memory-table aliases, related to the timing names
/// by the mapping recorded in every report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    StatePreparation,
    CoefficientCalculation,
    CorrectionAndEigenvalueDivision,
    SolutionReconstruction,
    Initialization,
    FinalPhase,
}

impl Phase {
    pub fn name(&self) -> &'static str {
        match self {
            Phase::StatePreparation => "state_preparation",
            Phase::CoefficientCalculation => "coefficient_calculation",
            Phase::CorrectionAndEigenvalueDivision => "correction_and_eigenvalue_division",
            Phase::SolutionReconstruction => "solution_reconstruction",
            Phase::Initialization => "initialization",
            Phase::FinalPhase => "final_phase",
        }
    }
}

/// Wall time and peak-memory delta of one phase of one pipeline.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub pipeline: Pipeline,
    pub phase: Phase,
    pub wall_time_s: f64,
    pub peak_memory_delta_bytes: u64,
}

/// Per-pipeline aggregate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PipelineTotal {
    pub pipeline: Pipeline,
    pub wall_time_s: f64,
    pub peak_memory_delta_bytes: u64,
}

/// Full benchmark configuration: one source, one grid, both pipelines.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BenchConfig {
    pub grid: Grid2D,
    pub source: SourceSpec,
    pub shots: u64,
    pub seed: u64,
    pub mode: CoefficientMode,
    pub correction: CorrectionProfile,
    pub truncation: Option<(usize, usize)>,
    pub sign: SignConvention,
    pub shift: bool,
    pub quadrature: QuadratureSpec,
    /// Modes retained by the classical baseline (parameterized, not fixed).
    pub classical_modes: (usize, usize),
    /// Timing repetitions; medians are reported when > 1.
    pub repeat: usize,
    pub parallel: bool,
}

impl BenchConfig {
    pub fn quantum_config(&self) -> QuantumRunConfig {
        QuantumRunConfig {
            grid: self.grid,
            source: self.source,
            shots: self.shots,
            seed: self.seed,
            mode: self.mode,
            estimator: Estimator::BinMap,
            correction: self.correction,
            truncation: self.truncation,
            sign: self.sign,
            shift: self.shift,
            parallel: self.parallel,
        }
    }

    pub fn classical_config(&self) -> ClassicalRunConfig {
        ClassicalRunConfig {
            grid: self.grid,
            source: self.source,
            quadrature: self.quadrature,
            modes: self.classical_modes,
            shift: self.shift,
        }
    }
}

/// One benchmark run: phase records, totals, and the quantum-vs-classical
/// solution MSE.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub records: Vec<PhaseRecord>,
    pub totals: Vec<PipelineTotal>,
    pub mse: f64,
    /// How memory deltas were measured.
    pub memory_method: String,
    /// Worker threads available to the parallel paths (1 when disabled).
    pub threads: usize,
    /// Memory-table phase names -> timing phase names.
    pub phase_name_mapping: Vec<(String, String)>,
}

fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    for line in status.lines() {
        if let Some(rest) = line.strip_prefix("VmHWM:") {
            let kb: u64 = rest.trim().trim_end_matches("kB").trim().parse().ok()?;
            return Some(kb * 1024);
        }
    }
    None
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64, u64) {
    let rss_before = peak_rss_bytes();
    let start = Instant::now();
    let out = f();
    let seconds = start.elapsed().as_secs_f64();
    let delta = match (rss_before, peak_rss_bytes()) {
        (Some(a), Some(b)) => b.saturating_sub(a),
        _ => 0,
    };
    (out, seconds, delta)
}

/// Fixed record order: quantum prep, quantum coeff, quantum correction,
/// quantum reconstruction, classical coeff, classical correction,
/// classical reconstruction.
const PHASE_ORDER: [(Pipeline, Phase); 7] = [
    (Pipeline::Quantum, Phase::StatePreparation),
    (Pipeline::Quantum, Phase::CoefficientCalculation),
    (Pipeline::Quantum, Phase::CorrectionAndEigenvalueDivision),
    (Pipeline::Quantum, Phase::SolutionReconstruction),
    (Pipeline::Classical, Phase::CoefficientCalculation),
    (Pipeline::Classical, Phase::CorrectionAndEigenvalueDivision),
    (Pipeline::Classical, Phase::SolutionReconstruction),
];

struct SingleRun {
    seconds: [f64; 7],
    bytes: [u64; 7],
    quantum_solution: SolutionField,
    classical_solution: SolutionField,
}

fn run_once(config: &BenchConfig) -> Result<SingleRun> {
    let qcfg = config.quantum_config();
    let ccfg = config.classical_config();
    let mut seconds = [0.0; 7];
    let mut bytes = [0u64; 7];

    let ((_field, state), t, b) = {
        let (out, t, b) = timed(|| quantum_state_preparation(&qcfg));
        (out?, t, b)
    };
    seconds[0] = t;
    bytes[0] = b;

    let ((a, _counts, _post), t, b) = timed(|| quantum_coefficients(&qcfg, &state));
    seconds[1] = t;
    bytes[1] = b;

    let (estimate, t, b) = timed(|| quantum_spectrum(&qcfg, a));
    seconds[2] = t;
    bytes[2] = b;

    let (quantum_solution, t, b) = {
        let (out, t, b) = timed(|| quantum_reconstruction(&qcfg, &estimate));
        (out?, t, b)
    };
    seconds[3] = t;
    bytes[3] = b;

    let (coeffs, t, b) = {
        let (out, t, b) = timed(|| classical_coefficient_phase(&ccfg));
        (out?, t, b)
    };
    seconds[4] = t;
    bytes[4] = b;

    let (divided, t, b) = timed(|| divide_by_eigenvalues(&coeffs, ccfg.grid.lx, ccfg.grid.ly));
    seconds[5] = t;
    bytes[5] = b;

    let (classical_solution, t, b) = timed(|| {
        crate::classical::evaluate_solution_series(
            &divided,
            &ccfg.grid,
            ccfg.modes,
            &ccfg.grid.xs(),
            &ccfg.grid.ys(),
            &ccfg.source,
        )
    });
    seconds[6] = t;
    bytes[6] = b;

    Ok(SingleRun {
        seconds,
        bytes,
        quantum_solution,
        classical_solution,
    })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite timings"));
    values[values.len() / 2]
}

/// Execute both pipelines and record each phase per the taxonomy.
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchReport> {
    let repeat = config.repeat.max(1);
    let mut per_phase_seconds: Vec<Vec<f64>> = vec![Vec::with_capacity(repeat); 7];
    let mut per_phase_bytes: Vec<Vec<u64>> = vec![Vec::with_capacity(repeat); 7];
    let mut last = None;
    for _ in 0..repeat {
        let run = run_once(config)?;
        for i in 0..7 {
            per_phase_seconds[i].push(run.seconds[i]);
            per_phase_bytes[i].push(run.bytes[i]);
        }
        last = Some(run);
    }
    let last = last.expect("repeat >= 1");

    let records: Vec<PhaseRecord> = PHASE_ORDER
        .iter()
        .enumerate()
        .map(|(i, &(pipeline, phase))| PhaseRecord {
            pipeline,
            phase,
            wall_time_s: median(&mut per_phase_seconds[i]),
            peak_memory_delta_bytes: {
                let mut b = per_phase_bytes[i].clone();
                b.sort_unstable();
                b[b.len() / 2]
            },
        })
        .collect();

    let totals = [Pipeline::Quantum, Pipeline::Classical]
        .iter()
        .map(|&p| PipelineTotal {
            pipeline: p,
            wall_time_s: records
                .iter()
                .filter(|r| r.pipeline == p)
                .map(|r| r.wall_time_s)
                .sum(),
            peak_memory_delta_bytes: records
                .iter()
                .filter(|r| r.pipeline == p)
                .map(|r| r.peak_memory_delta_bytes)
                .sum(),
        })
        .collect();

    let err = mse(&last.quantum_solution, &last.classical_solution)?;

    Ok(BenchReport {
        config: *config,
        records,
        totals,
        mse: err,
        memory_method: if peak_rss_bytes().is_some() {
            "peak_rss_vmhwm_delta".to_string()
        } else {
            "unsupported".to_string()
        },
        threads: if config.parallel {
            rayon::current_num_threads()
        } else {
            1
        },
        phase_name_mapping: vec![
            ("initialization".into(), "state_preparation".into()),
            (
                "coefficient_processing".into(),
                "coefficient_calculation + correction_and_eigenvalue_division".into(),
            ),
            ("final_phase".into(), "solution_reconstruction".into()),
        ],
    })
}

/// One benchmark per square grid size n = m in `qubits`, e.g. 3..=8.
pub fn run_scaling_sweep(
    base: &BenchConfig,
    qubits: impl IntoIterator<Item = u32>,
) -> Result<Vec<BenchReport>> {
    let mut reports = Vec::new();
    for q in qubits {
        let grid = Grid2D::new(base.grid.lx, base.grid.ly, q, q)?;
        let mut config = *base;
        config.grid = grid;
        config.classical_modes = (
            config.classical_modes.0.min(grid.nx),
            config.classical_modes.1.min(grid.ny),
        );
        if let Some((tx, ty)) = config.truncation {
            config.truncation = Some((tx.min(grid.nx), ty.min(grid.ny)));
        }
        reports.push(run_benchmark(&config)?);
    }
    Ok(reports)
}

/// Sweep output as `points,phase,pipeline,seconds,bytes` rows.
pub fn sweep_csv(reports: &[BenchReport]) -> String {
    let mut out = String::from("points,phase,pipeline,seconds,bytes\n");
    for report in reports {
        let points = report.config.grid.nx * report.config.grid.ny;
        for r in &report.records {
            out.push_str(&format!(
                "{points},{},{},{},{}\n",
                r.phase.name(),
                r.pipeline.name(),
                r.wall_time_s,
                r.peak_memory_delta_bytes
            ));
        }
    }
    out
}

impl BenchReport {
    /// Human-readable aligned-column rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "grid {}x{} ({} + {} qubits), source {}, shots {}, seed {}\n",
            self.config.grid.nx,
            self.config.grid.ny,
            self.config.grid.n,
            self.config.grid.m,
            self.config.source.kind_name(),
            self.config.shots,
            self.config.seed
        ));
        out.push_str(&format!(
            "{:<10} {:<36} {:>14} {:>12}\n",
            "pipeline", "phase", "seconds", "mem bytes"
        ));
        for r in &self.records {
            out.push_str(&format!(
                "{:<10} {:<36} {:>14.6} {:>12}\n",
                r.pipeline.name(),
                r.phase.name(),
                r.wall_time_s,
                r.peak_memory_delta_bytes
            ));
        }
        for t in &self.totals {
            out.push_str(&format!(
                "{:<10} {:<36} {:>14.6} {:>12}\n",
                t.pipeline.name(),
                "total",
                t.wall_time_s,
                t.peak_memory_delta_bytes
            ));
        }
        out.push_str(&format!(
            "mse {:e}   memory method {}   threads {}\n",
            self.mse, self.memory_method, self.threads
        ));
        out
    }
}
