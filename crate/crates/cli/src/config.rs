//! Flag / config-file / default resolution.
//!
//! Precedence: command-line flags override the optional TOML config file,
//! which overrides built-in defaults. Every validation failure is a usage
//! error naming the offending flag.

use clap::Args;
use serde::Deserialize;
use std::path::PathBuf;

use qpoisson::classical::{QuadratureRule, QuadratureSpec};
use qpoisson::domain::{build_grid, Grid2D, SourceSpec, MAX_QUBITS_PER_AXIS};
use qpoisson::pipeline::CoefficientMode;
use qpoisson::spectral::{CorrectionProfile, SignConvention};

/// One-line usage problem; printed to stderr with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

type UResult<T> = Result<T, UsageError>;

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

/// Shared flags of every pipeline-running subcommand.
#[derive(Debug, Args, Default, Clone)]
pub struct RunArgs {
    /// Optional TOML config file; flags override its values
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Domain extent along x
    #[arg(long)]
    pub lx: Option<f64>,

    /// Domain extent along y
    #[arg(long)]
    pub ly: Option<f64>,

    /// Qubits per axis: N_QUBITS M_QUBITS
    #[arg(long, num_args = 2, value_names = ["N", "M"])]
    pub qubits: Option<Vec<u32>>,

    /// Source kind: sinusoid | polynomial-bump | anisotropic-sinusoid |
    /// gaussian | gaussian-plus-sinusoid
    #[arg(long)]
    pub source: Option<String>,

    /// Harmonic along x (sinusoidal kinds only)
    #[arg(long)]
    pub k1: Option<u32>,

    /// Harmonic along y (sinusoidal kinds only)
    #[arg(long)]
    pub k2: Option<u32>,

    /// Gaussian center x (gaussian kinds only)
    #[arg(long)]
    pub x0: Option<f64>,

    /// Gaussian center y (gaussian kinds only)
    #[arg(long)]
    pub y0: Option<f64>,

    /// Measurement shots
    #[arg(long)]
    pub shots: Option<u64>,

    /// Sampling seed (ignored in exact mode)
    #[arg(long)]
    pub seed: Option<u64>,

    /// Coefficient mode: sampled | exact
    #[arg(long)]
    pub mode: Option<String>,

    /// Correction profile: auto | identity | sinusoid | anisotropic |
    /// gaussian | mixed
    #[arg(long)]
    pub correction: Option<String>,

    /// Truncate the reconstruction to TX TY modes
    #[arg(long, num_args = 2, value_names = ["TX", "TY"])]
    pub truncate: Option<Vec<usize>>,

    /// Reconstruction sign: poisson | paper-literal
    #[arg(long)]
    pub sign: Option<String>,

    /// Apply the harmonic shift before sampling
    #[arg(long)]
    pub shift: bool,

    /// Quadrature rule: simpson | trapezoid
    #[arg(long)]
    pub quad_rule: Option<String>,

    /// Quadrature subdivisions: X Y
    #[arg(long, num_args = 2, value_names = ["X", "Y"])]
    pub quad_subdivisions: Option<Vec<usize>>,

    /// Modes retained by the classical baseline: KX KY
    #[arg(long, num_args = 2, value_names = ["KX", "KY"])]
    pub classical_modes: Option<Vec<usize>>,

    /// Timing repetitions for bench/sweep (medians when > 1)
    #[arg(long)]
    pub repeat: Option<usize>,

    /// Enable the parallel evaluation paths
    #[arg(long)]
    pub parallel: bool,

    /// Output directory (default: $QPOISSON_OUT or ./out)
    #[arg(long, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,

    /// Smallest sweep size n = m (sweep only)
    #[arg(long)]
    pub min_qubits: Option<u32>,

    /// Largest sweep size n = m (sweep only)
    #[arg(long)]
    pub max_qubits: Option<u32>,
}

/// TOML mirror of the flags.
#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    lx: Option<f64>,
    ly: Option<f64>,
    qubits: Option<[u32; 2]>,
    source: Option<String>,
    k1: Option<u32>,
    k2: Option<u32>,
    x0: Option<f64>,
    y0: Option<f64>,
    shots: Option<u64>,
    seed: Option<u64>,
    mode: Option<String>,
    correction: Option<String>,
    truncate: Option<[usize; 2]>,
    sign: Option<String>,
    shift: Option<bool>,
    quad_rule: Option<String>,
    quad_subdivisions: Option<[usize; 2]>,
    classical_modes: Option<[usize; 2]>,
    repeat: Option<usize>,
    parallel: Option<bool>,
    output_dir: Option<PathBuf>,
    min_qubits: Option<u32>,
    max_qubits: Option<u32>,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
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
    pub classical_modes: (usize, usize),
    pub repeat: usize,
    pub parallel: bool,
    pub output_dir: PathBuf,
    pub sweep_qubits: (u32, u32),
}

pub fn resolve(args: &RunArgs) -> UResult<RunConfig> {
    let file = load_file(args)?;

    let lx = args.lx.or(file.lx).unwrap_or(1.0);
    let ly = args.ly.or(file.ly).unwrap_or(1.0);
    let (nq, mq) = match (&args.qubits, file.qubits) {
        (Some(v), _) => (v[0], v[1]),
        (None, Some([n, m])) => (n, m),
        (None, None) => (5, 5),
    };
    if !(lx > 0.0) {
        return Err(usage(format!("--lx must be positive, got {lx}")));
    }
    if !(ly > 0.0) {
        return Err(usage(format!("--ly must be positive, got {ly}")));
    }
    for q in [nq, mq] {
        if q < 1 || q > MAX_QUBITS_PER_AXIS {
            return Err(usage(format!(
                "--qubits values must be in [1, {MAX_QUBITS_PER_AXIS}], got {q}"
            )));
        }
    }
    let grid =
        build_grid(lx, ly, nq, mq).map_err(|e| usage(format!("--lx/--ly/--qubits: {e}")))?;

    let source = build_source(
        args.source.as_deref().or(file.source.as_deref()),
        args.k1.or(file.k1),
        args.k2.or(file.k2),
        args.x0.or(file.x0),
        args.y0.or(file.y0),
    )?;

    let shots = args.shots.or(file.shots).unwrap_or(10_000);
    if shots < 1 {
        return Err(usage("--shots must be at least 1"));
    }
    let seed = args.seed.or(file.seed).unwrap_or(42);

    let mode = match args.mode.as_deref().or(file.mode.as_deref()) {
        None | Some("sampled") => CoefficientMode::Sampled,
        Some("exact") => CoefficientMode::Exact,
        Some(other) => {
            return Err(usage(format!(
                "--mode must be 'sampled' or 'exact', got '{other}'"
            )))
        }
    };

    let correction = match args.correction.as_deref().or(file.correction.as_deref()) {
        None | Some("auto") => default_correction(&source),
        Some("identity") => CorrectionProfile::Identity,
        Some("sinusoid") => CorrectionProfile::SinusoidProfile,
        Some("anisotropic") => CorrectionProfile::AnisotropicProfile,
        Some("gaussian") => CorrectionProfile::GaussianProfile,
        Some("mixed") => CorrectionProfile::MixedProfile,
        Some(other) => {
            return Err(usage(format!(
                "--correction must be auto|identity|sinusoid|anisotropic|gaussian|mixed, got '{other}'"
            )))
        }
    };

    let truncation = match (&args.truncate, file.truncate) {
        (Some(v), _) => Some((v[0], v[1])),
        (None, Some([tx, ty])) => Some((tx, ty)),
        (None, None) => None,
    };
    if let Some((tx, ty)) = truncation {
        if tx < 1 || tx > grid.nx || ty < 1 || ty > grid.ny {
            return Err(usage(format!(
                "--truncate ({tx}, {ty}) outside [1, {}] x [1, {}]",
                grid.nx, grid.ny
            )));
        }
    }

    let sign = match args.sign.as_deref().or(file.sign.as_deref()) {
        None | Some("poisson") => SignConvention::Poisson,
        Some("paper-literal") => SignConvention::PaperLiteral,
        Some(other) => {
            return Err(usage(format!(
                "--sign must be 'poisson' or 'paper-literal', got '{other}'"
            )))
        }
    };

    let shift = args.shift || file.shift.unwrap_or(false);

    let rule = match args.quad_rule.as_deref().or(file.quad_rule.as_deref()) {
        None | Some("simpson") => QuadratureRule::Simpson,
        Some("trapezoid") => QuadratureRule::Trapezoid,
        Some(other) => {
            return Err(usage(format!(
                "--quad-rule must be 'simpson' or 'trapezoid', got '{other}'"
            )))
        }
    };
    let (sx, sy) = match (&args.quad_subdivisions, file.quad_subdivisions) {
        (Some(v), _) => (v[0], v[1]),
        (None, Some([x, y])) => (x, y),
        (None, None) => (256, 256),
    };
    let quadrature = QuadratureSpec {
        rule,
        subdivisions_x: sx,
        subdivisions_y: sy,
    };
    quadrature
        .validate()
        .map_err(|e| usage(format!("--quad-subdivisions/--quad-rule: {e}")))?;

    let classical_modes = match (&args.classical_modes, file.classical_modes) {
        (Some(v), _) => (v[0], v[1]),
        (None, Some([x, y])) => (x, y),
        (None, None) => (16.min(grid.nx), 16.min(grid.ny)),
    };
    if classical_modes.0 < 1
        || classical_modes.1 < 1
        || classical_modes.0 > grid.nx
        || classical_modes.1 > grid.ny
    {
        return Err(usage(format!(
            "--classical-modes ({}, {}) outside [1, {}] x [1, {}]",
            classical_modes.0, classical_modes.1, grid.nx, grid.ny
        )));
    }

    let repeat = args.repeat.or(file.repeat).unwrap_or(1);
    if repeat < 1 {
        return Err(usage("--repeat must be at least 1"));
    }

    let parallel = args.parallel || file.parallel.unwrap_or(false);

    let output_dir = args
        .output_dir
        .clone()
        .or(file.output_dir)
        .or_else(|| std::env::var_os("QPOISSON_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));

    let min_q = args.min_qubits.or(file.min_qubits).unwrap_or(3);
    let max_q = args.max_qubits.or(file.max_qubits).unwrap_or(8);
    for q in [min_q, max_q] {
        if q < 1 || q > MAX_QUBITS_PER_AXIS {
            return Err(usage(format!(
                "--min-qubits/--max-qubits must be in [1, {MAX_QUBITS_PER_AXIS}], got {q}"
            )));
        }
    }
    if min_q > max_q {
        return Err(usage(format!(
            "--min-qubits {min_q} exceeds --max-qubits {max_q}"
        )));
    }

    Ok(RunConfig {
        grid,
        source,
        shots,
        seed,
        mode,
        correction,
        truncation,
        sign,
        shift,
        quadrature,
        classical_modes,
        repeat,
        parallel,
        output_dir,
        sweep_qubits: (min_q, max_q),
    })
}

fn load_file(args: &RunArgs) -> UResult<FileConfig> {
    let Some(path) = &args.config else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("--config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| usage(format!("--config {}: {e}", path.display())))
}

fn build_source(
    kind: Option<&str>,
    k1: Option<u32>,
    k2: Option<u32>,
    x0: Option<f64>,
    y0: Option<f64>,
) -> UResult<SourceSpec> {
    let kind = kind.unwrap_or("sinusoid");
    let forbid_harmonics = || -> UResult<()> {
        if k1.is_some() || k2.is_some() {
            return Err(usage(format!(
                "--k1/--k2 do not apply to source '{kind}'"
            )));
        }
        Ok(())
    };
    let forbid_centers = || -> UResult<()> {
        if x0.is_some() || y0.is_some() {
            return Err(usage(format!(
                "--x0/--y0 do not apply to source '{kind}'"
            )));
        }
        Ok(())
    };
    let harmonics = || -> UResult<(u32, u32)> {
        let (a, b) = (k1.unwrap_or(1), k2.unwrap_or(1));
        if a < 1 || b < 1 {
            return Err(usage(format!("--k1/--k2 must be >= 1, got ({a}, {b})")));
        }
        Ok((a, b))
    };
    let centers = || (x0.unwrap_or(0.5), y0.unwrap_or(0.5));

    Ok(match kind {
        "sinusoid" => {
            forbid_centers()?;
            let (k1, k2) = harmonics()?;
            SourceSpec::Sinusoid { k1, k2 }
        }
        "polynomial-bump" => {
            forbid_harmonics()?;
            forbid_centers()?;
            SourceSpec::PolynomialBump
        }
        "anisotropic-sinusoid" => {
            forbid_centers()?;
            let (k1, k2) = harmonics()?;
            SourceSpec::AnisotropicSinusoid { k1, k2 }
        }
        "gaussian" => {
            forbid_harmonics()?;
            let (x0, y0) = centers();
            SourceSpec::Gaussian { x0, y0 }
        }
        "gaussian-plus-sinusoid" => {
            let (k1, k2) = harmonics()?;
            let (x0, y0) = centers();
            SourceSpec::GaussianPlusSinusoid { k1, k2, x0, y0 }
        }
        other => {
            return Err(usage(format!(
                "--source must be sinusoid|polynomial-bump|anisotropic-sinusoid|gaussian|gaussian-plus-sinusoid, got '{other}'"
            )))
        }
    })
}

/// Correction profile paired with each source kind.
pub fn default_correction(source: &SourceSpec) -> CorrectionProfile {
    match source {
        SourceSpec::Sinusoid { .. } | SourceSpec::PolynomialBump => {
            CorrectionProfile::SinusoidProfile
        }
        SourceSpec::AnisotropicSinusoid { .. } => CorrectionProfile::AnisotropicProfile,
        SourceSpec::Gaussian { .. } => CorrectionProfile::GaussianProfile,
        SourceSpec::GaussianPlusSinusoid { .. } => CorrectionProfile::MixedProfile,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let cfg = resolve(&RunArgs::default()).unwrap();
        assert_eq!((cfg.grid.n, cfg.grid.m), (5, 5));
        assert_eq!(cfg.shots, 10_000);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.mode, CoefficientMode::Sampled);
        assert_eq!(cfg.correction, CorrectionProfile::SinusoidProfile);
        assert_eq!(cfg.sign, SignConvention::Poisson);
        assert!(!cfg.shift);
    }

    #[test]
    fn qubit_cap_is_usage_error() {
        let args = RunArgs {
            qubits: Some(vec![13, 5]),
            ..Default::default()
        };
        let err = resolve(&args).unwrap_err();
        assert!(err.0.contains("--qubits"));
    }

    #[test]
    fn gaussian_gets_gaussian_profile() {
        let args = RunArgs {
            source: Some("gaussian".into()),
            x0: Some(0.5),
            y0: Some(0.5),
            ..Default::default()
        };
        let cfg = resolve(&args).unwrap();
        assert_eq!(cfg.correction, CorrectionProfile::GaussianProfile);
    }

    #[test]
    fn inapplicable_parameters_are_rejected() {
        let args = RunArgs {
            source: Some("sinusoid".into()),
            x0: Some(0.4),
            ..Default::default()
        };
        assert!(resolve(&args).unwrap_err().0.contains("--x0"));

        let args = RunArgs {
            source: Some("gaussian".into()),
            k1: Some(2),
            ..Default::default()
        };
        assert!(resolve(&args).unwrap_err().0.contains("--k1"));
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join("qpoisson-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cfg.toml");
        std::fs::write(&path, "shots = 777\nseed = 9\n").unwrap();
        let args = RunArgs {
            config: Some(path.clone()),
            shots: Some(1234),
            ..Default::default()
        };
        let cfg = resolve(&args).unwrap();
        assert_eq!(cfg.shots, 1234);
        assert_eq!(cfg.seed, 9);
        std::fs::remove_file(path).ok();
    }
}
