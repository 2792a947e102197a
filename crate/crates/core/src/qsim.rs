//! Minimal statevector simulator for the two-register QFT pipeline.
//!
//! A state over n + m qubits stores 2^(n+m) complex amplitudes in the
//! x-major layout: amplitude index `i * 2^m + j` holds psi_ij, so the
//! x register sits in the high-order bits and the y register in the low
//! ones. The QFT is available both as the dense per-axis DFT (the oracle)
//! and as the standard Hadamard / controlled-phase / bit-reversal circuit;
//! the two must agree index for index.
//!
//! Sign convention: the forward transform uses kernel exp(+2 pi i k j / 2^r),
//! the inverse uses the conjugate.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::domain::SourceField;
use crate::error::{Error, Result};

/// Which register a single-register operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Register {
    X,
    Y,
}

/// QFT implementation selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QftImpl {
    /// Per-axis dense DFT matrix application.
    Dense,
    /// Gate-level Hadamard + controlled-phase + swap decomposition.
    Circuit,
}

/// Complex amplitude vector over the (n+m)-qubit register.
#[derive(Debug, Clone)]
pub struct QuantumState {
    n: u32,
    m: u32,
    amplitudes: Array1<Complex64>,
}

const NORM_TOLERANCE: f64 = 1e-10;

impl QuantumState {
    /// Wrap an amplitude vector, checking length and unit norm.
    pub fn new(n: u32, m: u32, amplitudes: Array1<Complex64>) -> Result<Self> {
        let len = 1usize << (n + m);
        if amplitudes.len() != len {
            return Err(Error::Domain(format!(
                "amplitude vector length {} != 2^({n}+{m})",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Normalization {
                norm,
                tolerance: NORM_TOLERANCE,
            });
        }
        Ok(Self { n, m, amplitudes })
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Points along x / y implied by the register split.
    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (1 << self.n, 1 << self.m)
    }

    #[inline]
    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Amplitudes reshaped to an (2^n, 2^m) matrix per the x-major layout.
    pub fn as_matrix(&self) -> Array2<Complex64> {
        let (nx, ny) = self.dims();
        Array2::from_shape_vec((nx, ny), self.amplitudes.to_vec())
            .expect("length checked at construction")
    }
}

/// Amplitude-encode a sampled source into a quantum state.
pub fn prepare_state(field: &SourceField) -> Result<QuantumState> {
    QuantumState::new(field.grid.n, field.grid.m, field.amplitudes.clone())
}

/// Forward unitary DFT along one register's axis (dense kernel).
pub fn qft_register_dense(state: &QuantumState, register: Register) -> QuantumState {
    dense_transform(state, register, false)
}

/// Conjugate (inverse) dense transform along one register's axis.
pub fn inverse_qft_register_dense(state: &QuantumState, register: Register) -> QuantumState {
    dense_transform(state, register, true)
}

fn dense_transform(state: &QuantumState, register: Register, inverse: bool) -> QuantumState {
    let (nx, ny) = state.dims();
    let r = match register {
        Register::X => nx,
        Register::Y => ny,
    };
    // Roots table: roots[t] = exp(+- 2 pi i t / r).
    let sign = if inverse { -1.0 } else { 1.0 };
    let roots: Vec<Complex64> = (0..r)
        .map(|t| Complex64::from_polar(1.0, sign * TAU * t as f64 / r as f64))
        .collect();
    let scale = 1.0 / (r as f64).sqrt();

    let src = state.amplitudes.as_slice().expect("contiguous");
    let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
    match register {
        Register::X => {
            // out[k*ny + j] = scale * sum_i roots[(k*i) % nx] * src[i*ny + j]
            for k in 0..nx {
                let row = &mut out[k * ny..(k + 1) * ny];
                for i in 0..nx {
                    let w = roots[(k * i) % nx];
                    let s = &src[i * ny..(i + 1) * ny];
                    for (o, &a) in row.iter_mut().zip(s) {
                        *o += w * a;
                    }
                }
                for o in row.iter_mut() {
                    *o *= scale;
                }
            }
        }
        Register::Y => {
            // out[i*ny + l] = scale * sum_j roots[(l*j) % ny] * src[i*ny + j]
            for i in 0..nx {
                let s = &src[i * ny..(i + 1) * ny];
                let row = &mut out[i * ny..(i + 1) * ny];
                for (l, o) in row.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (j, &a) in s.iter().enumerate() {
                        acc += roots[(l * j) % ny] * a;
                    }
                    *o = acc * scale;
                }
            }
        }
    }
    QuantumState {
        n: state.n,
        m: state.m,
        amplitudes: Array1::from_vec(out),
    }
}

/// Gate-level QFT on one register: per qubit a Hadamard followed by
/// controlled phase rotations from the lower-significance qubits, then a
/// bit-reversal swap layer confined to the register. Matches
/// [`qft_register_dense`] index for index.
pub fn qft_register_circuit(state: &QuantumState, register: Register) -> QuantumState {
    let mut amps = state.amplitudes.to_vec();
    let r = match register {
        Register::X => state.n,
        Register::Y => state.m,
    };
    // Global bit position of the register's t-th most significant qubit.
    let bit = |t: u32| -> u32 {
        match register {
            Register::X => state.m + (state.n - 1 - t),
            Register::Y => state.m - 1 - t,
        }
    };

    for t in 0..r {
        hadamard(&mut amps, bit(t));
        for d in 2..=(r - t) {
            let angle = TAU / (1u64 << d) as f64;
            controlled_phase(&mut amps, bit(t + d - 1), bit(t), angle);
        }
    }
    for t in 0..r / 2 {
        swap_bits(&mut amps, bit(t), bit(r - 1 - t));
    }

    QuantumState {
        n: state.n,
        m: state.m,
        amplitudes: Array1::from_vec(amps),
    }
}

/// Full 2D QFT: x register first, then y register.
pub fn apply_qft_2d(state: &QuantumState, implementation: QftImpl) -> QuantumState {
    match implementation {
        QftImpl::Dense => {
            let s = qft_register_dense(state, Register::X);
            qft_register_dense(&s, Register::Y)
        }
        QftImpl::Circuit => {
            let s = qft_register_circuit(state, Register::X);
            qft_register_circuit(&s, Register::Y)
        }
    }
}

fn hadamard(amps: &mut [Complex64], bit: u32) {
    let mask = 1usize << bit;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for idx in 0..amps.len() {
        if idx & mask == 0 {
            let a = amps[idx];
            let b = amps[idx | mask];
            amps[idx] = (a + b) * s;
            amps[idx | mask] = (a - b) * s;
        }
    }
}

fn controlled_phase(amps: &mut [Complex64], control: u32, target: u32, angle: f64) {
    let mask = (1usize << control) | (1usize << target);
    let phase = Complex64::from_polar(1.0, angle);
    for (idx, a) in amps.iter_mut().enumerate() {
        if idx & mask == mask {
            *a *= phase;
        }
    }
}

fn swap_bits(amps: &mut [Complex64], b1: u32, b2: u32) {
    let m1 = 1usize << b1;
    let m2 = 1usize << b2;
    for idx in 0..amps.len() {
        // Visit each mismatched pair once.
        if idx & m1 != 0 && idx & m2 == 0 {
            let partner = (idx & !m1) | m2;
            amps.swap(idx, partner);
        }
    }
}

/// Measurement outcome probabilities P(k, l) = |psi~_kl|^2 as an N x M matrix.
pub fn exact_probabilities(state: &QuantumState) -> Array2<f64> {
    let (nx, ny) = state.dims();
    let mut p = Array2::zeros((nx, ny));
    for (idx, a) in state.amplitudes.iter().enumerate() {
        p[[idx / ny, idx % ny]] = a.norm_sqr();
    }
    p
}

/// Measurement outcomes (k, l) -> occurrence count; absent outcomes are
/// omitted rather than stored as zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountsMap {
    pub counts: BTreeMap<(usize, usize), u64>,
    pub shots: u64,
}

impl CountsMap {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Draw `shots` independent samples from the exact outcome distribution.
///
/// Sampling is inverse-CDF over the cumulative probability vector with a
/// counter-based seeded generator (ChaCha8), strictly sequential in the
/// sample index: identical (state, shots, seed) triples reproduce the same
/// counts on every platform.
pub fn measure_counts(state: &QuantumState, shots: u64, seed: u64) -> CountsMap {
    assert!(shots >= 1, "shots must be >= 1");
    let (_, ny) = state.dims();
    let probs: Vec<f64> = state.amplitudes.iter().map(|a| a.norm_sqr()).collect();
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (idx, &p) in probs.iter().enumerate() {
        acc += p;
        cumulative.push(acc);
        if p > 0.0 {
            last_positive = idx;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.random();
        let mut idx = cumulative.partition_point(|&c| c <= u);
        if idx >= probs.len() {
            idx = last_positive;
        }
        *counts.entry((idx / ny, idx % ny)).or_insert(0) += 1;
    }
    CountsMap { counts, shots }
}

#[cfg(test)]
pub(crate) fn random_state(n: u32, m: u32, seed: u64) -> QuantumState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = 1usize << (n + m);
    let mut amps: Vec<Complex64> = (0..len)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    QuantumState::new(n, m, Array1::from_vec(amps)).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_grid, sample_source, SourceSpec};
    use approx::assert_abs_diff_eq;

    fn basis_state(n: u32, m: u32, idx: usize) -> QuantumState {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << (n + m)];
        amps[idx] = Complex64::new(1.0, 0.0);
        QuantumState::new(n, m, Array1::from_vec(amps)).unwrap()
    }

    fn max_elementwise_diff(a: &QuantumState, b: &QuantumState) -> f64 {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes().iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn prepare_state_copies_amplitudes() {
        let grid = build_grid(1.0, 1.0, 2, 2).unwrap();
        let field = sample_source(&SourceSpec::Sinusoid { k1: 1, k2: 1 }, &grid).unwrap();
        let state = prepare_state(&field).unwrap();
        assert_eq!(state.amplitudes(), &field.amplitudes);
        assert_abs_diff_eq!(state.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn prepare_state_rejects_denormalized() {
        let grid = build_grid(1.0, 1.0, 1, 1).unwrap();
        let mut field = sample_source(&SourceSpec::Sinusoid { k1: 1, k2: 1 }, &grid).unwrap();
        field.amplitudes *= Complex64::new(1.1, 0.0);
        assert!(matches!(
            prepare_state(&field),
            Err(Error::Normalization { .. })
        ));
    }

    #[test]
    fn basis_state_maps_to_single_outcome() {
        // |00> on one qubit per register.
        let state = basis_state(1, 1, 0);
        assert_eq!(state.amplitudes()[0], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn dense_qft_single_qubit_uniform() {
        let state = basis_state(1, 1, 0);
        let out = qft_register_dense(&state, Register::X);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // |0>_x -> (|0> + |1>)/sqrt(2) on the x register, y untouched.
        assert_abs_diff_eq!(out.amplitudes()[0].re, s, epsilon = 1e-12);
        assert_abs_diff_eq!(out.amplitudes()[2].re, s, epsilon = 1e-12);
    }

    #[test]
    fn dense_qft_four_point_row() {
        // n=2 register applied to |1>: amplitudes (1/2)(1, i, -1, -i).
        let state = basis_state(2, 1, 0b010); // x index 1, y index 0
        let out = qft_register_dense(&state, Register::X);
        let expect = [
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.5),
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.0, -0.5),
        ];
        for (k, e) in expect.iter().enumerate() {
            let got = out.amplitudes()[k * 2];
            assert_abs_diff_eq!(got.re, e.re, epsilon = 1e-12);
            assert_abs_diff_eq!(got.im, e.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn dense_qft_preserves_norm() {
        let state = random_state(3, 2, 7);
        let out = qft_register_dense(&state, Register::Y);
        assert_abs_diff_eq!(out.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dense_inverse_recovers_input() {
        let state = random_state(3, 3, 11);
        let fwd = qft_register_dense(&state, Register::X);
        let back = inverse_qft_register_dense(&fwd, Register::X);
        assert!(max_elementwise_diff(&state, &back) < 1e-10);
    }

    #[test]
    fn circuit_matches_dense_on_basis_states() {
        for idx in 0..16 {
            let state = basis_state(2, 2, idx);
            for reg in [Register::X, Register::Y] {
                let dense = qft_register_dense(&state, reg);
                let circuit = qft_register_circuit(&state, reg);
                assert!(
                    max_elementwise_diff(&dense, &circuit) < 1e-10,
                    "mismatch at basis {idx} register {reg:?}"
                );
            }
        }
    }

    #[test]
    fn circuit_all_zero_gives_uniform() {
        let state = basis_state(3, 2, 0);
        let out = apply_qft_2d(&state, QftImpl::Circuit);
        let expected = 1.0 / (32.0f64).sqrt();
        for a in out.amplitudes() {
            assert_abs_diff_eq!(a.re, expected, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn circuit_preserves_norm_on_random_six_qubit_state() {
        let state = random_state(3, 3, 5);
        let out = qft_register_circuit(&state, Register::X);
        assert_abs_diff_eq!(out.norm(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn qft_2d_dense_vs_circuit_random_eight_qubits() {
        let state = random_state(4, 4, 13);
        let dense = apply_qft_2d(&state, QftImpl::Dense);
        let circuit = apply_qft_2d(&state, QftImpl::Circuit);
        assert!(max_elementwise_diff(&dense, &circuit) < 1e-10);
    }

    #[test]
    fn qft_2d_product_state_stays_separable() {
        // QFT_n (x) QFT_m of |k> (x) |l> is rank one as an N x M matrix;
        // check via power-iteration residual of the best rank-1 approximant.
        let state = basis_state(3, 3, 0b010_101);
        let out = apply_qft_2d(&state, QftImpl::Dense);
        let mat = out.as_matrix();
        let (nx, ny) = out.dims();

        let mut v: Vec<Complex64> = (0..ny)
            .map(|j| Complex64::new(1.0 + j as f64, 0.5))
            .collect();
        let mut u = vec![Complex64::new(0.0, 0.0); nx];
        for _ in 0..30 {
            for (i, ui) in u.iter_mut().enumerate() {
                *ui = (0..ny).map(|j| mat[[i, j]] * v[j].conj()).sum();
            }
            let nu = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            u.iter_mut().for_each(|c| *c /= nu);
            for (j, vj) in v.iter_mut().enumerate() {
                *vj = (0..nx).map(|i| mat[[i, j]].conj() * u[i]).sum::<Complex64>().conj();
            }
        }
        let sigma = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|c| *c /= sigma);
        let mut residual: f64 = 0.0;
        for i in 0..nx {
            for j in 0..ny {
                let approx = u[i] * sigma * v[j];
                residual += (mat[[i, j]] - approx).norm_sqr();
            }
        }
        assert!(residual.sqrt() < 1e-10, "rank-1 residual {residual}");
    }

    #[test]
    fn exact_probabilities_basis_and_uniform() {
        let state = basis_state(2, 2, 0b0111);
        let p = exact_probabilities(&state);
        assert_eq!(p[[1, 3]], 1.0);
        assert_abs_diff_eq!(p.sum(), 1.0, epsilon = 1e-12);

        let uniform = apply_qft_2d(&basis_state(2, 2, 0), QftImpl::Dense);
        let p = exact_probabilities(&uniform);
        for v in p.iter() {
            assert_abs_diff_eq!(*v, 1.0 / 16.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn measure_counts_degenerate_distribution() {
        let state = basis_state(2, 1, 5);
        let counts = measure_counts(&state, 1000, 99);
        assert_eq!(counts.counts.len(), 1);
        assert_eq!(counts.counts[&(2, 1)], 1000);
        assert_eq!(counts.total(), counts.shots);
    }

    #[test]
    fn measure_counts_uniform_concentration() {
        // Uniform 2-qubit state, 10^6 shots: each empirical probability
        // within 0.005 of 0.25 (well beyond the 5 sigma binomial bound).
        let uniform = apply_qft_2d(&basis_state(1, 1, 0), QftImpl::Dense);
        let counts = measure_counts(&uniform, 1_000_000, 4242);
        assert_eq!(counts.total(), 1_000_000);
        for (_, &c) in counts.counts.iter() {
            let freq = c as f64 / 1e6;
            assert!((freq - 0.25).abs() < 0.005, "freq {freq}");
        }
    }

    #[test]
    fn measure_counts_deterministic_per_seed() {
        let state = random_state(3, 2, 21);
        let a = measure_counts(&state, 5000, 7);
        let b = measure_counts(&state, 5000, 7);
        let c = measure_counts(&state, 5000, 8);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn state_rejects_wrong_length() {
        let amps = Array1::from_vec(vec![Complex64::new(1.0, 0.0); 3]);
        assert!(QuantumState::new(1, 1, amps).is_err());
    }
}
