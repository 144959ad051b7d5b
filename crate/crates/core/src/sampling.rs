// Copyright 2026 Dephase Contributors
// SPDX-License-Identifier: MIT

//! Seeded random generators for test inputs: couplings, baths, register
//! states, and valid covariance matrices.
//!
//! Everything is driven by an explicit [`rand::Rng`] so callers own the seed
//! and runs are reproducible bit for bit.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::channel::DensityMatrix;
use crate::model::{BathSpec, CouplingSpec, SpinConfig, SystemSpec};

/// Deterministic generator for a given seed.
pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Standard normal sample (Box–Muller).
fn normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Uniformly random spin configuration on `n` qubits.
pub fn random_spins(rng: &mut impl Rng, n: usize) -> SpinConfig {
    let spins: Vec<i8> = (0..n)
        .map(|_| if rng.random::<bool>() { 1 } else { -1 })
        .collect();
    SpinConfig::new(spins).expect("generated spins are ±1")
}

/// Linear coupling matrix with entries uniform in `[−1, 1]` (occasionally
/// zeroed so sparse supports are exercised too).
pub fn random_linear_coupling(rng: &mut impl Rng, n: usize, modes: usize) -> CouplingSpec {
    let mut lambda = DMatrix::zeros(modes, n);
    for k in 0..modes {
        for i in 0..n {
            lambda[(k, i)] = if rng.random::<f64>() < 0.15 {
                0.0
            } else {
                rng.random_range(-1.0..1.0)
            };
        }
    }
    CouplingSpec::linear_matrix(lambda).expect("generated coupling is finite")
}

fn random_frequencies(rng: &mut impl Rng, modes: usize) -> Vec<f64> {
    (0..modes).map(|_| rng.random_range(0.2..3.0)).collect()
}

/// Thermal product bath with random frequencies and temperature (zero
/// temperature one time in four).
pub fn random_thermal_bath(rng: &mut impl Rng, modes: usize) -> BathSpec {
    let omega = random_frequencies(rng, modes);
    let temperature = if rng.random::<f64>() < 0.25 {
        0.0
    } else {
        rng.random_range(0.1..4.0)
    };
    BathSpec::thermal(omega, temperature).expect("generated bath is valid")
}

/// Squeezed-thermal product bath with per-mode occupations and squeezings.
pub fn random_squeezed_bath(rng: &mut impl Rng, modes: usize) -> BathSpec {
    let omega = random_frequencies(rng, modes);
    let nbar: Vec<f64> = (0..modes).map(|_| rng.random_range(0.0..1.5)).collect();
    let z: Vec<f64> = (0..modes).map(|_| rng.random_range(-0.7..0.7)).collect();
    BathSpec::product(omega, 0.0, nbar, z).expect("generated bath is valid")
}

/// Valid covariance matrix: a product squeezed-thermal diagonal conjugated
/// by random passive (orthogonal symplectic) rotations, so
/// `Θ + iΩ/2 ≥ 0` holds by construction.
pub fn random_covariance(rng: &mut impl Rng, modes: usize) -> DMatrix<f64> {
    let d = 2 * modes;
    let mut theta = DMatrix::zeros(d, d);
    for k in 0..modes {
        let nu = rng.random_range(0.5..2.0); // symplectic eigenvalue ≥ ½
        let z: f64 = rng.random_range(-0.6..0.6);
        theta[(2 * k, 2 * k)] = nu * (2.0 * z).exp();
        theta[(2 * k + 1, 2 * k + 1)] = nu * (-2.0 * z).exp();
    }
    // conjugate Θ ← G Θ Gᵀ by a Givens rotation on rows/columns (i, j)
    let givens = |theta: &mut DMatrix<f64>, i: usize, j: usize, angle: f64| {
        let (c, s) = (angle.cos(), angle.sin());
        for col in 0..d {
            let (a, b) = (theta[(i, col)], theta[(j, col)]);
            theta[(i, col)] = c * a + s * b;
            theta[(j, col)] = -s * a + c * b;
        }
        for row in 0..d {
            let (a, b) = (theta[(row, i)], theta[(row, j)]);
            theta[(row, i)] = c * a + s * b;
            theta[(row, j)] = -s * a + c * b;
        }
    };
    for _ in 0..3 * modes {
        // phase rotation inside one mode: Givens on (q_k, p_k)
        let k = rng.random_range(0..modes);
        let angle = rng.random_range(0.0..std::f64::consts::TAU);
        givens(&mut theta, 2 * k, 2 * k + 1, angle);
        if modes > 1 {
            // beamsplitter between two modes: the same Givens on the q pair
            // and on the p pair keeps the map symplectic
            let a = rng.random_range(0..modes);
            let mut b = rng.random_range(0..modes);
            while b == a {
                b = rng.random_range(0..modes);
            }
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            givens(&mut theta, 2 * a, 2 * b, angle);
            givens(&mut theta, 2 * a + 1, 2 * b + 1, angle);
        }
    }
    theta
}

/// General Gaussian bath: random valid covariance plus small random first
/// moments.
pub fn random_general_bath(rng: &mut impl Rng, modes: usize) -> BathSpec {
    let omega = random_frequencies(rng, modes);
    let theta = random_covariance(rng, modes);
    let moments = DVector::from_fn(2 * modes, |_, _| rng.random_range(-1.0..1.0));
    BathSpec::general(omega, 0.0, theta, moments).expect("generated covariance is valid")
}

/// Random system with linear coupling and a thermal product bath.
pub fn random_thermal_spec(rng: &mut impl Rng, n: usize, modes: usize) -> SystemSpec {
    let coupling = random_linear_coupling(rng, n, modes);
    let bath = random_thermal_bath(rng, modes);
    SystemSpec::new(n, coupling, bath).expect("generated spec is valid")
}

/// Random system with linear coupling and a squeezed-thermal product bath.
pub fn random_squeezed_spec(rng: &mut impl Rng, n: usize, modes: usize) -> SystemSpec {
    let coupling = random_linear_coupling(rng, n, modes);
    let bath = random_squeezed_bath(rng, modes);
    SystemSpec::new(n, coupling, bath).expect("generated spec is valid")
}

/// Random system with linear coupling and a general Gaussian bath.
pub fn random_general_spec(rng: &mut impl Rng, n: usize, modes: usize) -> SystemSpec {
    let coupling = random_linear_coupling(rng, n, modes);
    let bath = random_general_bath(rng, modes);
    SystemSpec::new(n, coupling, bath).expect("generated spec is valid")
}

/// Random pure register state (normalized complex Gaussian vector).
pub fn random_pure(rng: &mut impl Rng, n_qubits: usize) -> DensityMatrix {
    let dim = 1usize << n_qubits;
    let mut psi = DVector::from_fn(dim, |_, _| Complex64::new(normal(rng), normal(rng)));
    psi /= Complex64::new(psi.norm(), 0.0);
    DensityMatrix::from_pure(&psi).expect("normalized vector is a valid state")
}

/// Random full-rank density matrix `GG†/Tr(GG†)` with complex Gaussian `G`.
pub fn random_density(rng: &mut impl Rng, n_qubits: usize) -> DensityMatrix {
    let dim = 1usize << n_qubits;
    let g = DMatrix::from_fn(dim, dim, |_, _| Complex64::new(normal(rng), normal(rng)));
    let gg = &g * g.adjoint();
    let trace: f64 = (0..dim).map(|i| gg[(i, i)].re).sum();
    DensityMatrix::new(gg / Complex64::new(trace, 0.0)).expect("GG†/Tr is a valid state")
}
