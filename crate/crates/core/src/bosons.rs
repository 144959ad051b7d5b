// Copyright 2026 Dephase Contributors
// SPDX-License-Identifier: MIT

//! The bath side of the dynamics: the conditional bosonic state.
//!
//! Tracing out the register instead of the bath leaves the modes in a finite
//! mixture of Gaussian states, one per **distinct coupling vector**
//! `(f_1(σ), …, f_K(σ))`: basis states with identical coupling vectors drive
//! the bath identically and merge into one component (for permutation-uniform
//! couplings the components are labeled by total magnetization alone — a
//! Dicke-like collapse). The mixture is *blind to register coherences*: only
//! the populations `⟨σ|ρ|σ⟩` enter the weights.
//!
//! Each component is the initial Gaussian state displaced along the
//! σ-conditioned circular orbit: per mode
//! `α_k(σ,t) = (f_k(σ)/ω_k)(e^{−iω_k t} − 1)` for a bath starting at zero
//! first moments, and in general the phase-space moments evolve as
//! `r̄_σ(t) = R(t)(r̄₀ + s(σ)) − s(σ)`, `Θ(t) = R(t) Θ₀ R(t)ᵀ`, where `s(σ)`
//! carries `√2 f_k(σ)/ω_k` on the `q` slots and `R(t)` is the per-mode
//! clockwise rotation by `ω_k t`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::channel::DensityMatrix;
use crate::error::{Error, Result};
use crate::model::{BasisTables, SystemSpec};

/// One Gaussian component of the conditional bath mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct BosonComponent {
    /// Total register population carried by this coupling vector.
    pub weight: f64,
    /// Complex displacement per mode: `α_k = (q̄_{k} + i p̄_{k})/√2`.
    pub amplitudes: Vec<Complex64>,
    /// Phase-space first moments `(q̄_1, p̄_1, …)`, length `2K`.
    pub displacement: DVector<f64>,
}

/// The conditional bath state: a mixture of Gaussians sharing one covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct BosonMixture {
    components: Vec<BosonComponent>,
    base_covariance: DMatrix<f64>,
}

impl BosonMixture {
    /// Mixture components in a deterministic order (sorted by coupling
    /// vector); zero-weight coupling vectors are omitted.
    pub fn components(&self) -> &[BosonComponent] {
        &self.components
    }

    /// The covariance matrix shared by every component,
    /// `Θ(t) = R(t) Θ₀ R(t)ᵀ`.
    pub fn base_covariance(&self) -> &DMatrix<f64> {
        &self.base_covariance
    }

    pub fn modes(&self) -> usize {
        self.base_covariance.nrows() / 2
    }

    /// Total weight (equals the register trace, 1).
    pub fn total_weight(&self) -> f64 {
        self.components.iter().map(|c| c.weight).sum()
    }
}

/// Block-diagonal phase-space rotation `R(t)`: per mode
/// `[[cos ω_k t, sin ω_k t], [−sin ω_k t, cos ω_k t]]`.
fn rotation(spec: &SystemSpec, t: f64) -> DMatrix<f64> {
    let kk = spec.modes();
    let mut r = DMatrix::zeros(2 * kk, 2 * kk);
    for k in 0..kk {
        let a = spec.bath().omega_k(k) * t;
        r[(2 * k, 2 * k)] = a.cos();
        r[(2 * k, 2 * k + 1)] = a.sin();
        r[(2 * k + 1, 2 * k)] = -a.sin();
        r[(2 * k + 1, 2 * k + 1)] = a.cos();
    }
    r
}

/// Computes the conditional bath mixture at time `t` for register state
/// `rho`.
///
/// Groups basis states by bit-identical coupling vector (`−0` normalized to
/// `+0`), sums their populations into the component weights (they add to the
/// trace exactly), and displaces the initial Gaussian along each group's
/// orbit. At most `2^N` components; exactly-zero-weight groups are dropped.
pub fn boson_state(spec: &SystemSpec, rho: &DensityMatrix, t: f64) -> Result<BosonMixture> {
    if !t.is_finite() {
        return Err(Error::validation("evolution time must be finite"));
    }
    let tables = BasisTables::build(spec)?;
    if rho.dim() != tables.dim {
        return Err(Error::dimension(format!(
            "state is for {} qubits but the model has {}",
            rho.n_qubits(),
            spec.n_qubits()
        )));
    }
    let kk = spec.modes();

    // group basis states by coupling vector
    let mut groups: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
    for b in 0..tables.dim {
        let key: Vec<u64> = (0..kk)
            .map(|k| {
                let f = tables.f[k][b];
                (if f == 0.0 { 0.0 } else { f }).to_bits()
            })
            .collect();
        *groups.entry(key).or_insert(0.0) += rho.element(b, b).re;
    }

    let r = rotation(spec, t);
    let theta0 = spec.bath().covariance_full();
    let base_covariance = &r * theta0 * r.transpose();
    let r0 = spec.bath().first_moments_full();
    let sqrt2 = std::f64::consts::SQRT_2;

    let mut components = Vec::with_capacity(groups.len());
    for (key, weight) in groups {
        if weight == 0.0 {
            continue;
        }
        // s(σ): √2 f_k/ω_k on the q slots
        let mut s = DVector::zeros(2 * kk);
        for (k, bits) in key.iter().enumerate() {
            let f = f64::from_bits(*bits);
            s[2 * k] = sqrt2 * f / spec.bath().omega_k(k);
        }
        let displacement = &r * (&r0 + &s) - &s;
        let amplitudes = (0..kk)
            .map(|k| Complex64::new(displacement[2 * k], displacement[2 * k + 1]) / sqrt2)
            .collect();
        components.push(BosonComponent {
            weight,
            amplitudes,
            displacement,
        });
    }
    Ok(BosonMixture {
        components,
        base_covariance,
    })
}

/// First and second moments of the full mixture: the mean
/// `r̄ = Σ_σ w_σ r̄_σ` and the effective covariance
/// `Θ_eff = Θ(t) + Σ_σ w_σ (r̄_σ − r̄)(r̄_σ − r̄)ᵀ` (the shared Gaussian
/// covariance plus the spread of the component displacements).
pub fn mixture_moments(mixture: &BosonMixture) -> (DVector<f64>, DMatrix<f64>) {
    let d = 2 * mixture.modes();
    let mut mean = DVector::zeros(d);
    for c in &mixture.components {
        mean += &c.displacement * c.weight;
    }
    let mut cm = mixture.base_covariance.clone();
    for c in &mixture.components {
        let dev = &c.displacement - &mean;
        cm += (&dev * dev.transpose()) * c.weight;
    }
    (mean, cm)
}
