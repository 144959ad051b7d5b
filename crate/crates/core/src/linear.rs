// Copyright 2026 Dephase Contributors
// SPDX-License-Identifier: MIT

//! Structure of linear couplings: topology classification and the matrix
//! forms the closed-form laws are built from.
//!
//! For a linear coupling `f_k(σ) = Σ_i λ_ki σ_i` everything the dynamics
//! needs reduces to quadratic forms in the `λ` matrix:
//!
//! - the phase exponent is an Ising form, `W_t(σ) = σᵀ W(t) σ` with
//!   `W_ij(t) = Σ_k λ_ki λ_kj (sin ω_k t − ω_k t)/ω_k²`
//!   (see [`ising_lamb_matrix`]);
//! - for an unsqueezed thermal bath the damping exponent is
//!   `Γ(σ,σ′,t) = dᵀ Γ(t) d` with `d_i = σ′_i − σ_i` and
//!   `Γ_ij(t) = Σ_k λ_ki λ_kj coth(ω_k/2T)(1 − cos ω_k t)/ω_k²`
//!   (see [`dephasing_matrix`]).
//!
//! Two special topologies admit one-number laws ([`uniform_damping_scalar`]):
//! identical columns (every mode couples all qubits equally) give
//! `Γ = Γ₁(t)·ΔM²`, a function of the magnetization difference only; and a
//! uniform one-qubit-per-mode layout gives `Γ = 4Γ₁(t)·(number of flipped
//! qubits)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{CouplingSpec, GaussianState, SystemSpec};

/// Structural class of a linear coupling matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyTag {
    /// No special structure.
    General,
    /// `K = m·N` and mode `k` couples only qubit `⌊k/m⌋` (contiguous
    /// per-qubit blocks of `m` private modes).
    SectorizedLocal { modes_per_qubit: usize },
    /// All columns identical: every mode couples every qubit with the same
    /// weight.
    FullyConnected,
}

/// Classifies a `K×N` coupling matrix. `FullyConnected` takes precedence
/// when both patterns hold (e.g. `N = 1` or the zero matrix).
pub fn classify_matrix(lambda: &DMatrix<f64>) -> TopologyTag {
    let (kk, n) = (lambda.nrows(), lambda.ncols());
    let fully = (0..kk).all(|k| (1..n).all(|i| lambda[(k, i)] == lambda[(k, 0)]));
    if fully {
        return TopologyTag::FullyConnected;
    }
    if kk % n == 0 {
        let m = kk / n;
        let sectorized = (0..kk).all(|k| {
            let owner = k / m;
            (0..n).all(|i| i == owner || lambda[(k, i)] == 0.0)
        });
        if sectorized {
            return TopologyTag::SectorizedLocal { modes_per_qubit: m };
        }
    }
    TopologyTag::General
}

/// A validated linear coupling matrix together with its structural class.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTopology {
    lambda: DMatrix<f64>,
    tag: TopologyTag,
}

impl CouplingTopology {
    /// Validates (non-empty, finite) and classifies `lambda`.
    pub fn new(lambda: DMatrix<f64>) -> Result<Self> {
        if lambda.nrows() == 0 || lambda.ncols() == 0 {
            return Err(Error::validation("coupling matrix must be non-empty"));
        }
        if lambda.iter().any(|x| !x.is_finite()) {
            return Err(Error::validation("coupling entries must be finite"));
        }
        let tag = classify_matrix(&lambda);
        Ok(CouplingTopology { lambda, tag })
    }

    /// `K` modes all coupling the `n_qubits` qubits with per-mode weight
    /// `column[k]`.
    pub fn fully_connected(n_qubits: usize, column: Vec<f64>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::validation("need at least one qubit"));
        }
        if column.is_empty() {
            return Err(Error::validation("need at least one mode"));
        }
        let lambda = DMatrix::from_fn(column.len(), n_qubits, |k, _| column[k]);
        Self::new(lambda)
    }

    /// Each qubit owns a private block of `weights.len()` modes, every block
    /// carrying the same weights: mode `q·m + j` couples qubit `q` with
    /// weight `weights[j]`. Total `K = m·N`.
    pub fn sectorized_uniform(n_qubits: usize, weights: Vec<f64>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::validation("need at least one qubit"));
        }
        if weights.is_empty() {
            return Err(Error::validation("need at least one mode per qubit"));
        }
        let m = weights.len();
        let lambda = DMatrix::from_fn(m * n_qubits, n_qubits, |k, i| {
            if k / m == i {
                weights[k % m]
            } else {
                0.0
            }
        });
        Self::new(lambda)
    }

    pub fn tag(&self) -> TopologyTag {
        self.tag
    }

    pub fn lambda(&self) -> &DMatrix<f64> {
        &self.lambda
    }

    pub fn modes(&self) -> usize {
        self.lambda.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.lambda.ncols()
    }

    /// The coupling in the general representation used by [`SystemSpec`].
    pub fn coupling_spec(&self) -> CouplingSpec {
        CouplingSpec::Linear {
            lambda: self.lambda.clone(),
        }
    }
}

fn linear_lambda(spec: &SystemSpec) -> Result<&DMatrix<f64>> {
    spec.coupling()
        .as_linear()
        .ok_or_else(|| Error::unsupported("this operation needs a linear coupling (a λ matrix)"))
}

/// Ising matrix of the phase exponent:
/// `W_ij(t) = Σ_k λ_ki λ_kj (sin ω_k t − ω_k t)/ω_k²`, so that
/// `W_t(σ) = σᵀ W(t) σ` (the `i = j` terms contribute a σ-independent
/// constant since `σ_i² = 1`). Needs a linear coupling.
pub fn ising_lamb_matrix(spec: &SystemSpec, t: f64) -> Result<DMatrix<f64>> {
    let lambda = linear_lambda(spec)?;
    let n = lambda.ncols();
    let mut w = DMatrix::zeros(n, n);
    for k in 0..lambda.nrows() {
        let omega = spec.bath().omega_k(k);
        let geom = ((omega * t).sin() - omega * t) / (omega * omega);
        for i in 0..n {
            let li = lambda[(k, i)];
            if li == 0.0 {
                continue;
            }
            for j in 0..n {
                w[(i, j)] += li * lambda[(k, j)] * geom;
            }
        }
    }
    Ok(w)
}

/// Pairwise damping matrix for a linear coupling and an unsqueezed thermal
/// product bath:
/// `Γ_ij(t) = Σ_k λ_ki λ_kj coth(ω_k/2T)(1 − cos ω_k t)/ω_k²`, so that
/// `Γ(σ,σ′,t) = dᵀ Γ(t) d` with `d_i = σ′_i − σ_i ∈ {−2, 0, 2}`.
pub fn dephasing_matrix(spec: &SystemSpec, t: f64) -> Result<DMatrix<f64>> {
    let lambda = linear_lambda(spec)?;
    match spec.bath().state() {
        GaussianState::ProductSqueezed { z, .. } if z.iter().all(|x| *x == 0.0) => {}
        _ => {
            return Err(Error::unsupported(
                "the pairwise damping matrix needs an unsqueezed thermal product bath",
            ))
        }
    }
    let n = lambda.ncols();
    let mut g = DMatrix::zeros(n, n);
    for k in 0..lambda.nrows() {
        let omega = spec.bath().omega_k(k);
        let geom = spec.bath().coth_factor(k) * (1.0 - (omega * t).cos()) / (omega * omega);
        for i in 0..n {
            let li = lambda[(k, i)];
            if li == 0.0 {
                continue;
            }
            for j in 0..n {
                g[(i, j)] += li * lambda[(k, j)] * geom;
            }
        }
    }
    Ok(g)
}

/// The single rate `Γ₁(t)` behind the collapsed damping laws.
///
/// - Fully connected columns: `Γ₁ = Σ_k (λ_k²/ω_k²) coth(ω_k/2T)(1−cos ω_k t)`
///   over **all** modes, and every coherence damps as `Γ = Γ₁·ΔM²`.
/// - Uniform sectorized layout: the same sum over **one qubit's block**
///   (validated identical across qubits, including the block frequencies),
///   and every coherence damps as `Γ = 4Γ₁·(number of flipped qubits)`.
///
/// Needs a linear coupling and an unsqueezed thermal product bath; errors on
/// a general topology.
pub fn uniform_damping_scalar(spec: &SystemSpec, t: f64) -> Result<f64> {
    let lambda = linear_lambda(spec)?;
    match spec.bath().state() {
        GaussianState::ProductSqueezed { z, .. } if z.iter().all(|x| *x == 0.0) => {}
        _ => {
            return Err(Error::unsupported(
                "the collapsed damping laws need an unsqueezed thermal product bath",
            ))
        }
    }
    let rate = |k: usize, lam: f64| {
        let omega = spec.bath().omega_k(k);
        (lam * lam) / (omega * omega) * spec.bath().coth_factor(k) * (1.0 - (omega * t).cos())
    };
    match classify_matrix(lambda) {
        TopologyTag::FullyConnected => {
            Ok((0..lambda.nrows()).map(|k| rate(k, lambda[(k, 0)])).sum())
        }
        TopologyTag::SectorizedLocal { modes_per_qubit } => {
            let m = modes_per_qubit;
            let n = lambda.ncols();
            for q in 1..n {
                for j in 0..m {
                    let (k0, kq) = (j, q * m + j);
                    if lambda[(k0, 0)] != lambda[(kq, q)]
                        || spec.bath().omega_k(k0) != spec.bath().omega_k(kq)
                    {
                        return Err(Error::validation(
                            "the flip-count law needs every qubit's block to carry \
                             identical weights and frequencies",
                        ));
                    }
                }
            }
            Ok((0..m).map(|j| rate(j, lambda[(j, 0)])).sum())
        }
        TopologyTag::General => Err(Error::unsupported(
            "no collapsed law for a general coupling topology; \
             use the pairwise damping matrix",
        )),
    }
}
