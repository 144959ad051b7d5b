// Copyright 2026 Dephase Contributors
// SPDX-License-Identifier: MIT

//! # dephase — exact dephasing dynamics for qubit registers coupled to bosonic modes
//!
//! This crate solves, in closed form, the dynamics of `N` qubits coupled to `K`
//! bosonic modes through arbitrary Pauli-Z coupling functions,
//!
//! ```text
//! H = H_S(σ_z) + V,    V = Σ_k [ ω_k b_k† b_k + f_k(σ_z)(b_k + b_k†) ],
//! ```
//!
//! with the bosons starting in an arbitrary Gaussian state. Because `[H_S, V] = 0`
//! the reduced qubit dynamics is pure dephasing in the computational basis: each
//! density-matrix element evolves as
//!
//! ```text
//! ⟨σ|ρ(t)|σ′⟩ = ⟨σ|ρ(0)|σ′⟩ · exp{ i[W_t(σ′) − W_t(σ) + W̃_t(σ′) − W̃_t(σ)] − Γ_t(σ,σ′) }
//! ```
//!
//! where `W_t` is a dynamical Lamb-shift, `W̃_t` its first-moment (initial bath
//! displacement) companion, and `Γ_t ≥ 0` the decoherence function. All three are
//! evaluated exactly — no master-equation approximation anywhere.
//!
//! ## Modules
//!
//! - [`model`] — system/bath description types, basis enumeration, coupling evaluation.
//! - [`exponents`] — the closed-form engine: displacement amplitudes, phase-space points,
//!   Lamb-shifts, decoherence functions, and the assembled per-element exponent.
//! - [`channel`] — the exact map on density matrices, coherence-order sectors, and the
//!   effective Lamb-shift Hamiltonian.
//! - [`linear`] — linear-coupling specializations: Ising Lamb-shift matrix `W_ij(t)`,
//!   dephasing matrix `Γ_ij(t)`, sectorized-local and fully-connected topologies.
//! - [`spectral`] — continuum-bath limit: spectral densities, integral forms of `W(t)`
//!   and `Γ(t)`, and controlled discretization back to finite mode counts.
//! - [`bosons`] — boson-side evolution as population-weighted mixtures of displaced
//!   Gaussian states.
//! - [`oracle`] — independent truncated-Fock brute-force validator.
//! - [`quadrature`] — globally adaptive Gauss–Legendre integration.
//! - [`sampling`] — seeded generators for random specs, density matrices and covariance
//!   matrices, used by the validation suites.
//!
//! ## Conventions (binding across the crate)
//!
//! - Spins: `|0⟩ ↔ σ = +1`, `|1⟩ ↔ σ = −1`; bit `i` of a basis index `b` is `0` iff
//!   `σ_i = +1` (qubit 0 is the least-significant bit).
//! - Quadratures: `q̂ = (b + b†)/√2`, `p̂ = i(b† − b)/√2`; vacuum covariance `½·I`;
//!   thermal mode covariance `(n̄+½)·I`; squeezed-thermal `(n̄+½)·diag(e^{2z}, e^{−2z})`.
//! - Symplectic form `Ω`: block-diagonal `[[0, 1], [−1, 0]]` per mode, ordering
//!   `(q_1, p_1, q_2, p_2, …)`.

pub mod bosons;
pub mod channel;
pub mod error;
pub mod exponents;
pub mod linear;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod sampling;
pub mod spectral;

pub use error::{Error, Result};

// The types and entry points most callers touch, re-exported for ergonomics.
pub use channel::DensityMatrix;
pub use model::{BathSpec, CouplingSpec, SpinConfig, SystemSpec};
pub use spectral::{discretize, DiscretizationScheme, SpectralDensity};
