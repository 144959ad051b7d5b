// Copyright 2026 Dephase Contributors
// SPDX-License-Identifier: MIT

//! System and bath descriptions: spin configurations, coupling functions,
//! Gaussian bath descriptions, and the combined [`SystemSpec`].
//!
//! Conventions (binding): `|0⟩ ↔ σ = +1`, `|1⟩ ↔ σ = −1`; bit `i` of a basis
//! index is `0` iff `σ_i = +1` (qubit 0 = least-significant bit). Quadratures
//! `q̂ = (b+b†)/√2`, `p̂ = i(b†−b)/√2`, so the vacuum covariance matrix is
//! `½·I`, a thermal mode has `(n̄+½)·I`, and a squeezed-thermal mode has
//! `(n̄+½)·diag(e^{2z}, e^{−2z})`. Phase-space vectors are ordered
//! `(q_1, p_1, q_2, p_2, …)`.
//!
//! All types here are immutable after construction and safe for concurrent
//! shared reads.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on the qubit count for basis enumeration and anything indexed by
/// basis states. `2^20` configurations is already past what dense
/// density-matrix work can use; the per-element exponent engine accepts any
/// `N ≤ MAX_QUBITS`.
pub const MAX_QUBITS: usize = 20;

/// Cap for operations that materialize `2^N × 2^N` matrices or `4^N` pair
/// lists (density matrices, the exact map, coherence sectors). Chosen for
/// predictable memory behavior: `N = 12` means 4096² complex entries
/// (≈ 268 MB) at the extreme end.
pub const MAX_DENSE_QUBITS: usize = 12;

// ---------------------------------------------------------------------------
// Thermal helpers
// ---------------------------------------------------------------------------

/// `coth(ω / 2T)` with guarded limits.
///
/// - `T = 0` (and generally `ω/2T > 30`) returns exactly `1.0`, avoiding
///   overflow in the exponential;
/// - `ω/2T < 1e−8` uses the series `2T/ω + ω/(6T)`, avoiding catastrophic
///   cancellation in `tanh`;
/// - otherwise `1/tanh(ω/2T)`.
///
/// Panics in debug builds if `omega <= 0` or `temperature < 0`; callers
/// validate at construction time.
pub fn coth_half(omega: f64, temperature: f64) -> f64 {
    debug_assert!(omega > 0.0, "mode frequency must be positive");
    debug_assert!(temperature >= 0.0, "temperature must be nonnegative");
    if temperature == 0.0 {
        return 1.0;
    }
    let x = omega / (2.0 * temperature);
    if x > 30.0 {
        1.0
    } else if x < 1e-8 {
        1.0 / x + x / 3.0
    } else {
        1.0 / x.tanh()
    }
}

/// Bose–Einstein occupation `n̄(ω, T) = 1/(e^{ω/T} − 1) = (coth(ω/2T) − 1)/2`.
///
/// `T = 0` gives `0`. Uses the same guarded `coth` as the damping formulas so
/// that `2n̄ + 1` recovers `coth(ω/2T)` to a couple of ulps.
pub fn thermal_occupation(omega: f64, temperature: f64) -> f64 {
    (coth_half(omega, temperature) - 1.0) / 2.0
}

// ---------------------------------------------------------------------------
// SpinConfig
// ---------------------------------------------------------------------------

/// A computational-basis configuration of `N` spins, each `+1` or `−1`.
///
/// Bijective with basis indices in `[0, 2^N)`: bit `i` of the index is `0`
/// iff `σ_i = +1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinConfig {
    spins: Vec<i8>,
}

impl SpinConfig {
    /// Validates that every entry is exactly `+1` or `−1`.
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if spins.is_empty() {
            return Err(Error::validation("spin configuration must be non-empty"));
        }
        if spins.len() > MAX_QUBITS {
            return Err(Error::capacity(format!(
                "{} spins exceeds the cap of {MAX_QUBITS}",
                spins.len()
            )));
        }
        if let Some(bad) = spins.iter().find(|s| **s != 1 && **s != -1) {
            return Err(Error::validation(format!(
                "spin entries must be +1 or -1, got {bad}"
            )));
        }
        Ok(SpinConfig { spins })
    }

    /// Configuration for basis index `index` of an `n`-qubit register.
    pub fn from_index(index: usize, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::capacity(format!(
                "qubit count {n} outside 1..={MAX_QUBITS}"
            )));
        }
        if index >= (1usize << n) {
            return Err(Error::validation(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        let spins = (0..n)
            .map(|i| if (index >> i) & 1 == 0 { 1 } else { -1 })
            .collect();
        Ok(SpinConfig { spins })
    }

    /// Basis index of this configuration (inverse of [`SpinConfig::from_index`]).
    pub fn index(&self) -> usize {
        self.spins
            .iter()
            .enumerate()
            .map(|(i, s)| if *s == 1 { 0 } else { 1usize << i })
            .sum()
    }

    /// Number of qubits.
    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    /// Spin of qubit `i` (`+1` or `−1`). Panics if out of bounds.
    pub fn spin(&self, i: usize) -> i8 {
        self.spins[i]
    }

    /// All spins, qubit 0 first.
    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    /// Total magnetization `M(σ) = Σ_i σ_i`; parity equals the parity of `N`
    /// and the range is `[−N, N]`.
    pub fn magnetization(&self) -> i64 {
        self.spins.iter().map(|s| *s as i64).sum()
    }

    /// The globally flipped configuration `−σ`.
    pub fn flipped(&self) -> SpinConfig {
        SpinConfig {
            spins: self.spins.iter().map(|s| -s).collect(),
        }
    }
}

/// All `2^N` spin configurations in basis-index order.
///
/// Errors with a capacity error if `N` is outside `1..=MAX_QUBITS`.
pub fn enumerate_basis(n: usize) -> Result<Vec<SpinConfig>> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::capacity(format!(
            "qubit count {n} outside 1..={MAX_QUBITS}"
        )));
    }
    (0..(1usize << n))
        .map(|b| SpinConfig::from_index(b, n))
        .collect()
}

/// Free-function form of [`SpinConfig::magnetization`].
pub fn magnetization(sigma: &SpinConfig) -> i64 {
    sigma.magnetization()
}

// ---------------------------------------------------------------------------
// CouplingSpec
// ---------------------------------------------------------------------------

/// A single Pauli-Z monomial `c · σ_{i1} σ_{i2} …` with a sorted, duplicate-free
/// support (duplicates collapse at construction via `σ_i² = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub support: Vec<usize>,
}

/// Per-mode coupling functions `f_k(σ)`.
///
/// `Linear` holds a `K×N` real matrix `λ` with `f_k(σ) = Σ_i λ_ki σ_i`;
/// `Polynomial` holds, per mode, a list of Pauli-Z monomials. `Linear` is
/// exactly representable as `Polynomial` with singleton supports
/// (see [`CouplingSpec::to_polynomial`]).
#[derive(Debug, Clone, PartialEq)]
pub enum CouplingSpec {
    Linear { lambda: DMatrix<f64> },
    Polynomial { modes: Vec<Vec<Monomial>> },
}

impl CouplingSpec {
    /// Linear coupling from row-per-mode data: `rows[k][i] = λ_ki`.
    pub fn linear(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::validation("coupling needs at least one mode"));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(Error::validation("coupling rows must be non-empty"));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::validation(
                "coupling rows must all have equal length",
            ));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::validation("coupling entries must be finite"));
        }
        let k = rows.len();
        let lambda = DMatrix::from_fn(k, n, |r, c| rows[r][c]);
        Ok(CouplingSpec::Linear { lambda })
    }

    /// Linear coupling from a `K×N` matrix.
    pub fn linear_matrix(lambda: DMatrix<f64>) -> Result<Self> {
        if lambda.nrows() == 0 || lambda.ncols() == 0 {
            return Err(Error::validation("coupling matrix must be non-empty"));
        }
        if lambda.iter().any(|x| !x.is_finite()) {
            return Err(Error::validation("coupling entries must be finite"));
        }
        Ok(CouplingSpec::Linear { lambda })
    }

    /// Polynomial coupling from per-mode monomial lists `(coefficient, support)`.
    ///
    /// Pre-reduction at construction: repeated indices inside a support
    /// collapse pairwise (`σ_i² = 1`), monomials with identical reduced support
    /// merge by summing coefficients, and exact-zero coefficients are dropped.
    /// The empty support encodes a constant term.
    pub fn polynomial(modes: Vec<Vec<(f64, Vec<usize>)>>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::validation("coupling needs at least one mode"));
        }
        let mut reduced_modes = Vec::with_capacity(modes.len());
        for terms in modes {
            let mut by_support: std::collections::BTreeMap<Vec<usize>, f64> =
                std::collections::BTreeMap::new();
            for (coeff, support) in terms {
                if !coeff.is_finite() {
                    return Err(Error::validation("monomial coefficients must be finite"));
                }
                // σ_i² = 1: keep only indices appearing an odd number of times.
                let mut counts: std::collections::BTreeMap<usize, usize> =
                    std::collections::BTreeMap::new();
                for i in support {
                    *counts.entry(i).or_insert(0) += 1;
                }
                let reduced: Vec<usize> = counts
                    .into_iter()
                    .filter_map(|(i, c)| (c % 2 == 1).then_some(i))
                    .collect();
                *by_support.entry(reduced).or_insert(0.0) += coeff;
            }
            let monomials: Vec<Monomial> = by_support
                .into_iter()
                .filter(|(_, c)| *c != 0.0)
                .map(|(support, coeff)| Monomial { coeff, support })
                .collect();
            reduced_modes.push(monomials);
        }
        Ok(CouplingSpec::Polynomial {
            modes: reduced_modes,
        })
    }

    /// Number of modes `K`.
    pub fn modes(&self) -> usize {
        match self {
            CouplingSpec::Linear { lambda } => lambda.nrows(),
            CouplingSpec::Polynomial { modes } => modes.len(),
        }
    }

    /// Minimum qubit count this coupling addresses (`Linear`: exactly the
    /// column count; `Polynomial`: one past the largest supported index).
    pub fn min_qubits(&self) -> usize {
        match self {
            CouplingSpec::Linear { lambda } => lambda.ncols(),
            CouplingSpec::Polynomial { modes } => modes
                .iter()
                .flatten()
                .flat_map(|m| m.support.iter().copied())
                .max()
                .map_or(1, |i| i + 1),
        }
    }

    /// Evaluates `f_k(σ)`. Panics if `k` or a support index is out of bounds.
    pub fn eval(&self, k: usize, sigma: &SpinConfig) -> f64 {
        match self {
            CouplingSpec::Linear { lambda } => {
                assert!(k < lambda.nrows(), "mode index {k} out of bounds");
                assert_eq!(
                    lambda.ncols(),
                    sigma.len(),
                    "coupling is for {} qubits, configuration has {}",
                    lambda.ncols(),
                    sigma.len()
                );
                (0..lambda.ncols())
                    .map(|i| lambda[(k, i)] * f64::from(sigma.spin(i)))
                    .sum()
            }
            CouplingSpec::Polynomial { modes } => {
                assert!(k < modes.len(), "mode index {k} out of bounds");
                modes[k]
                    .iter()
                    .map(|m| {
                        let sign: i64 = m
                            .support
                            .iter()
                            .map(|i| i64::from(sigma.spin(*i)))
                            .product();
                        m.coeff * sign as f64
                    })
                    .sum()
            }
        }
    }

    /// The `λ` matrix if this coupling is linear.
    pub fn as_linear(&self) -> Option<&DMatrix<f64>> {
        match self {
            CouplingSpec::Linear { lambda } => Some(lambda),
            CouplingSpec::Polynomial { .. } => None,
        }
    }

    /// The equivalent `Polynomial` representation (singleton supports for
    /// `Linear`; evaluation order is preserved so both forms add the same
    /// terms in the same order and agree bit-for-bit).
    pub fn to_polynomial(&self) -> CouplingSpec {
        match self {
            CouplingSpec::Linear { lambda } => {
                let modes = (0..lambda.nrows())
                    .map(|k| {
                        (0..lambda.ncols())
                            .map(|i| Monomial {
                                coeff: lambda[(k, i)],
                                support: vec![i],
                            })
                            .collect()
                    })
                    .collect();
                CouplingSpec::Polynomial { modes }
            }
            poly => poly.clone(),
        }
    }
}

/// Free-function form of [`CouplingSpec::eval`]: returns `f_k(σ)`.
pub fn eval_coupling(coupling: &CouplingSpec, k: usize, sigma: &SpinConfig) -> f64 {
    coupling.eval(k, sigma)
}

// ---------------------------------------------------------------------------
// BathSpec
// ---------------------------------------------------------------------------

/// Gaussian initial state of the bath.
#[derive(Debug, Clone, PartialEq)]
pub enum GaussianState {
    /// Product of per-mode squeezed-thermal states: occupation `n̄_k ≥ 0`,
    /// squeezing `z_k ∈ ℝ`, zero first moments. Mode covariance
    /// `(n̄_k+½)·diag(e^{2z_k}, e^{−2z_k})`.
    ProductSqueezed { nbar: Vec<f64>, z: Vec<f64> },
    /// Full `2K×2K` covariance matrix and first-moment vector, ordering
    /// `(q_1, p_1, q_2, p_2, …)`.
    General {
        covariance: DMatrix<f64>,
        first_moments: DVector<f64>,
    },
}

/// Bath description: mode frequencies, temperature, and Gaussian initial state.
///
/// The temperature enters the closed-form damping expressions only through
/// the occupations `n̄_k` stored in the product form (thermal constructors set
/// `n̄_k` from Bose–Einstein at `(ω_k, T)`, so `2n̄_k+1 = coth(ω_k/2T)` to a
/// couple of ulps). A general Gaussian state carries its thermal content in
/// the covariance matrix itself.
#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec {
    omega: Vec<f64>,
    temperature: f64,
    state: GaussianState,
}

impl BathSpec {
    fn validate_omega_temperature(omega: &[f64], temperature: f64) -> Result<()> {
        if omega.is_empty() {
            return Err(Error::validation("bath needs at least one mode"));
        }
        if omega.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::validation(
                "mode frequencies must be finite and strictly positive",
            ));
        }
        if temperature.is_nan() || temperature < 0.0 {
            return Err(Error::validation("temperature must be ≥ 0"));
        }
        if temperature.is_infinite() {
            return Err(Error::validation(
                "infinite temperature is rejected: coth(ω/2T) diverges, every coherence \
                 would damp instantly — use a large finite temperature instead",
            ));
        }
        Ok(())
    }

    /// Thermal bath: `n̄_k` from Bose–Einstein at `(ω_k, T)`, no squeezing.
    pub fn thermal(omega: Vec<f64>, temperature: f64) -> Result<Self> {
        let z = vec![0.0; omega.len()];
        Self::squeezed_thermal(omega, temperature, z)
    }

    /// Squeezed-thermal product bath: `n̄_k` from Bose–Einstein at `(ω_k, T)`,
    /// per-mode squeezing `z_k` (any real sign).
    pub fn squeezed_thermal(omega: Vec<f64>, temperature: f64, z: Vec<f64>) -> Result<Self> {
        Self::validate_omega_temperature(&omega, temperature)?;
        let nbar = omega
            .iter()
            .map(|w| thermal_occupation(*w, temperature))
            .collect();
        Self::product(omega, temperature, nbar, z)
    }

    /// Product bath with explicit occupations and squeezings.
    pub fn product(omega: Vec<f64>, temperature: f64, nbar: Vec<f64>, z: Vec<f64>) -> Result<Self> {
        Self::validate_omega_temperature(&omega, temperature)?;
        if nbar.len() != omega.len() || z.len() != omega.len() {
            return Err(Error::dimension(format!(
                "bath has {} modes but got {} occupations and {} squeezings",
                omega.len(),
                nbar.len(),
                z.len()
            )));
        }
        if nbar.iter().any(|n| !n.is_finite() || *n < 0.0) {
            return Err(Error::validation("occupations n̄ must be finite and ≥ 0"));
        }
        if z.iter().any(|x| !x.is_finite()) {
            return Err(Error::validation("squeezing parameters must be finite"));
        }
        Ok(BathSpec {
            omega,
            temperature,
            state: GaussianState::ProductSqueezed { nbar, z },
        })
    }

    /// General Gaussian bath from a full covariance matrix and first moments.
    ///
    /// Validates `Θ = Θᵀ` (to 1e−10, then symmetrizes) and the uncertainty
    /// condition `Θ + (i/2)Ω ⪰ 0` (smallest eigenvalue ≥ −1e−10). The
    /// temperature is recorded but the dynamics of a general bath is fully
    /// determined by `(Θ, r̄)`.
    pub fn general(
        omega: Vec<f64>,
        temperature: f64,
        covariance: DMatrix<f64>,
        first_moments: DVector<f64>,
    ) -> Result<Self> {
        Self::validate_omega_temperature(&omega, temperature)?;
        let k = omega.len();
        let d = 2 * k;
        if covariance.nrows() != d || covariance.ncols() != d {
            return Err(Error::dimension(format!(
                "covariance must be {d}×{d} for {k} modes, got {}×{}",
                covariance.nrows(),
                covariance.ncols()
            )));
        }
        if first_moments.len() != d {
            return Err(Error::dimension(format!(
                "first moments must have length {d}, got {}",
                first_moments.len()
            )));
        }
        if covariance.iter().any(|x| !x.is_finite()) || first_moments.iter().any(|x| !x.is_finite())
        {
            return Err(Error::validation("covariance and moments must be finite"));
        }
        let asym = (&covariance - covariance.transpose()).abs().max();
        let scale = covariance.abs().max().max(1.0);
        if asym > 1e-10 * scale {
            return Err(Error::validation(format!(
                "covariance matrix is not symmetric (max asymmetry {asym:.3e})"
            )));
        }
        let theta = (&covariance + covariance.transpose()) * 0.5;
        // Uncertainty condition: Θ + (i/2)Ω must be PSD (Hermitian since Ωᵀ = −Ω).
        let omega_m = crate::exponents::symplectic_form(k);
        let mut h = DMatrix::<Complex64>::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                h[(r, c)] = Complex64::new(theta[(r, c)], 0.5 * omega_m[(r, c)]);
            }
        }
        let eig = h.symmetric_eigen();
        let min_eig = eig
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -1e-10 {
            return Err(Error::validation(format!(
                "covariance matrix violates the uncertainty relation: \
                 min eig(Θ + iΩ/2) = {min_eig:.3e} < -1e-10"
            )));
        }
        Ok(BathSpec {
            omega,
            temperature,
            state: GaussianState::General {
                covariance: theta,
                first_moments,
            },
        })
    }

    /// Number of modes `K`.
    pub fn modes(&self) -> usize {
        self.omega.len()
    }

    /// Mode frequencies `ω_k`.
    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    /// Frequency of mode `k`.
    pub fn omega_k(&self, k: usize) -> f64 {
        self.omega[k]
    }

    /// Temperature `T ≥ 0`.
    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// The Gaussian initial state.
    pub fn state(&self) -> &GaussianState {
        &self.state
    }

    /// True if the state is a product form with all `z_k = 0`.
    pub fn is_thermal_product(&self) -> bool {
        matches!(&self.state, GaussianState::ProductSqueezed { z, .. } if z.iter().all(|x| *x == 0.0))
    }

    /// True if the state is any product squeezed-thermal form.
    pub fn is_product(&self) -> bool {
        matches!(&self.state, GaussianState::ProductSqueezed { .. })
    }

    /// `2n̄_k + 1` for a product bath (the `coth(ω_k/2T)` factor of the
    /// closed-form damping expressions). Panics on a general Gaussian bath.
    pub(crate) fn coth_factor(&self, k: usize) -> f64 {
        match &self.state {
            GaussianState::ProductSqueezed { nbar, .. } => 2.0 * nbar[k] + 1.0,
            GaussianState::General { .. } => {
                unreachable!("coth factor requested for a general Gaussian bath")
            }
        }
    }

    /// Occupation/squeezing of mode `k` for a product bath.
    pub fn product_mode(&self, k: usize) -> Option<(f64, f64)> {
        match &self.state {
            GaussianState::ProductSqueezed { nbar, z } => Some((nbar[k], z[k])),
            GaussianState::General { .. } => None,
        }
    }

    /// Full `2K×2K` covariance matrix under the crate convention
    /// (product forms expand to block-diagonal).
    pub fn covariance_full(&self) -> DMatrix<f64> {
        let k = self.modes();
        match &self.state {
            GaussianState::ProductSqueezed { nbar, z } => {
                let mut theta = DMatrix::zeros(2 * k, 2 * k);
                for m in 0..k {
                    let s = nbar[m] + 0.5;
                    theta[(2 * m, 2 * m)] = s * (2.0 * z[m]).exp();
                    theta[(2 * m + 1, 2 * m + 1)] = s * (-2.0 * z[m]).exp();
                }
                theta
            }
            GaussianState::General { covariance, .. } => covariance.clone(),
        }
    }

    /// First-moment vector `r̄` (zero for product forms).
    pub fn first_moments_full(&self) -> DVector<f64> {
        match &self.state {
            GaussianState::ProductSqueezed { .. } => DVector::zeros(2 * self.modes()),
            GaussianState::General { first_moments, .. } => first_moments.clone(),
        }
    }

    /// First moments `(q̄_k, p̄_k)` of mode `k` (zero for product forms).
    pub fn first_moments_mode(&self, k: usize) -> (f64, f64) {
        match &self.state {
            GaussianState::ProductSqueezed { .. } => (0.0, 0.0),
            GaussianState::General { first_moments, .. } => {
                (first_moments[2 * k], first_moments[2 * k + 1])
            }
        }
    }
}

// ---------------------------------------------------------------------------
// SystemSpec
// ---------------------------------------------------------------------------

/// Everything that defines a run: `N` qubits, coupling functions, bath, and
/// an optional diagonal system Hamiltonian `H_S` given as energies `E(σ)`.
///
/// When `hs_energies` is absent the dynamics is reported in the interaction
/// picture (the natural frame for a dephasing interaction). When present,
/// every off-diagonal element additionally acquires the phase
/// `e^{−i[E(σ) − E(σ′)]t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    n_qubits: usize,
    coupling: CouplingSpec,
    bath: BathSpec,
    hs_energies: Option<Vec<f64>>,
}

impl SystemSpec {
    pub fn new(n_qubits: usize, coupling: CouplingSpec, bath: BathSpec) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::capacity(format!(
                "qubit count {n_qubits} outside 1..={MAX_QUBITS}"
            )));
        }
        if coupling.modes() != bath.modes() {
            return Err(Error::dimension(format!(
                "coupling has {} modes but bath has {}",
                coupling.modes(),
                bath.modes()
            )));
        }
        if let CouplingSpec::Linear { lambda } = &coupling {
            if lambda.ncols() != n_qubits {
                return Err(Error::dimension(format!(
                    "linear coupling addresses {} qubits, system has {n_qubits}",
                    lambda.ncols()
                )));
            }
        }
        if coupling.min_qubits() > n_qubits {
            return Err(Error::dimension(format!(
                "coupling addresses qubit index {} but system has only {n_qubits} qubits",
                coupling.min_qubits() - 1
            )));
        }
        Ok(SystemSpec {
            n_qubits,
            coupling,
            bath,
            hs_energies: None,
        })
    }

    /// Attach diagonal system energies `E(σ)`, indexed by basis index
    /// (length `2^N`).
    pub fn with_hs_energies(mut self, energies: Vec<f64>) -> Result<Self> {
        let dim = 1usize << self.n_qubits;
        if energies.len() != dim {
            return Err(Error::dimension(format!(
                "expected {dim} energies (one per basis state), got {}",
                energies.len()
            )));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::validation("system energies must be finite"));
        }
        self.hs_energies = Some(energies);
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Dimension `2^N` of the qubit register.
    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    /// Number of bosonic modes `K`.
    pub fn modes(&self) -> usize {
        self.bath.modes()
    }

    pub fn coupling(&self) -> &CouplingSpec {
        &self.coupling
    }

    pub fn bath(&self) -> &BathSpec {
        &self.bath
    }

    /// `f_k(σ)` — convenience delegate to the coupling.
    pub fn coupling_value(&self, k: usize, sigma: &SpinConfig) -> f64 {
        self.coupling.eval(k, sigma)
    }

    /// Diagonal system energies, if configured.
    pub fn hs_energies(&self) -> Option<&[f64]> {
        self.hs_energies.as_deref()
    }

    /// `E(σ)` for basis index `b` (0 when no system Hamiltonian is set).
    pub fn hs_energy(&self, b: usize) -> f64 {
        self.hs_energies.as_ref().map_or(0.0, |e| e[b])
    }
}

// ---------------------------------------------------------------------------
// Internal: per-basis coupling tables
// ---------------------------------------------------------------------------

/// Precomputed `f_k(σ_b)` for every mode `k` and basis index `b` — the shared
/// fast path for whole-register operations.
#[derive(Debug, Clone)]
pub(crate) struct BasisTables {
    /// `f[k][b] = f_k(σ_b)`.
    pub f: Vec<Vec<f64>>,
    pub dim: usize,
}

impl BasisTables {
    pub fn build(spec: &SystemSpec) -> Result<Self> {
        let n = spec.n_qubits();
        if n > MAX_DENSE_QUBITS {
            return Err(Error::capacity(format!(
                "whole-register operation needs N ≤ {MAX_DENSE_QUBITS}, got {n}"
            )));
        }
        let dim = 1usize << n;
        let basis = enumerate_basis(n)?;
        let f = (0..spec.modes())
            .map(|k| basis.iter().map(|s| spec.coupling_value(k, s)).collect())
            .collect();
        Ok(BasisTables { f, dim })
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
