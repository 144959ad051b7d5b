// Copyright 2026 Dephase Contributors
// SPDX-License-Identifier: MIT

//! Brute-force reference dynamics on a truncated Fock space.
//!
//! Everything else in this crate uses closed forms. This module instead
//! diagonalizes the joint Hamiltonian exactly as written —
//! `H = Σ_σ |σ⟩⟨σ| ⊗ V(σ)` with
//! `V(σ) = Σ_k ω_k b_k†b_k + f_k(σ)(b_k + b_k†)` — on a finite Fock ladder,
//! evolves the joint state per σ-block by spectral decomposition, and
//! measures whatever the closed forms predict: the reduced register state,
//! the bath's phase-space moments, and joint invariants. Agreement is then a
//! genuine end-to-end check, since no formula is shared between the two
//! paths.
//!
//! Truncation is explicit and audited: [`FockTruncation`] fixes the per-mode
//! ladder length, and every evolved state reports the population sitting on
//! the top rung ([`JointState::leakage`]) so a too-small ladder is visible
//! rather than silent.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::bosons::{boson_state, mixture_moments};
use crate::channel::{apply_map, DensityMatrix};
use crate::error::{Error, Result};
use crate::model::{enumerate_basis, BathSpec, GaussianState, SystemSpec, MAX_DENSE_QUBITS};

/// Largest dense σ-block the Hamiltonian builder will assemble.
pub const MAX_BLOCK_DIM: usize = 8192;
/// Default cap on the truncated bath dimension (product of ladder lengths).
pub const DEFAULT_DIM_CAP: usize = 200_000;
/// Default warning threshold for top-rung population.
pub const DEFAULT_LEAKAGE_THRESHOLD: f64 = 1e-8;
/// Default probability mass allowed to be dropped from thermal ladders.
pub const DEFAULT_THERMAL_TAIL: f64 = 1e-10;
/// Cap on the number of pure components a synthesized bath may expand into.
pub const MAX_BATH_COMPONENTS: usize = 4096;

// ---------------------------------------------------------------------------
// FockTruncation
// ---------------------------------------------------------------------------

/// Per-mode Fock ladder lengths plus audit thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct FockTruncation {
    levels: Vec<usize>,
    dim_cap: usize,
    leakage_threshold: f64,
}

impl FockTruncation {
    /// `levels[k]` retained Fock states for mode `k` (occupations
    /// `0..levels[k]−1`, so each entry must be ≥ 2).
    pub fn new(levels: Vec<usize>) -> Result<Self> {
        let t = FockTruncation {
            levels,
            dim_cap: DEFAULT_DIM_CAP,
            leakage_threshold: DEFAULT_LEAKAGE_THRESHOLD,
        };
        t.check()?;
        Ok(t)
    }

    fn check(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::validation("need at least one mode"));
        }
        if self.levels.iter().any(|l| *l < 2) {
            return Err(Error::validation(
                "each mode needs at least two Fock levels",
            ));
        }
        let mut dim: usize = 1;
        for l in &self.levels {
            dim = dim
                .checked_mul(*l)
                .ok_or_else(|| Error::capacity("truncated bath dimension overflows".to_string()))?;
        }
        if dim > self.dim_cap {
            return Err(Error::capacity(format!(
                "truncated bath dimension {dim} exceeds the cap of {}",
                self.dim_cap
            )));
        }
        Ok(())
    }

    pub fn with_dim_cap(mut self, dim_cap: usize) -> Result<Self> {
        self.dim_cap = dim_cap;
        self.check()?;
        Ok(self)
    }

    pub fn with_leakage_threshold(mut self, threshold: f64) -> Result<Self> {
        if threshold <= 0.0 || threshold.is_nan() {
            return Err(Error::validation("leakage threshold must be positive"));
        }
        self.leakage_threshold = threshold;
        Ok(self)
    }

    /// Ladder lengths sized from the bath and coupling: per mode the thermal
    /// ladder is cut where the Boltzmann tail drops below `tail`, stretched
    /// by the largest coherent displacement the coupling can produce
    /// (`2 max_σ|f_k(σ)|/ω_k`), a tail margin `√ln(1/tail)` covering the
    /// Poisson spread of displaced number states, and the squeezing factor
    /// `e^{|z_k|}`.
    pub fn for_bath(spec: &SystemSpec, tail: f64) -> Result<Self> {
        if !(tail > 0.0 && tail < 1.0) {
            return Err(Error::validation("tail must be in (0, 1)"));
        }
        let tables = crate::model::BasisTables::build(spec)?;
        let kk = spec.modes();
        let margin = (1.0 / tail).ln().sqrt();
        let mut levels = Vec::with_capacity(kk);
        for k in 0..kk {
            let omega = spec.bath().omega_k(k);
            let (nbar, zmag) = mode_thermal_profile(spec.bath(), k);
            let n_keep = if nbar > 0.0 {
                (tail.ln() / (nbar / (nbar + 1.0)).ln()).ceil().max(0.0)
            } else {
                0.0
            };
            let fmax = tables.f[k].iter().fold(0.0f64, |acc, f| acc.max(f.abs()));
            let drive = 2.0 * fmax / omega;
            let reach = (n_keep.sqrt() + drive + margin) * zmag.exp();
            levels.push((reach * reach).ceil() as usize + 4);
        }
        Self::new(levels)
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn modes(&self) -> usize {
        self.levels.len()
    }

    /// Product of the ladder lengths — the dimension of one σ-block.
    pub fn total_dim(&self) -> usize {
        self.levels.iter().product()
    }

    pub fn leakage_threshold(&self) -> f64 {
        self.leakage_threshold
    }
}

/// Effective `(n̄, |z|)` of mode `k`, read off the product form directly or
/// estimated from that mode's 2×2 covariance block (symplectic eigenvalue
/// `ν = √det` gives `n̄ = ν − ½`; the block's eigenvalue ratio gives `|z|`).
fn mode_thermal_profile(bath: &BathSpec, k: usize) -> (f64, f64) {
    match bath.state() {
        GaussianState::ProductSqueezed { nbar, z } => (nbar[k], z[k].abs()),
        GaussianState::General { covariance, .. } => {
            let a = covariance[(2 * k, 2 * k)];
            let b = covariance[(2 * k + 1, 2 * k + 1)];
            let c = covariance[(2 * k, 2 * k + 1)];
            let nu = (a * b - c * c).max(0.25).sqrt();
            let mean = 0.5 * (a + b);
            let gap = (0.25 * (a - b) * (a - b) + c * c).sqrt();
            let (e1, e2) = (mean + gap, (mean - gap).max(1e-300));
            ((nu - 0.5).max(0.0), 0.25 * (e1 / e2).ln())
        }
    }
}

// ---------------------------------------------------------------------------
// Fock-space bath states
// ---------------------------------------------------------------------------

/// A bath state on the truncated Fock space, stored as a finite mixture of
/// pure vectors `(weight, |ψ⟩)`. Mode 0 is the fastest-varying index of the
/// flattened vector.
#[derive(Debug, Clone, PartialEq)]
pub struct BathStateFock {
    dims: Vec<usize>,
    components: Vec<(f64, DVector<Complex64>)>,
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = Vec::with_capacity(dims.len());
    let mut acc = 1;
    for d in dims {
        s.push(acc);
        acc *= d;
    }
    s
}

impl BathStateFock {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn components(&self) -> &[(f64, DVector<Complex64>)] {
        &self.components
    }

    /// Probability mass lost to truncation: `1 − Σ_w w‖ψ_w‖²`.
    pub fn norm_deficit(&self) -> f64 {
        1.0 - self
            .components
            .iter()
            .map(|(w, psi)| w * psi.norm_squared())
            .sum::<f64>()
    }

    /// `|0, …, 0⟩`.
    pub fn vacuum(dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims)?;
        let total: usize = dims.iter().product();
        let mut psi = DVector::zeros(total);
        psi[0] = Complex64::new(1.0, 0.0);
        Ok(BathStateFock {
            dims,
            components: vec![(1.0, psi)],
        })
    }

    /// Product of coherent states, from the closed form
    /// `⟨n|α⟩ = e^{−|α|²/2} αⁿ/√n!`.
    pub fn coherent(dims: Vec<usize>, alphas: &[Complex64]) -> Result<Self> {
        check_dims(&dims)?;
        if alphas.len() != dims.len() {
            return Err(Error::dimension(format!(
                "{} modes but {} amplitudes",
                dims.len(),
                alphas.len()
            )));
        }
        let parts: Vec<BathStateFock> = dims
            .iter()
            .zip(alphas)
            .map(|(d, alpha)| {
                let mut psi = DVector::zeros(*d);
                let mut amp = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
                psi[0] = amp;
                for n in 1..*d {
                    amp = amp * alpha / Complex64::new((n as f64).sqrt(), 0.0);
                    psi[n] = amp;
                }
                BathStateFock {
                    dims: vec![*d],
                    components: vec![(1.0, psi)],
                }
            })
            .collect();
        Self::product(parts)
    }

    /// Product of thermal modes: per mode the Boltzmann mixture of Fock
    /// states, cut once the kept mass reaches `1 − tail`.
    pub fn thermal(dims: Vec<usize>, nbar: &[f64], tail: f64) -> Result<Self> {
        let z = vec![0.0; dims.len()];
        Self::squeezed_thermal(dims, nbar, &z, tail)
    }

    /// Product of squeezed-thermal modes: the mixture
    /// `Σ_n p_n(n̄) S(z)|n⟩⟨n|S(z)†` per mode, with
    /// `S(z) = exp[(z/2)(b†² − b²)]` applied exactly (dense orthogonal
    /// matrix on the ladder).
    pub fn squeezed_thermal(dims: Vec<usize>, nbar: &[f64], z: &[f64], tail: f64) -> Result<Self> {
        let alphas = vec![Complex64::new(0.0, 0.0); dims.len()];
        Self::displaced_squeezed_thermal(dims, &alphas, z, nbar, tail)
    }

    /// Product of displaced squeezed-thermal modes
    /// `D(α)S(z) [Σ_n p_n(n̄)|n⟩⟨n|] S† D†`.
    pub fn displaced_squeezed_thermal(
        dims: Vec<usize>,
        alphas: &[Complex64],
        z: &[f64],
        nbar: &[f64],
        tail: f64,
    ) -> Result<Self> {
        check_dims(&dims)?;
        if alphas.len() != dims.len() || z.len() != dims.len() || nbar.len() != dims.len() {
            return Err(Error::dimension(
                "alphas, squeezings and occupations must all match the mode count",
            ));
        }
        if !(tail > 0.0 && tail < 1.0) {
            return Err(Error::validation("tail must be in (0, 1)"));
        }
        if nbar.iter().any(|n| !n.is_finite() || *n < 0.0) {
            return Err(Error::validation("occupations must be finite and ≥ 0"));
        }
        let mut parts = Vec::with_capacity(dims.len());
        for k in 0..dims.len() {
            let d = dims[k];
            // unitary part: D(α) S(z) as one dense matrix on the ladder
            let needs_squeeze = z[k] != 0.0;
            let needs_displace = alphas[k] != Complex64::new(0.0, 0.0);
            let unitary: Option<DMatrix<Complex64>> = if needs_squeeze || needs_displace {
                let mut u = DMatrix::<Complex64>::identity(d, d);
                if needs_squeeze {
                    let mut gen = DMatrix::<Complex64>::zeros(d, d);
                    for n in 0..d.saturating_sub(2) {
                        let amp = 0.5 * z[k] * (((n + 1) * (n + 2)) as f64).sqrt();
                        gen[(n + 2, n)] = Complex64::new(amp, 0.0); // (z/2) b†²
                        gen[(n, n + 2)] = Complex64::new(-amp, 0.0); // −(z/2) b²
                    }
                    u = expm(&gen) * u;
                }
                if needs_displace {
                    let mut gen = DMatrix::<Complex64>::zeros(d, d);
                    for n in 0..d - 1 {
                        let s = ((n + 1) as f64).sqrt();
                        gen[(n + 1, n)] = alphas[k] * s; // α b†
                        gen[(n, n + 1)] = -alphas[k].conj() * s; // −ᾱ b
                    }
                    u = expm(&gen) * u;
                }
                Some(u)
            } else {
                None
            };
            let probs = thermal_weights(nbar[k], tail, d);
            if probs.len() > MAX_BATH_COMPONENTS {
                return Err(Error::capacity(format!(
                    "mode {k} expands into {} thermal components (cap {MAX_BATH_COMPONENTS})",
                    probs.len()
                )));
            }
            let components = probs
                .into_iter()
                .enumerate()
                .map(|(n, p)| {
                    let psi = match &unitary {
                        Some(u) => u.column(n).into_owned(),
                        None => {
                            let mut e = DVector::zeros(d);
                            e[n] = Complex64::new(1.0, 0.0);
                            e
                        }
                    };
                    (p, psi)
                })
                .collect();
            parts.push(BathStateFock {
                dims: vec![d],
                components,
            });
        }
        Self::product(parts)
    }

    /// Two-mode squeezed vacuum from the closed form
    /// `sech r Σ_n tanhⁿ r |n, n⟩`.
    pub fn two_mode_squeezed_vacuum(dims: Vec<usize>, r: f64) -> Result<Self> {
        check_dims(&dims)?;
        if dims.len() != 2 {
            return Err(Error::dimension("two-mode squeezing needs exactly 2 modes"));
        }
        if !r.is_finite() {
            return Err(Error::validation("squeezing parameter must be finite"));
        }
        let total = dims[0] * dims[1];
        let mut psi = DVector::zeros(total);
        let mut amp = 1.0 / r.cosh();
        let th = r.tanh();
        for n in 0..dims[0].min(dims[1]) {
            psi[n + dims[0] * n] = Complex64::new(amp, 0.0);
            amp *= th;
        }
        Ok(BathStateFock {
            dims,
            components: vec![(1.0, psi)],
        })
    }

    /// Tensor product of independent bath states; earlier parts occupy the
    /// faster-varying (lower) mode indices.
    pub fn product(parts: Vec<BathStateFock>) -> Result<Self> {
        let mut iter = parts.into_iter();
        let mut acc = iter
            .next()
            .ok_or_else(|| Error::validation("need at least one mode"))?;
        for part in iter {
            let a_dim: usize = acc.dims.iter().product();
            let b_dim: usize = part.dims.iter().product();
            let count = acc.components.len() * part.components.len();
            if count > MAX_BATH_COMPONENTS {
                return Err(Error::capacity(format!(
                    "bath mixture expands into {count} components (cap {MAX_BATH_COMPONENTS})"
                )));
            }
            let mut components = Vec::with_capacity(count);
            for (wb, pb) in &part.components {
                for (wa, pa) in &acc.components {
                    let mut psi = DVector::zeros(a_dim * b_dim);
                    for ib in 0..b_dim {
                        if pb[ib] == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        for ia in 0..a_dim {
                            psi[ia + a_dim * ib] = pa[ia] * pb[ib];
                        }
                    }
                    components.push((wa * wb, psi));
                }
            }
            let mut dims = acc.dims;
            dims.extend_from_slice(&part.dims);
            acc = BathStateFock { dims, components };
        }
        Ok(acc)
    }

    /// Builds the Fock representation of `spec`'s bath on the given
    /// truncation. Product baths expand into per-mode ladders; a general
    /// Gaussian bath is accepted only when its covariance is diagonal (then
    /// each mode is a displaced squeezed-thermal state). Correlated
    /// covariances have no product synthesis — build the state explicitly
    /// and compare measured moments instead.
    pub fn synthesize(spec: &SystemSpec, trunc: &FockTruncation) -> Result<Self> {
        Self::synthesize_with_tail(spec, trunc, DEFAULT_THERMAL_TAIL)
    }

    pub fn synthesize_with_tail(
        spec: &SystemSpec,
        trunc: &FockTruncation,
        tail: f64,
    ) -> Result<Self> {
        if trunc.modes() != spec.modes() {
            return Err(Error::dimension(format!(
                "truncation has {} modes but the bath has {}",
                trunc.modes(),
                spec.modes()
            )));
        }
        let dims = trunc.levels().to_vec();
        match spec.bath().state() {
            GaussianState::ProductSqueezed { nbar, z } => {
                Self::squeezed_thermal(dims, nbar, z, tail)
            }
            GaussianState::General {
                covariance,
                first_moments,
            } => {
                let kk = spec.modes();
                let scale = covariance.abs().max().max(1.0);
                for i in 0..2 * kk {
                    for j in 0..2 * kk {
                        if i != j && covariance[(i, j)].abs() > 1e-12 * scale {
                            return Err(Error::unsupported(
                                "no product synthesis for a correlated covariance \
                                 matrix; construct the Fock state explicitly",
                            ));
                        }
                    }
                }
                let sqrt2 = std::f64::consts::SQRT_2;
                let mut alphas = Vec::with_capacity(kk);
                let mut zs = Vec::with_capacity(kk);
                let mut nbars = Vec::with_capacity(kk);
                for k in 0..kk {
                    let a = covariance[(2 * k, 2 * k)];
                    let b = covariance[(2 * k + 1, 2 * k + 1)];
                    let nu = (a * b).sqrt().max(0.5);
                    nbars.push(nu - 0.5);
                    zs.push(0.25 * (a / b).ln());
                    alphas.push(Complex64::new(
                        first_moments[2 * k] / sqrt2,
                        first_moments[2 * k + 1] / sqrt2,
                    ));
                }
                Self::displaced_squeezed_thermal(dims, &alphas, &zs, &nbars, tail)
            }
        }
    }

    /// Phase-space first moments and covariance measured directly from the
    /// Fock representation via the ladder operators (no Gaussian formulas).
    pub fn measured_moments(&self) -> (DVector<f64>, DMatrix<f64>) {
        weighted_moments(&self.dims, self.components.iter().map(|(w, p)| (*w, p)))
    }
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::validation("need at least one mode"));
    }
    if dims.iter().any(|d| *d < 2) {
        return Err(Error::validation(
            "each mode needs at least two Fock levels",
        ));
    }
    Ok(())
}

/// Boltzmann weights `p_n = (n̄/(n̄+1))ⁿ/(n̄+1)` kept until the cumulative
/// mass reaches `1 − tail` (or the ladder ends).
fn thermal_weights(nbar: f64, tail: f64, max_levels: usize) -> Vec<f64> {
    if nbar == 0.0 {
        return vec![1.0];
    }
    let ratio = nbar / (nbar + 1.0);
    let mut p = 1.0 / (nbar + 1.0);
    let mut kept = Vec::new();
    let mut cumulative = 0.0;
    for _ in 0..max_levels {
        kept.push(p);
        cumulative += p;
        if cumulative >= 1.0 - tail {
            break;
        }
        p *= ratio;
    }
    kept
}

/// Apply `q_k = (b_k + b_k†)/√2` and `p_k = i(b_k† − b_k)/√2` to `psi`.
fn apply_quadratures(
    dims: &[usize],
    stride: &[usize],
    k: usize,
    psi: &DVector<Complex64>,
) -> (DVector<Complex64>, DVector<Complex64>) {
    let total = psi.len();
    let s = stride[k];
    let d = dims[k];
    let mut lower = DVector::zeros(total); // b ψ
    let mut raise = DVector::zeros(total); // b† ψ
    for idx in 0..total {
        let amp = psi[idx];
        if amp == Complex64::new(0.0, 0.0) {
            continue;
        }
        let n = (idx / s) % d;
        if n > 0 {
            lower[idx - s] += amp * (n as f64).sqrt();
        }
        if n + 1 < d {
            raise[idx + s] += amp * ((n + 1) as f64).sqrt();
        }
    }
    let inv = 1.0 / std::f64::consts::SQRT_2;
    let q = (&lower + &raise) * Complex64::new(inv, 0.0);
    let p = (&raise - &lower) * Complex64::new(0.0, inv);
    (q, p)
}

/// Moments of a weighted family of Fock vectors (weights need not sum to 1
/// exactly — truncation deficits simply propagate).
fn weighted_moments<'a>(
    dims: &[usize],
    states: impl Iterator<Item = (f64, &'a DVector<Complex64>)>,
) -> (DVector<f64>, DMatrix<f64>) {
    let kk = dims.len();
    let d = 2 * kk;
    let stride = strides(dims);
    let mut mean = DVector::zeros(d);
    let mut second = DMatrix::zeros(d, d);
    for (w, psi) in states {
        let mut quads = Vec::with_capacity(d);
        for k in 0..kk {
            let (q, p) = apply_quadratures(dims, &stride, k, psi);
            quads.push(q);
            quads.push(p);
        }
        for i in 0..d {
            mean[i] += w * psi.dotc(&quads[i]).re;
            for j in 0..d {
                second[(i, j)] += w * quads[i].dotc(&quads[j]).re;
            }
        }
    }
    let cm = &second - &mean * mean.transpose();
    (mean, cm)
}

/// Matrix exponential by Taylor series with scaling and squaring.
fn expm(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = m.nrows();
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 {
        (norm1 / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = Complex64::new((2.0f64).powi(squarings as i32), 0.0);
    let a = m.map(|x| x / scale);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    let mut sum = DMatrix::<Complex64>::identity(n, n);
    for j in 1..=48u32 {
        term = (&term * &a) / Complex64::new(f64::from(j), 0.0);
        sum += &term;
        if term.map(|x| x.norm()).max() < 1e-18 {
            break;
        }
    }
    let mut result = sum;
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

// ---------------------------------------------------------------------------
// Joint Hamiltonian and evolution
// ---------------------------------------------------------------------------

/// Dense σ-blocks `V(σ) = Σ_k ω_k b_k†b_k + f_k(σ)(b_k + b_k†)` of the joint
/// Hamiltonian, indexed by basis index. Each block is real symmetric by
/// construction; the full joint Hamiltonian is their block-diagonal sum.
pub fn build_hamiltonian(spec: &SystemSpec, trunc: &FockTruncation) -> Result<Vec<DMatrix<f64>>> {
    if spec.n_qubits() > MAX_DENSE_QUBITS {
        return Err(Error::capacity(format!(
            "reference dynamics needs N ≤ {MAX_DENSE_QUBITS}, got {}",
            spec.n_qubits()
        )));
    }
    if trunc.modes() != spec.modes() {
        return Err(Error::dimension(format!(
            "truncation has {} modes but the bath has {}",
            trunc.modes(),
            spec.modes()
        )));
    }
    let bdim = trunc.total_dim();
    if bdim > MAX_BLOCK_DIM {
        return Err(Error::capacity(format!(
            "dense σ-block dimension {bdim} exceeds {MAX_BLOCK_DIM}"
        )));
    }
    let dims = trunc.levels();
    let stride = strides(dims);
    let kk = spec.modes();
    let basis = enumerate_basis(spec.n_qubits())?;
    let mut blocks = Vec::with_capacity(basis.len());
    for sigma in &basis {
        let f: Vec<f64> = (0..kk).map(|k| spec.coupling_value(k, sigma)).collect();
        let mut h = DMatrix::zeros(bdim, bdim);
        for idx in 0..bdim {
            let mut diag = 0.0;
            for k in 0..kk {
                let n = (idx / stride[k]) % dims[k];
                diag += spec.bath().omega_k(k) * n as f64;
                if n + 1 < dims[k] && f[k] != 0.0 {
                    let v = f[k] * ((n + 1) as f64).sqrt();
                    h[(idx, idx + stride[k])] = v;
                    h[(idx + stride[k], idx)] = v;
                }
            }
            h[(idx, idx)] = diag;
        }
        debug_assert!(
            (&h - h.transpose()).abs().max() <= 1e-13,
            "σ-block must be symmetric"
        );
        blocks.push(h);
    }
    Ok(blocks)
}

struct EigBlock {
    eigenvalues: DVector<f64>,
    u: DMatrix<f64>,
}

/// Prepared exact evolution: eigendecomposed σ-blocks plus the initial joint
/// state `ρ_S(0) ⊗ ρ_B(0)` in the eigenbases.
pub struct JointEvolution {
    n_qubits: usize,
    dims: Vec<usize>,
    blocks: Vec<EigBlock>,
    hs_energies: Option<Vec<f64>>,
    rho0: DensityMatrix,
    weights: Vec<f64>,
    /// `coeffs[σ][w] = Uᵀ φ_w` — component `w` of the bath in block `σ`'s
    /// eigenbasis.
    coeffs: Vec<Vec<DVector<Complex64>>>,
    /// Flattened indices with any mode on its top rung.
    top_rung: Vec<bool>,
    norm_deficit: f64,
}

fn real_mul_complex(
    u: &DMatrix<f64>,
    v: &DVector<Complex64>,
    transpose: bool,
) -> DVector<Complex64> {
    let re = v.map(|x| x.re);
    let im = v.map(|x| x.im);
    let (rre, rim) = if transpose {
        (u.tr_mul(&re), u.tr_mul(&im))
    } else {
        (u * re, u * im)
    };
    DVector::from_fn(v.len(), |i, _| Complex64::new(rre[i], rim[i]))
}

impl JointEvolution {
    /// Diagonalizes every σ-block and projects the bath components into each
    /// eigenbasis. `bath` must live on the truncation's ladder.
    pub fn new(
        spec: &SystemSpec,
        trunc: &FockTruncation,
        rho0: &DensityMatrix,
        bath: BathStateFock,
    ) -> Result<Self> {
        if rho0.dim() != spec.dim() {
            return Err(Error::dimension(format!(
                "state is for {} qubits but the model has {}",
                rho0.n_qubits(),
                spec.n_qubits()
            )));
        }
        if bath.dims() != trunc.levels() {
            return Err(Error::dimension(
                "bath state does not live on the truncation's ladder",
            ));
        }
        let hams = build_hamiltonian(spec, trunc)?;
        let norm_deficit = bath.norm_deficit();
        let weights: Vec<f64> = bath.components().iter().map(|(w, _)| *w).collect();
        let mut blocks = Vec::with_capacity(hams.len());
        let mut coeffs = Vec::with_capacity(hams.len());
        for h in hams {
            let eig = h.symmetric_eigen();
            let per_component: Vec<DVector<Complex64>> = bath
                .components()
                .iter()
                .map(|(_, phi)| real_mul_complex(&eig.eigenvectors, phi, true))
                .collect();
            coeffs.push(per_component);
            blocks.push(EigBlock {
                eigenvalues: eig.eigenvalues,
                u: eig.eigenvectors,
            });
        }
        let dims = trunc.levels().to_vec();
        let stride = strides(&dims);
        let bdim = trunc.total_dim();
        let top_rung = (0..bdim)
            .map(|idx| (0..dims.len()).any(|k| (idx / stride[k]) % dims[k] == dims[k] - 1))
            .collect();
        Ok(JointEvolution {
            n_qubits: spec.n_qubits(),
            dims,
            blocks,
            hs_energies: spec.hs_energies().map(<[f64]>::to_vec),
            rho0: rho0.clone(),
            weights,
            coeffs,
            top_rung,
            norm_deficit,
        })
    }

    /// Probability mass the initial bath lost to truncation.
    pub fn initial_norm_deficit(&self) -> f64 {
        self.norm_deficit
    }

    /// Evolves every bath component in every σ-block to time `t`:
    /// `ψ^σ_w(t) = e^{−iE(σ)t} U e^{−iΛt} Uᵀ φ_w`.
    pub fn evolve(&self, t: f64) -> JointState<'_> {
        let evolved = self
            .blocks
            .iter()
            .enumerate()
            .map(|(b, block)| {
                let phases: Vec<Complex64> = block
                    .eigenvalues
                    .iter()
                    .map(|l| Complex64::new(0.0, -l * t).exp())
                    .collect();
                let global = match &self.hs_energies {
                    Some(e) => Complex64::new(0.0, -e[b] * t).exp(),
                    None => Complex64::new(1.0, 0.0),
                };
                self.coeffs[b]
                    .iter()
                    .map(|c| {
                        let rotated = DVector::from_fn(c.len(), |m, _| c[m] * phases[m]);
                        real_mul_complex(&block.u, &rotated, false) * global
                    })
                    .collect()
            })
            .collect();
        JointState {
            evo: self,
            t,
            evolved,
        }
    }
}

/// The exactly evolved joint state at one time.
pub struct JointState<'a> {
    evo: &'a JointEvolution,
    t: f64,
    /// `evolved[σ][w] = ψ^σ_w(t)`.
    evolved: Vec<Vec<DVector<Complex64>>>,
}

impl JointState<'_> {
    pub fn time(&self) -> f64 {
        self.t
    }

    /// Reduced register state:
    /// `ρ_S(t)[i,j] = ρ_S(0)[i,j] Σ_w w ⟨ψ^j_w(t)|ψ^i_w(t)⟩`.
    pub fn reduced_spin(&self) -> DensityMatrix {
        let dim = 1usize << self.evo.n_qubits;
        let rho0 = self.evo.rho0.matrix();
        let mut out = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                if rho0[(i, j)] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let overlap: Complex64 = self
                    .evo
                    .weights
                    .iter()
                    .enumerate()
                    .map(|(w, weight)| self.evolved[j][w].dotc(&self.evolved[i][w]) * *weight)
                    .sum();
                out[(i, j)] = rho0[(i, j)] * overlap;
            }
        }
        DensityMatrix::from_reduction(self.evo.n_qubits, out)
    }

    /// Bath moments of the reduced bath state
    /// `ρ_B(t) = Σ_i ⟨i|ρ_S(0)|i⟩ Σ_w w |ψ^i_w⟩⟨ψ^i_w|`, measured with
    /// ladder operators.
    pub fn bath_moments(&self) -> (DVector<f64>, DMatrix<f64>) {
        let dim = 1usize << self.evo.n_qubits;
        let rho0 = self.evo.rho0.matrix();
        let states = (0..dim).flat_map(|i| {
            let pop = rho0[(i, i)].re;
            self.evo
                .weights
                .iter()
                .enumerate()
                .map(move |(w, weight)| (pop * weight, &self.evolved[i][w]))
        });
        weighted_moments(&self.evo.dims, states)
    }

    /// Worst top-rung population over every block and component — the
    /// truncation-quality measure.
    pub fn leakage(&self) -> f64 {
        let mut worst = 0.0f64;
        for per_block in &self.evolved {
            for psi in per_block {
                let leak: f64 = psi
                    .iter()
                    .zip(&self.evo.top_rung)
                    .filter(|(_, top)| **top)
                    .map(|(a, _)| a.norm_sqr())
                    .sum();
                worst = worst.max(leak);
            }
        }
        worst
    }

    /// Trace of the joint state (1 up to truncation deficit).
    pub fn joint_trace(&self) -> f64 {
        let dim = 1usize << self.evo.n_qubits;
        let rho0 = self.evo.rho0.matrix();
        (0..dim)
            .map(|i| {
                let pop = rho0[(i, i)].re;
                let bath: f64 = self
                    .evo
                    .weights
                    .iter()
                    .enumerate()
                    .map(|(w, weight)| weight * self.evolved[i][w].norm_squared())
                    .sum();
                pop * bath
            })
            .sum()
    }

    /// Purity of the joint state. Exactly conserved by the block-unitary
    /// evolution, so any drift measures numerical error, not physics.
    pub fn joint_purity(&self) -> f64 {
        let dim = 1usize << self.evo.n_qubits;
        let nw = self.evo.weights.len();
        let rho0 = self.evo.rho0.matrix();
        // per block: weighted Gram matrix O^i_{wv} = ⟨ψ^i_w|ψ^i_v⟩
        let grams: Vec<DMatrix<Complex64>> = (0..dim)
            .map(|i| DMatrix::from_fn(nw, nw, |w, v| self.evolved[i][w].dotc(&self.evolved[i][v])))
            .collect();
        let mut purity = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let r2 = rho0[(i, j)].norm_sqr();
                if r2 == 0.0 {
                    continue;
                }
                let mut tr = Complex64::new(0.0, 0.0);
                for w in 0..nw {
                    for v in 0..nw {
                        tr += self.evo.weights[w]
                            * self.evo.weights[v]
                            * grams[j][(w, v)]
                            * grams[i][(v, w)];
                    }
                }
                purity += r2 * tr.re;
            }
        }
        purity
    }
}

/// One-shot reference evolution: synthesizes the bath, runs the exact joint
/// dynamics, and returns the reduced register state at `t`.
pub fn evolve_exact(
    spec: &SystemSpec,
    trunc: &FockTruncation,
    rho0: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix> {
    let bath = BathStateFock::synthesize(spec, trunc)?;
    let evo = JointEvolution::new(spec, trunc, rho0, bath)?;
    Ok(evo.evolve(t).reduced_spin())
}

// ---------------------------------------------------------------------------
// Comparison reports
// ---------------------------------------------------------------------------

/// One time point of an engine-versus-reference comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub t: f64,
    /// Trace distance between the closed-form register state and the
    /// reference reduction.
    pub trace_distance: f64,
    /// Largest absolute deviation of the bath first moments.
    pub bath_mean_dev: f64,
    /// Largest absolute deviation of the bath covariance matrix.
    pub bath_cm_dev: f64,
    /// Worst top-rung population at this time.
    pub leakage: f64,
}

/// Machine-readable outcome of [`compare`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<CompareRow>,
    pub max_trace_distance: f64,
    pub max_leakage: f64,
    pub warnings: Vec<String>,
}

impl ComparisonReport {
    /// True when every register comparison is within `tol` and no truncation
    /// warning fired.
    pub fn passed(&self, tol: f64) -> bool {
        self.max_trace_distance <= tol && self.warnings.is_empty()
    }
}

/// Runs the closed-form engine and the Fock reference side by side over a
/// time grid, comparing the register state and the bath moments at every
/// point.
pub fn compare(
    spec: &SystemSpec,
    trunc: &FockTruncation,
    rho0: &DensityMatrix,
    ts: &[f64],
) -> Result<ComparisonReport> {
    let bath = BathStateFock::synthesize(spec, trunc)?;
    let evo = JointEvolution::new(spec, trunc, rho0, bath)?;
    let mut rows = Vec::with_capacity(ts.len());
    let mut max_td = 0.0f64;
    let mut max_leak = 0.0f64;
    for &t in ts {
        let joint = evo.evolve(t);
        let reference = joint.reduced_spin();
        let engine = apply_map(spec, rho0, t)?;
        let trace_distance = engine.trace_distance(&reference)?;
        let (mean_ref, cm_ref) = joint.bath_moments();
        let mixture = boson_state(spec, rho0, t)?;
        let (mean_eng, cm_eng) = mixture_moments(&mixture);
        let bath_mean_dev = (&mean_ref - &mean_eng).abs().max();
        let bath_cm_dev = (&cm_ref - &cm_eng).abs().max();
        let leakage = joint.leakage();
        max_td = max_td.max(trace_distance);
        max_leak = max_leak.max(leakage);
        rows.push(CompareRow {
            t,
            trace_distance,
            bath_mean_dev,
            bath_cm_dev,
            leakage,
        });
    }
    let mut warnings = Vec::new();
    if evo.initial_norm_deficit() > trunc.leakage_threshold() {
        warnings.push(format!(
            "initial bath truncation dropped {:.3e} probability mass",
            evo.initial_norm_deficit()
        ));
    }
    if max_leak > trunc.leakage_threshold() {
        warnings.push(format!(
            "top-rung population reached {max_leak:.3e}; increase the Fock ladder"
        ));
    }
    Ok(ComparisonReport {
        rows,
        max_trace_distance: max_td,
        max_leakage: max_leak,
        warnings,
    })
}
