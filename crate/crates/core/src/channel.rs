// Copyright 2026 Dephase Contributors
// SPDX-License-Identifier: MIT

//! The exact dephasing channel on the qubit register.
//!
//! [`apply_map`] evolves a [`DensityMatrix`] element-by-element:
//! `⟨σ|ρ(t)|σ′⟩ = ⟨σ|ρ(0)|σ′⟩ · e^{iφ(σ,σ′,t)} e^{−Γ(σ,σ′,t)}`, with the
//! phase `φ` collecting the bath-induced shifts `W`, `W̃` and (when
//! configured) the system energies, and `Γ ≥ 0` the damping exponent.
//! Populations are untouched — the map is exactly trace preserving and
//! completely positive (the damping kernel is a Gaussian characteristic
//! function, so the element-wise factor matrix is positive semidefinite and
//! the Schur product with `ρ` stays a state).
//!
//! Coherence bookkeeping lives here too: [`coherence_sectors`] groups matrix
//! elements by the magnetization difference `ΔM = M(σ_col) − M(σ_row)`, and
//! [`sector_damping_profile`] reports per-sector damping, collapsing to one
//! rate per sector exactly when the coupling makes that lossless.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linear::{classify_matrix, TopologyTag};
use crate::model::{
    enumerate_basis, BasisTables, BathSpec, GaussianState, SpinConfig, SystemSpec,
    MAX_DENSE_QUBITS, MAX_QUBITS,
};

/// Hermiticity tolerance accepted by [`DensityMatrix::new`].
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Trace tolerance accepted by [`DensityMatrix::new`].
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalue floor accepted by [`DensityMatrix::new`].
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

// ---------------------------------------------------------------------------
// DensityMatrix
// ---------------------------------------------------------------------------

/// A validated density matrix of an `N`-qubit register.
///
/// Invariants enforced at construction: square `2^N × 2^N` with
/// `N ≤ MAX_DENSE_QUBITS`, Hermitian to [`HERMITICITY_TOL`] (then exactly
/// symmetrized), unit trace to [`TRACE_TOL`], and spectrum above
/// [`EIGENVALUE_FLOOR`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates and wraps `matrix`. The stored matrix is exactly
    /// Hermitian (the input is symmetrized after the tolerance check).
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim == 0 || matrix.ncols() != dim {
            return Err(Error::dimension(format!(
                "density matrix must be square and non-empty, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !dim.is_power_of_two() {
            return Err(Error::dimension(format!(
                "density matrix dimension {dim} is not a power of two"
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        if n_qubits == 0 || n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::capacity(format!(
                "density matrix for {n_qubits} qubits outside 1..={MAX_DENSE_QUBITS}"
            )));
        }
        if matrix
            .iter()
            .any(|x| !x.re.is_finite() || !x.im.is_finite())
        {
            return Err(Error::validation("density matrix entries must be finite"));
        }
        let herm_dev = (&matrix - matrix.adjoint()).map(|x| x.norm()).max();
        if herm_dev > HERMITICITY_TOL {
            return Err(Error::validation(format!(
                "density matrix is not Hermitian (max deviation {herm_dev:.3e})"
            )));
        }
        let matrix = (&matrix + matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::validation(format!(
                "density matrix trace must be 1, got {} + {}i",
                trace.re, trace.im
            )));
        }
        let min_eig = min_eigenvalue_hermitian(&matrix);
        if min_eig < EIGENVALUE_FLOOR {
            return Err(Error::validation(format!(
                "density matrix has a negative eigenvalue ({min_eig:.3e})"
            )));
        }
        Ok(DensityMatrix { n_qubits, matrix })
    }

    /// Fast constructor for matrices produced by [`apply_map`] and the other
    /// in-crate engines, where positivity holds by construction. Debug builds
    /// still assert the cheap invariants.
    pub(crate) fn from_map_output(n_qubits: usize, matrix: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(matrix.nrows(), 1usize << n_qubits);
        debug_assert_eq!(matrix.ncols(), 1usize << n_qubits);
        debug_assert!(
            (&matrix - matrix.adjoint()).map(|x| x.norm()).max() <= HERMITICITY_TOL,
            "map output lost Hermiticity"
        );
        debug_assert!(
            (matrix.trace().re - 1.0).abs() <= TRACE_TOL,
            "map output lost unit trace"
        );
        DensityMatrix { n_qubits, matrix }
    }

    /// Constructor for partial traces of exactly-evolved joint states, where
    /// positivity holds by construction but norms carry the (tracked)
    /// truncation and eigensolver error, so the tolerances are looser than
    /// the map's.
    pub(crate) fn from_reduction(n_qubits: usize, matrix: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(matrix.nrows(), 1usize << n_qubits);
        debug_assert!(
            (&matrix - matrix.adjoint()).map(|x| x.norm()).max() <= 1e-10,
            "reduction lost Hermiticity"
        );
        debug_assert!(
            (matrix.trace().re - 1.0).abs() <= 1e-8,
            "reduction lost unit trace beyond truncation error"
        );
        DensityMatrix { n_qubits, matrix }
    }

    /// Pure state `|ψ⟩⟨ψ|`. The vector must be normalized to `1e−12`.
    pub fn from_pure(psi: &DVector<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::validation(format!(
                "state vector must be normalized, got ‖ψ‖ = {norm}"
            )));
        }
        let dim = psi.len();
        let matrix = DMatrix::from_fn(dim, dim, |i, j| psi[i] * psi[j].conj());
        Self::new(matrix)
    }

    /// GHZ state `(|0…0⟩ + |1…1⟩)/√2`.
    pub fn ghz(n_qubits: usize) -> Result<Self> {
        check_dense(n_qubits)?;
        let dim = 1usize << n_qubits;
        let h = Complex64::new(0.5, 0.0);
        let mut m = DMatrix::zeros(dim, dim);
        m[(0, 0)] = h;
        m[(0, dim - 1)] = h;
        m[(dim - 1, 0)] = h;
        m[(dim - 1, dim - 1)] = h;
        Ok(DensityMatrix {
            n_qubits,
            matrix: m,
        })
    }

    /// Product of `|+⟩` on every qubit: all entries `2^{−N}`.
    pub fn plus_product(n_qubits: usize) -> Result<Self> {
        check_dense(n_qubits)?;
        let dim = 1usize << n_qubits;
        let v = Complex64::new(1.0 / dim as f64, 0.0);
        Ok(DensityMatrix {
            n_qubits,
            matrix: DMatrix::from_element(dim, dim, v),
        })
    }

    /// Computational-basis state `|index⟩⟨index|`.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        check_dense(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::validation(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut m = DMatrix::zeros(dim, dim);
        m[(index, index)] = Complex64::new(1.0, 0.0);
        Ok(DensityMatrix {
            n_qubits,
            matrix: m,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Element `⟨i|ρ|j⟩`.
    pub fn element(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    /// `Tr ρ² = Σ_{ij} |ρ_{ij}|²` (Hermitian shortcut).
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|x| x.norm_sqr()).sum()
    }

    /// Trace distance `½‖ρ − ρ′‖₁` via the spectrum of the Hermitian
    /// difference.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::dimension(format!(
                "trace distance needs equal dimensions, got {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        let diff = &self.matrix - &other.matrix;
        let eig = diff.symmetric_eigen();
        Ok(0.5 * eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
    }

    /// `ρ_self ⊗ ρ_other` with `self` occupying qubits `0..n_self` (the low
    /// bits of the combined index) and `other` the remaining high bits.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_DENSE_QUBITS {
            return Err(Error::capacity(format!(
                "tensor product would span {n} qubits (> {MAX_DENSE_QUBITS})"
            )));
        }
        // the second Kronecker factor owns the low bits of the joint index
        let matrix = other.matrix.kronecker(&self.matrix);
        Ok(DensityMatrix {
            n_qubits: n,
            matrix,
        })
    }

    /// Re-checks every construction invariant on the stored matrix.
    pub fn validate(&self) -> Result<()> {
        Self::new(self.matrix.clone()).map(|_| ())
    }
}

fn check_dense(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_DENSE_QUBITS {
        return Err(Error::capacity(format!(
            "qubit count {n_qubits} outside 1..={MAX_DENSE_QUBITS}"
        )));
    }
    Ok(())
}

/// Smallest eigenvalue of a Hermitian matrix. Dense eigensolve for small
/// dimensions; a shifted Cholesky probe (pass iff `λ_min ≥` floor) above,
/// where the cubic eigensolve would dominate runtime.
fn min_eigenvalue_hermitian(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() <= 1024 {
        let eig = m.clone().symmetric_eigen();
        eig.eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    } else {
        let dim = m.nrows();
        let shifted =
            m + DMatrix::<Complex64>::identity(dim, dim) * Complex64::new(-EIGENVALUE_FLOOR, 0.0);
        if shifted.cholesky().is_some() {
            // PSD within the floor: report the floor itself (callers only
            // compare against it)
            EIGENVALUE_FLOOR
        } else {
            f64::NEG_INFINITY
        }
    }
}

// ---------------------------------------------------------------------------
// Damping kernel / phase tables (shared by the map and the sector profile)
// ---------------------------------------------------------------------------

/// Per-time damping data: `Γ(σ_i, σ_j)` from the per-basis coupling tables.
pub(crate) enum DampingKernel {
    /// Product bath: `Γ = Σ_k Δf_k² g_k`.
    Product { g: Vec<f64> },
    /// General Gaussian bath: `Γ = Σ_{kl} Δf_k Δf_l G_{kl}`.
    General { gmat: DMatrix<f64> },
}

impl DampingKernel {
    pub(crate) fn build(bath: &BathSpec, t: f64) -> Self {
        let kk = bath.modes();
        match bath.state() {
            GaussianState::ProductSqueezed { nbar, z } => {
                let g = (0..kk)
                    .map(|k| {
                        let omega = bath.omega_k(k);
                        let c = (omega * t).cos();
                        let s = (omega * t).sin();
                        let coth = 2.0 * nbar[k] + 1.0;
                        coth / (2.0 * omega * omega)
                            * ((1.0 - c) * (1.0 - c) * (-2.0 * z[k]).exp()
                                + s * s * (2.0 * z[k]).exp())
                    })
                    .collect();
                DampingKernel::Product { g }
            }
            GaussianState::General { covariance, .. } => {
                // the contraction uses the symplectically rotated displacement
                // Ω r, whose mode-k block is Δf_k (u_k, v_k) with
                // (u, v) = (√2/ω)(sin ωt, 1 − cos ωt); fold Θ into a K×K form
                let sqrt2 = std::f64::consts::SQRT_2;
                let uv: Vec<(f64, f64)> = (0..kk)
                    .map(|k| {
                        let omega = bath.omega_k(k);
                        let a = sqrt2 / omega;
                        (a * (omega * t).sin(), a * (1.0 - (omega * t).cos()))
                    })
                    .collect();
                let gmat = DMatrix::from_fn(kk, kk, |k, l| {
                    let (uk, vk) = uv[k];
                    let (ul, vl) = uv[l];
                    0.5 * (uk * ul * covariance[(2 * k, 2 * l)]
                        + uk * vl * covariance[(2 * k, 2 * l + 1)]
                        + vk * ul * covariance[(2 * k + 1, 2 * l)]
                        + vk * vl * covariance[(2 * k + 1, 2 * l + 1)])
                });
                DampingKernel::General { gmat }
            }
        }
    }

    /// `Γ(σ_i, σ_j)` given the per-basis coupling tables `f[k][b]`.
    pub(crate) fn gamma(&self, f: &[Vec<f64>], i: usize, j: usize) -> f64 {
        match self {
            DampingKernel::Product { g } => g
                .iter()
                .enumerate()
                .map(|(k, gk)| {
                    let df = f[k][j] - f[k][i];
                    df * df * gk
                })
                .sum(),
            DampingKernel::General { gmat } => {
                let kk = gmat.nrows();
                let mut total = 0.0;
                for k in 0..kk {
                    let dfk = f[k][j] - f[k][i];
                    if dfk == 0.0 {
                        continue;
                    }
                    for l in 0..kk {
                        let dfl = f[l][j] - f[l][i];
                        total += dfk * dfl * gmat[(k, l)];
                    }
                }
                total
            }
        }
    }
}

/// Per-basis phase tables `(W_t(σ_b), W̃_t(σ_b))`.
fn phase_tables(spec: &SystemSpec, tables: &BasisTables, t: f64) -> (Vec<f64>, Vec<f64>) {
    let dim = tables.dim;
    let kk = spec.modes();
    let mut w = vec![0.0; dim];
    for k in 0..kk {
        let omega = spec.bath().omega_k(k);
        let geom = (omega * t).sin() - omega * t;
        let inv2 = 1.0 / (omega * omega);
        for (wb, &f) in w.iter_mut().zip(&tables.f[k]) {
            *wb += f * f * inv2 * geom;
        }
    }
    let mut wt = vec![0.0; dim];
    if let GaussianState::General { .. } = spec.bath().state() {
        let sqrt2 = std::f64::consts::SQRT_2;
        for k in 0..kk {
            let omega = spec.bath().omega_k(k);
            let (qbar, pbar) = spec.bath().first_moments_mode(k);
            let geom = qbar * (omega * t).sin() + pbar * (1.0 - (omega * t).cos());
            let a = sqrt2 / omega * geom;
            for (wtb, &f) in wt.iter_mut().zip(&tables.f[k]) {
                *wtb += a * f;
            }
        }
    }
    (w, wt)
}

// ---------------------------------------------------------------------------
// The map
// ---------------------------------------------------------------------------

/// Evolves `ρ(0) → ρ(t)` under the exact dephasing channel.
///
/// Element-wise: populations are copied bit-for-bit; the element `(i, j)`
/// picks up `e^{−Γ(σ_i,σ_j,t)}` and the phase
/// `[W+W̃](σ_j) − [W+W̃](σ_i) − [E(σ_i) − E(σ_j)]t`.
///
/// Errors if the register is larger than [`MAX_DENSE_QUBITS`] or the state
/// dimension does not match the register size.
pub fn apply_map(spec: &SystemSpec, rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    if !t.is_finite() {
        return Err(Error::validation("evolution time must be finite"));
    }
    let tables = BasisTables::build(spec)?;
    let dim = tables.dim;
    if rho.dim() != dim {
        return Err(Error::dimension(format!(
            "state is for {} qubits but the model has {}",
            rho.n_qubits(),
            spec.n_qubits()
        )));
    }
    let kernel = DampingKernel::build(spec.bath(), t);
    let (w, wt) = phase_tables(spec, &tables, t);
    let energies = spec.hs_energies();

    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    data.par_chunks_mut(dim).enumerate().for_each(|(i, row)| {
        for (j, out) in row.iter_mut().enumerate() {
            let rij = rho.matrix[(i, j)];
            if i == j {
                *out = rij;
                continue;
            }
            let gamma = kernel.gamma(&tables.f, i, j);
            let mut phi = (w[j] - w[i]) + (wt[j] - wt[i]);
            if let Some(e) = energies {
                phi -= (e[i] - e[j]) * t;
            }
            *out = rij * Complex64::from_polar((-gamma).exp(), phi);
        }
    });
    let matrix = DMatrix::from_fn(dim, dim, |r, c| data[r * dim + c]);
    Ok(DensityMatrix::from_map_output(spec.n_qubits(), matrix))
}

/// Diagonal of the bath-induced phase generator at time `t`: entry `b` is
/// `W_t(σ_b) + W̃_t(σ_b)`. The element `(i, j)` of the map's phase is the
/// difference `action[j] − action[i]` (system energies excluded).
pub fn lamb_hamiltonian_action(spec: &SystemSpec, t: f64) -> Result<DVector<f64>> {
    let tables = BasisTables::build(spec)?;
    let (w, wt) = phase_tables(spec, &tables, t);
    Ok(DVector::from_iterator(
        tables.dim,
        w.iter().zip(&wt).map(|(a, b)| a + b),
    ))
}

// ---------------------------------------------------------------------------
// Coherence sectors
// ---------------------------------------------------------------------------

/// All matrix elements `(row, col)` whose magnetization difference
/// `ΔM = M(σ_col) − M(σ_row)` equals `delta_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherenceSector {
    pub delta_m: i64,
    pub elements: Vec<(usize, usize)>,
}

/// Partitions the `4^N` matrix elements by `ΔM`, ascending from `−2N` to
/// `2N` in steps of two. Sector `ΔM = 0` contains every diagonal element
/// (plus any equal-magnetization coherences).
pub fn coherence_sectors(n_qubits: usize) -> Result<Vec<CoherenceSector>> {
    check_dense(n_qubits)?;
    let basis = enumerate_basis(n_qubits)?;
    let m: Vec<i64> = basis.iter().map(SpinConfig::magnetization).collect();
    let n = n_qubits as i64;
    let mut sectors: Vec<CoherenceSector> = (-n..=n)
        .map(|h| CoherenceSector {
            delta_m: 2 * h,
            elements: Vec::new(),
        })
        .collect();
    let dim = 1usize << n_qubits;
    for row in 0..dim {
        for col in 0..dim {
            let dm = m[col] - m[row];
            let idx = ((dm + 2 * n) / 2) as usize;
            sectors[idx].elements.push((row, col));
        }
    }
    Ok(sectors)
}

/// Per-sector damping at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub enum SectorDampingProfile {
    /// One exact rate per sector, `(ΔM, Γ)`, ascending in `ΔM`. Returned
    /// exactly when every element of a sector damps identically: linear
    /// coupling with identical columns (all qubits equivalent to every mode)
    /// and an unsqueezed thermal product bath, where `Γ = Γ₁(t)·ΔM²`.
    Collapsed(Vec<(i64, f64)>),
    /// Otherwise, each upper-triangle element `(row, col, ΔM, Γ)`.
    PerPair(Vec<(usize, usize, i64, f64)>),
}

/// Computes the damping of every coherence at time `t`, collapsed to one
/// value per `ΔM` sector when that is exact, and per-pair otherwise.
pub fn sector_damping_profile(spec: &SystemSpec, t: f64) -> Result<SectorDampingProfile> {
    let tables = BasisTables::build(spec)?;
    let collapsible = spec.bath().is_thermal_product()
        && spec
            .coupling()
            .as_linear()
            .is_some_and(|l| classify_matrix(l) == TopologyTag::FullyConnected);
    if collapsible {
        let lambda = spec.coupling().as_linear().expect("checked linear above");
        // identical columns: Δf_k = λ_k·ΔM, so Γ = ΔM² Σ_k (λ_k²/ω_k²)coth(1−cos)
        let unit: f64 = (0..spec.modes())
            .map(|k| {
                let omega = spec.bath().omega_k(k);
                let lam = lambda[(k, 0)];
                (lam * lam) / (omega * omega)
                    * spec.bath().coth_factor(k)
                    * (1.0 - (omega * t).cos())
            })
            .sum();
        let n = spec.n_qubits() as i64;
        let sectors = (-n..=n)
            .map(|h| {
                let dm = 2 * h;
                (dm, unit * (dm * dm) as f64)
            })
            .collect();
        return Ok(SectorDampingProfile::Collapsed(sectors));
    }
    let kernel = DampingKernel::build(spec.bath(), t);
    let basis = enumerate_basis(spec.n_qubits())?;
    let m: Vec<i64> = basis.iter().map(SpinConfig::magnetization).collect();
    let dim = tables.dim;
    let mut pairs = Vec::with_capacity(dim * (dim - 1) / 2);
    for i in 0..dim {
        for j in (i + 1)..dim {
            pairs.push((i, j, m[j] - m[i], kernel.gamma(&tables.f, i, j)));
        }
    }
    Ok(SectorDampingProfile::PerPair(pairs))
}

/// Total coherence weight `Σ |ρ_{ij}|` per sector, ascending in `ΔM` —
/// a compact summary of where a state keeps its coherent content.
pub fn sector_aggregates(rho: &DensityMatrix) -> Result<Vec<(i64, f64)>> {
    let sectors = coherence_sectors(rho.n_qubits())?;
    Ok(sectors
        .iter()
        .map(|s| {
            let total: f64 = s
                .elements
                .iter()
                .map(|(i, j)| rho.element(*i, *j).norm())
                .sum();
            (s.delta_m, total)
        })
        .collect())
}

/// Largest register the per-element engine accepts (re-exported cap).
pub const MAX_MAP_QUBITS: usize = MAX_DENSE_QUBITS;

const _: () = assert!(MAX_DENSE_QUBITS <= MAX_QUBITS);
