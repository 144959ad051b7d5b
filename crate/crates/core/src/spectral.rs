// Copyright 2026 Dephase Contributors
// SPDX-License-Identifier: MIT

//! Continuum baths: spectral densities, their exponent integrals, and
//! discretization into finitely many modes.
//!
//! A spectral density `J(ω) ≥ 0` replaces the discrete coupling weights:
//! `Σ_k λ_k² (…ω_k…) → ∫ J(ω) (…ω…) dω`. The two exponent kernels are
//!
//! ```text
//! W(t) = ∫ J(ω)/ω² (sin ωt − ωt) dω                       (phase)
//! Γ(t) = ∫ J(ω)/ω² coth(ω/2T) (1 − cos ωt) dω             (damping)
//! ```
//!
//! Supported families: the Ohmic class `J = η ω^s ω_c^{1−s} e^{−ω/ω_c}`
//! (`s = 1` Ohmic, `s > 1` super-, `0 < s < 1` sub-Ohmic) and tabulated data
//! interpolated by a shape-preserving monotone cubic (no extrapolation).
//! [`discretize`] maps `J` to `K` modes conserving each bin's weight
//! `λ_k² = ∫_bin J` and first moment (`ω_k` = the `J`-weighted centroid), so
//! the discrete exponents converge to the integrals as `K` grows.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::coth_half;
use crate::quadrature::{adaptive_integrate, gauss_legendre, DEFAULT_MAX_INTERVALS};

/// Default absolute tolerance of the exponent integrals.
pub const DEFAULT_INTEGRAL_TOL: f64 = 1e-9;

/// Ohmic-family support is truncated where `e^{−ω/ω_c}` is ≈ 1e−26.
const OHMIC_SUPPORT_DECADES: f64 = 60.0;
/// Upper edge of the discretization window for the Ohmic family, in units of
/// `ω_c`; beyond it `J` carries negligible weight but bins would be wasted.
const OHMIC_BIN_CUTOFF: f64 = 10.0;
/// Lower edge of logarithmic binning for the Ohmic family, in units of `ω_c`.
const OHMIC_LOG_FLOOR: f64 = 1e-6;

// ---------------------------------------------------------------------------
// Monotone cubic interpolation (Fritsch–Carlson)
// ---------------------------------------------------------------------------

/// Tabulated density with precomputed shape-preserving node slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    omega: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl TabulatedDensity {
    fn new(omega: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if omega.len() < 2 {
            return Err(Error::validation("tabulated density needs ≥ 2 points"));
        }
        if omega.len() != values.len() {
            return Err(Error::dimension(format!(
                "{} frequencies but {} values",
                omega.len(),
                values.len()
            )));
        }
        if omega.iter().any(|w| !w.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("tabulated data must be finite"));
        }
        if omega[0] <= 0.0 {
            return Err(Error::validation(
                "tabulated frequencies must start above 0 (the kernels divide by ω²)",
            ));
        }
        if omega.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::validation(
                "tabulated frequencies must be strictly increasing",
            ));
        }
        if values.iter().any(|v| *v < 0.0) {
            return Err(Error::validation("spectral density values must be ≥ 0"));
        }
        let slopes = fritsch_carlson_slopes(&omega, &values);
        Ok(TabulatedDensity {
            omega,
            values,
            slopes,
        })
    }

    fn eval(&self, w: f64) -> f64 {
        let n = self.omega.len();
        if w == self.omega[n - 1] {
            return self.values[n - 1];
        }
        let idx = self
            .omega
            .partition_point(|x| *x <= w)
            .saturating_sub(1)
            .min(n - 2);
        let (x0, x1) = (self.omega[idx], self.omega[idx + 1]);
        let (y0, y1) = (self.values[idx], self.values[idx + 1]);
        let (d0, d1) = (self.slopes[idx], self.slopes[idx + 1]);
        let h = x1 - x0;
        let s = (w - x0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        y0 * (2.0 * s3 - 3.0 * s2 + 1.0)
            + h * d0 * (s3 - 2.0 * s2 + s)
            + y1 * (-2.0 * s3 + 3.0 * s2)
            + h * d1 * (s3 - s2)
    }
}

/// Node slopes of the shape-preserving cubic: harmonic-mean formula at
/// interior nodes (zero across local extrema), clamped three-point estimates
/// at the endpoints. The interpolant preserves monotonicity of the data on
/// every interval and never overshoots the node range.
fn fritsch_carlson_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    if n == 2 {
        return vec![delta[0], delta[0]];
    }
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    d[0] = endpoint_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = endpoint_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn endpoint_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 < 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

// ---------------------------------------------------------------------------
// SpectralDensity
// ---------------------------------------------------------------------------

/// A bath spectral density `J(ω)`.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralDensity {
    /// `J(ω) = η ω^s ω_c^{1−s} e^{−ω/ω_c}` for `ω > 0`.
    Ohmic { eta: f64, s: f64, omega_c: f64 },
    /// Shape-preserving cubic through tabulated `(ω, J)` points; defined only
    /// on `[ω_first, ω_last]`.
    Tabulated(TabulatedDensity),
}

impl SpectralDensity {
    /// Ohmic-family density. Requires `η > 0`, `ω_c > 0`, and `s > 0` —
    /// at `s ≤ 0` the exponent integrals diverge at the infrared end
    /// (`∫ J/ω dω` and the damping kernel both blow up as `ω → 0`).
    pub fn ohmic(eta: f64, s: f64, omega_c: f64) -> Result<Self> {
        if !eta.is_finite() || eta <= 0.0 {
            return Err(Error::validation("η must be finite and > 0"));
        }
        if !omega_c.is_finite() || omega_c <= 0.0 {
            return Err(Error::validation("ω_c must be finite and > 0"));
        }
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::validation(
                "the exponent s must be > 0: at s ≤ 0 the phase and damping \
                 integrals diverge at ω → 0",
            ));
        }
        Ok(SpectralDensity::Ohmic { eta, s, omega_c })
    }

    /// Tabulated density (strictly increasing `ω`, first point above zero,
    /// values ≥ 0).
    pub fn tabulated(omega: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Ok(SpectralDensity::Tabulated(TabulatedDensity::new(
            omega, values,
        )?))
    }

    /// `J(ω)`. Errors outside the support: `ω ≤ 0` for the Ohmic family,
    /// anything outside the tabulated range for tables (no extrapolation).
    pub fn evaluate(&self, omega: f64) -> Result<f64> {
        match self {
            SpectralDensity::Ohmic { .. } => {
                if omega <= 0.0 || omega.is_nan() {
                    return Err(Error::validation(format!(
                        "Ohmic-family density is defined for ω > 0, got {omega}"
                    )));
                }
                Ok(self.eval_unchecked(omega))
            }
            SpectralDensity::Tabulated(tab) => {
                let (lo, hi) = (tab.omega[0], tab.omega[tab.omega.len() - 1]);
                if !(omega >= lo && omega <= hi) {
                    return Err(Error::validation(format!(
                        "ω = {omega} outside the tabulated range [{lo}, {hi}]; \
                         extrapolation is not supported"
                    )));
                }
                Ok(tab.eval(omega))
            }
        }
    }

    /// `J(ω)` without the range check (quadrature nodes stay in-support).
    pub(crate) fn eval_unchecked(&self, omega: f64) -> f64 {
        match self {
            SpectralDensity::Ohmic { eta, s, omega_c } => {
                eta * omega.powf(*s) * omega_c.powf(1.0 - s) * (-omega / omega_c).exp()
            }
            SpectralDensity::Tabulated(tab) => tab.eval(omega),
        }
    }

    /// Integration support `(lo, hi)`: `(0, 60ω_c)` for the Ohmic family
    /// (the exponential tail beyond is ≈ 1e−26), the tabulated range for
    /// tables.
    pub fn support(&self) -> (f64, f64) {
        match self {
            SpectralDensity::Ohmic { omega_c, .. } => (0.0, OHMIC_SUPPORT_DECADES * omega_c),
            SpectralDensity::Tabulated(tab) => (tab.omega[0], tab.omega[tab.omega.len() - 1]),
        }
    }
}

// ---------------------------------------------------------------------------
// Exponent integrals
// ---------------------------------------------------------------------------

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::validation("time must be finite"));
    }
    Ok(())
}

/// Continuum phase exponent `W(t)` to the default tolerance.
pub fn lamb_integral(j: &SpectralDensity, t: f64) -> Result<f64> {
    Ok(lamb_integral_grid(j, &[t], DEFAULT_INTEGRAL_TOL)?[0])
}

/// Continuum phase exponent `W(t)` to tolerance `abs_tol`.
pub fn lamb_integral_with_tol(j: &SpectralDensity, t: f64, abs_tol: f64) -> Result<f64> {
    Ok(lamb_integral_grid(j, &[t], abs_tol)?[0])
}

/// `W(t)` on a time grid. The linear ramp `−t·∫ J/ω dω` is integrated once
/// and reused across the whole grid; only the oscillatory part is
/// re-integrated per time.
pub fn lamb_integral_grid(j: &SpectralDensity, ts: &[f64], abs_tol: f64) -> Result<Vec<f64>> {
    let (lo, hi) = j.support();
    let ramp = adaptive_integrate(
        |w| j.eval_unchecked(w) / w,
        lo,
        hi,
        0.5 * abs_tol,
        DEFAULT_MAX_INTERVALS,
    )?;
    ts.iter()
        .map(|&t| {
            check_time(t)?;
            let osc = adaptive_integrate(
                |w| j.eval_unchecked(w) / (w * w) * (w * t).sin(),
                lo,
                hi,
                0.5 * abs_tol,
                DEFAULT_MAX_INTERVALS,
            )?;
            Ok(osc - t * ramp)
        })
        .collect()
}

/// Continuum damping exponent `Γ(t)` at temperature `T`, default tolerance.
pub fn damping_integral(j: &SpectralDensity, temperature: f64, t: f64) -> Result<f64> {
    Ok(damping_integral_grid(j, temperature, &[t], DEFAULT_INTEGRAL_TOL)?[0])
}

/// Continuum damping exponent `Γ(t)` to tolerance `abs_tol`.
pub fn damping_integral_with_tol(
    j: &SpectralDensity,
    temperature: f64,
    t: f64,
    abs_tol: f64,
) -> Result<f64> {
    Ok(damping_integral_grid(j, temperature, &[t], abs_tol)?[0])
}

/// `Γ(t)` on a time grid. The `(1 − cos ωt)` factor is evaluated as
/// `2 sin²(ωt/2)`, which stays accurate where the kernel nearly vanishes.
pub fn damping_integral_grid(
    j: &SpectralDensity,
    temperature: f64,
    ts: &[f64],
    abs_tol: f64,
) -> Result<Vec<f64>> {
    if temperature.is_nan() || temperature.is_infinite() || temperature < 0.0 {
        return Err(Error::validation("temperature must be finite and ≥ 0"));
    }
    let (lo, hi) = j.support();
    ts.iter()
        .map(|&t| {
            check_time(t)?;
            let value = adaptive_integrate(
                |w| {
                    let half = (0.5 * w * t).sin();
                    j.eval_unchecked(w) / (w * w) * coth_half(w, temperature) * 2.0 * half * half
                },
                lo,
                hi,
                abs_tol,
                DEFAULT_MAX_INTERVALS,
            )?;
            debug_assert!(value >= -1e-12, "damping integral must be ≥ 0");
            Ok(value)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Discretization
// ---------------------------------------------------------------------------

/// Bin layout used by [`discretize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscretizationScheme {
    /// Equal-width bins across the discretization window.
    Linear,
    /// Geometrically spaced bins — resolves structure near `ω → 0`
    /// (sub-Ohmic densities, low-frequency tails).
    Logarithmic,
}

/// Cap on the requested mode count.
pub const MAX_DISCRETIZATION_MODES: usize = 1_000_000;

/// Replaces `J` by `K` discrete modes `(ω_k, λ_k)`: per bin,
/// `λ_k² = ∫_bin J dω` (weight conservation) and
/// `ω_k = ∫_bin ω J dω / ∫_bin J dω` (first-moment conservation).
/// Returns `(omegas, lambdas)`, ascending in `ω`. Bins carrying no weight
/// collapse to their midpoint with `λ_k = 0`.
pub fn discretize(
    j: &SpectralDensity,
    modes: usize,
    scheme: DiscretizationScheme,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if modes == 0 {
        return Err(Error::validation("need at least one mode"));
    }
    if modes > MAX_DISCRETIZATION_MODES {
        return Err(Error::capacity(format!(
            "{modes} modes exceeds the cap of {MAX_DISCRETIZATION_MODES}"
        )));
    }
    let (lo, hi) = match j {
        SpectralDensity::Ohmic { omega_c, .. } => (0.0, OHMIC_BIN_CUTOFF * omega_c),
        SpectralDensity::Tabulated(tab) => (tab.omega[0], tab.omega[tab.omega.len() - 1]),
    };
    let edges: Vec<f64> = match scheme {
        DiscretizationScheme::Linear => (0..=modes)
            .map(|i| lo + (hi - lo) * i as f64 / modes as f64)
            .collect(),
        DiscretizationScheme::Logarithmic => {
            let floor = if lo > 0.0 {
                lo
            } else {
                match j {
                    SpectralDensity::Ohmic { omega_c, .. } => OHMIC_LOG_FLOOR * omega_c,
                    SpectralDensity::Tabulated(_) => unreachable!("tables start above 0"),
                }
            };
            let ratio = (hi / floor).ln();
            (0..=modes)
                .map(|i| floor * (ratio * i as f64 / modes as f64).exp())
                .collect()
        }
    };
    let (nodes, weights) = gauss_legendre(15);
    let mut omegas = Vec::with_capacity(modes);
    let mut lambdas = Vec::with_capacity(modes);
    for b in 0..modes {
        let (a, c) = (edges[b], edges[b + 1]);
        let mid = 0.5 * (a + c);
        let half = 0.5 * (c - a);
        let mut mass = 0.0;
        let mut first = 0.0;
        for (x, w) in nodes.iter().zip(&weights) {
            let omega = mid + half * x;
            let jv = j.eval_unchecked(omega);
            mass += w * jv;
            first += w * jv * omega;
        }
        mass *= half;
        first *= half;
        if mass > 0.0 && first > 0.0 {
            omegas.push(first / mass);
            lambdas.push(mass.sqrt());
        } else {
            omegas.push(mid);
            lambdas.push(0.0);
        }
    }
    Ok((omegas, lambdas))
}

// ---------------------------------------------------------------------------
// Cross-spectral tables
// ---------------------------------------------------------------------------

/// Symmetric table of cross-spectral densities `J_ij(ω)` between qubit
/// pairs; `None` entries mean no correlated coupling between that pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSpectralTable {
    n: usize,
    entries: Vec<Option<SpectralDensity>>,
}

impl CrossSpectralTable {
    /// Validates squareness and exact symmetry (`entry[i][j] == entry[j][i]`,
    /// including the `None` pattern).
    pub fn new(entries: Vec<Vec<Option<SpectralDensity>>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::validation("cross-spectral table must be non-empty"));
        }
        if entries.iter().any(|row| row.len() != n) {
            return Err(Error::dimension(format!(
                "cross-spectral table must be square ({n} rows)"
            )));
        }
        for (i, row) in entries.iter().enumerate() {
            for (k, entry) in row.iter().enumerate().skip(i + 1) {
                if *entry != entries[k][i] {
                    return Err(Error::validation(format!(
                        "cross-spectral table is asymmetric at ({i}, {k})"
                    )));
                }
            }
        }
        Ok(CrossSpectralTable {
            n,
            entries: entries.into_iter().flatten().collect(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, k: usize) -> Option<&SpectralDensity> {
        self.entries[i * self.n + k].as_ref()
    }
}

/// Which exponent kernel to integrate against a cross-spectral table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContinuumKernel {
    /// `(sin ωt − ωt)/ω²` — produces the continuum Ising phase matrix.
    Lamb,
    /// `coth(ω/2T)(1 − cos ωt)/ω²` — produces the continuum pairwise
    /// damping matrix.
    Damping { temperature: f64 },
}

/// Integrates every table entry against the chosen kernel:
/// `M_ij(t) = ∫ J_ij(ω) · kernel(ω, t) dω`, with `M_ij = 0` where the entry
/// is `None`. The result is symmetric by construction.
pub fn cross_spectral(
    table: &CrossSpectralTable,
    kernel: ContinuumKernel,
    t: f64,
    abs_tol: f64,
) -> Result<DMatrix<f64>> {
    check_time(t)?;
    if let ContinuumKernel::Damping { temperature } = kernel {
        if temperature.is_nan() || temperature.is_infinite() || temperature < 0.0 {
            return Err(Error::validation("temperature must be finite and ≥ 0"));
        }
    }
    let n = table.n_qubits();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for k in i..n {
            let value = match table.entry(i, k) {
                None => 0.0,
                Some(j) => match kernel {
                    ContinuumKernel::Lamb => lamb_integral_with_tol(j, t, abs_tol)?,
                    ContinuumKernel::Damping { temperature } => {
                        damping_integral_with_tol(j, temperature, t, abs_tol)?
                    }
                },
            };
            m[(i, k)] = value;
            m[(k, i)] = value;
        }
    }
    Ok(m)
}
