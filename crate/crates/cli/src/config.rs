// Copyright 2026 Dephase Contributors
// SPDX-License-Identifier: MIT

//! Scenario configuration: schema, loading, and conversion into engine types.
//!
//! Configs are TOML with four blocks — `[system]`, `[bath]`, `[run]`,
//! `[output]` — and unknown keys are rejected so typos fail loudly. Parse
//! errors carry the line/column reported by the TOML parser.

use std::path::{Path, PathBuf};

use dephase::{
    BathSpec, CouplingSpec, DensityMatrix, DiscretizationScheme, SpectralDensity, SystemSpec,
};
use nalgebra::{Complex, DMatrix, DVector};
use serde::Deserialize;

use crate::error::{CliError, Result};
use crate::table;

type Complex64 = Complex<f64>;

/// Upper bound on requested time-grid points; guards accidental "1e9 rows"
/// configs before any compute starts.
pub const MAX_T_POINTS: usize = 5_000_000;

/// One product term `coeff · σ_{q1} σ_{q2} …` of a polynomial coupling.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialTerm {
    pub coeff: f64,
    pub qubits: Vec<usize>,
}

/// `[system]`: register size and qubit–mode coupling.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemBlock {
    pub n_qubits: usize,
    /// Linear coupling matrix, one row per mode, one column per qubit.
    pub linear: Option<Vec<Vec<f64>>>,
    /// Polynomial coupling: per mode, a list of monomial terms.
    pub monomials: Option<Vec<Vec<MonomialTerm>>>,
    /// Optional diagonal register energies, one per basis state.
    pub hs_energies: Option<Vec<f64>>,
}

/// `[bath.spectral]`: continuum spectral density in place of discrete modes.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralBlock {
    /// "ohmic" or "tabulated".
    pub family: String,
    pub eta: Option<f64>,
    pub s: Option<f64>,
    pub omega_c: Option<f64>,
    /// Table file for the "tabulated" family: rows `omega, value`.
    pub file: Option<String>,
    /// Number of discrete modes when the continuum must be discretized
    /// (evolve/rates/boson runs on a spectral bath).
    pub modes: Option<usize>,
    /// "linear" (default) or "logarithmic" bin layout.
    pub scheme: Option<String>,
    /// Mode counts for a spectral-run convergence study.
    pub k_values: Option<Vec<usize>>,
    /// Per-qubit weights for the discretized coupling rows (length N).
    pub weights: Option<Vec<f64>>,
}

/// `[bath]`: discrete modes (thermal / squeezed / occupation / covariance)
/// or a continuum spectral density.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathBlock {
    pub omega: Option<Vec<f64>>,
    #[serde(default)]
    pub temperature: f64,
    /// Explicit per-mode occupations n̄ (product state).
    pub occupation: Option<Vec<f64>>,
    /// Per-mode squeezing parameters z.
    pub squeezing: Option<Vec<f64>>,
    /// Full 2K×2K covariance matrix (row-major).
    pub covariance: Option<Vec<Vec<f64>>>,
    /// Quadrature first moments, length 2K (requires `covariance`).
    pub first_moments: Option<Vec<f64>>,
    pub spectral: Option<SpectralBlock>,
}

/// `[run]`: time grid, initial register state, oracle cutoff override.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    #[serde(default)]
    pub t_start: f64,
    pub t_stop: f64,
    pub t_points: usize,
    /// Named preset: "ghz", "plus_product", "basis:<index>", "file:<path>".
    pub initial_state: Option<String>,
    /// Explicit density matrix, entries as `[re, im]` pairs.
    pub initial_matrix: Option<Vec<Vec<[f64; 2]>>>,
    /// Per-mode Fock levels for validate runs (otherwise sized automatically).
    pub fock_cutoff: Option<Vec<usize>>,
}

/// `[output]`: which elements to report and the output filename prefix.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    /// Density-matrix elements (row, column) to tabulate in evolve runs.
    pub elements: Option<Vec<[usize; 2]>>,
    pub prefix: Option<String>,
}

/// A parsed scenario plus the directory of its config file (used to resolve
/// relative paths referenced inside the config).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub system: Option<SystemBlock>,
    pub bath: BathBlock,
    pub run: RunBlock,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(skip)]
    base_dir: PathBuf,
}

impl ScenarioConfig {
    /// Loads and parses `path`, rejecting unknown keys with the parser's
    /// line/column diagnostics.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: ScenarioConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        cfg.base_dir = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(cfg)
    }

    /// Resolves a path mentioned inside the config relative to the config
    /// file's own directory.
    fn resolve(&self, p: &str) -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Output filename prefix (empty by default).
    pub fn prefix(&self) -> &str {
        self.output.prefix.as_deref().unwrap_or("")
    }

    /// The evaluation time grid: `t_points` equally spaced samples from
    /// `t_start` to `t_stop` inclusive (a single point sits at `t_start`).
    pub fn times(&self) -> Result<Vec<f64>> {
        let r = &self.run;
        if !r.t_start.is_finite() || !r.t_stop.is_finite() {
            return Err(CliError::Config(
                "run.t_start and run.t_stop must be finite".into(),
            ));
        }
        if r.t_points == 0 {
            return Err(CliError::Config("run.t_points must be ≥ 1".into()));
        }
        if r.t_points > MAX_T_POINTS {
            return Err(CliError::Capacity(format!(
                "run.t_points = {} exceeds the cap of {MAX_T_POINTS}",
                r.t_points
            )));
        }
        if r.t_points == 1 {
            return Ok(vec![r.t_start]);
        }
        let step = (r.t_stop - r.t_start) / (r.t_points - 1) as f64;
        Ok((0..r.t_points)
            .map(|k| r.t_start + step * k as f64)
            .collect())
    }

    /// The `[system]` block, required by every subcommand except `spectral`.
    fn system(&self) -> Result<&SystemBlock> {
        self.system
            .as_ref()
            .ok_or_else(|| CliError::Config("this subcommand requires a [system] block".into()))
    }

    /// Builds the spectral density described by `[bath.spectral]`.
    pub fn spectral_density(&self) -> Result<SpectralDensity> {
        let sb =
            self.bath.spectral.as_ref().ok_or_else(|| {
                CliError::Config("this run requires a [bath.spectral] block".into())
            })?;
        match sb.family.as_str() {
            "ohmic" => {
                let eta = sb.eta.ok_or_else(|| {
                    CliError::Config("bath.spectral.eta is required for the ohmic family".into())
                })?;
                let s = sb.s.unwrap_or(1.0);
                let omega_c = sb.omega_c.ok_or_else(|| {
                    CliError::Config(
                        "bath.spectral.omega_c is required for the ohmic family".into(),
                    )
                })?;
                if sb.file.is_some() {
                    return Err(CliError::Config(
                        "bath.spectral.file is only valid for the tabulated family".into(),
                    ));
                }
                Ok(SpectralDensity::ohmic(eta, s, omega_c)?)
            }
            "tabulated" => {
                if sb.eta.is_some() || sb.s.is_some() || sb.omega_c.is_some() {
                    return Err(CliError::Config(
                        "eta/s/omega_c are only valid for the ohmic family".into(),
                    ));
                }
                let file = sb.file.as_ref().ok_or_else(|| {
                    CliError::Config(
                        "bath.spectral.file is required for the tabulated family".into(),
                    )
                })?;
                let rows = table::read_table(&self.resolve(file))?;
                let mut omega = Vec::with_capacity(rows.len());
                let mut values = Vec::with_capacity(rows.len());
                for (ln, row) in rows.iter().enumerate() {
                    if row.len() != 2 {
                        return Err(CliError::Config(format!(
                            "{file}: data row {} must have 2 columns (omega, value), got {}",
                            ln + 1,
                            row.len()
                        )));
                    }
                    omega.push(row[0]);
                    values.push(row[1]);
                }
                Ok(SpectralDensity::tabulated(omega, values)?)
            }
            other => Err(CliError::Config(format!(
                "unknown spectral family {other:?} (expected \"ohmic\" or \"tabulated\")"
            ))),
        }
    }

    /// Discretization scheme named in the config ("linear" by default).
    pub fn scheme(&self) -> Result<DiscretizationScheme> {
        let name = self
            .bath
            .spectral
            .as_ref()
            .and_then(|s| s.scheme.as_deref())
            .unwrap_or("linear");
        match name {
            "linear" => Ok(DiscretizationScheme::Linear),
            "logarithmic" | "log" => Ok(DiscretizationScheme::Logarithmic),
            other => Err(CliError::Config(format!(
                "unknown discretization scheme {other:?} (expected \"linear\" or \"logarithmic\")"
            ))),
        }
    }

    /// Builds the discrete bath described by `[bath]` (spectral baths are
    /// handled by [`ScenarioConfig::build_spec`] instead).
    fn build_bath(&self) -> Result<BathSpec> {
        let b = &self.bath;
        let omega = b.omega.clone().ok_or_else(|| {
            CliError::Config("bath.omega is required unless bath.spectral is given".into())
        })?;
        let kk = omega.len();
        if let Some(cm) = &b.covariance {
            if b.occupation.is_some() || b.squeezing.is_some() {
                return Err(CliError::Config(
                    "bath.covariance cannot be combined with occupation or squeezing".into(),
                ));
            }
            let d = 2 * kk;
            if cm.len() != d || cm.iter().any(|row| row.len() != d) {
                return Err(CliError::Config(format!(
                    "bath.covariance must be a {d}×{d} matrix for {kk} modes"
                )));
            }
            let theta = DMatrix::from_fn(d, d, |i, j| cm[i][j]);
            let fm = match &b.first_moments {
                Some(v) if v.len() == d => DVector::from_column_slice(v),
                Some(v) => {
                    return Err(CliError::Config(format!(
                        "bath.first_moments must have length {d}, got {}",
                        v.len()
                    )));
                }
                None => DVector::zeros(d),
            };
            return Ok(BathSpec::general(omega, b.temperature, theta, fm)?);
        }
        if b.first_moments.is_some() {
            return Err(CliError::Config(
                "bath.first_moments requires bath.covariance".into(),
            ));
        }
        if let Some(nbar) = &b.occupation {
            let z = b.squeezing.clone().unwrap_or_else(|| vec![0.0; kk]);
            return Ok(BathSpec::product(omega, b.temperature, nbar.clone(), z)?);
        }
        if let Some(z) = &b.squeezing {
            return Ok(BathSpec::squeezed_thermal(omega, b.temperature, z.clone())?);
        }
        Ok(BathSpec::thermal(omega, b.temperature)?)
    }

    /// Builds the full system spec: coupling + bath (+ register energies).
    ///
    /// A spectral bath is discretized into `bath.spectral.modes` thermal
    /// modes and coupled through the rank-one rows `λ_k · weights`, so each
    /// qubit couples to every discretized mode in proportion to its weight.
    pub fn build_spec(&self) -> Result<SystemSpec> {
        let sys = self.system()?;
        let coupling;
        let bath;
        if let Some(sb) = &self.bath.spectral {
            if self.bath.omega.is_some()
                || self.bath.occupation.is_some()
                || self.bath.squeezing.is_some()
                || self.bath.covariance.is_some()
                || self.bath.first_moments.is_some()
            {
                return Err(CliError::Config(
                    "bath.spectral cannot be combined with discrete-mode bath keys".into(),
                ));
            }
            if sys.linear.is_some() || sys.monomials.is_some() {
                return Err(CliError::Config(
                    "with a spectral bath the coupling comes from bath.spectral.weights; \
                     remove system.linear / system.monomials"
                        .into(),
                ));
            }
            let weights = sb.weights.as_ref().ok_or_else(|| {
                CliError::Config(
                    "bath.spectral.weights (one per qubit) is required to couple a \
                     spectral bath"
                        .into(),
                )
            })?;
            if weights.len() != sys.n_qubits {
                return Err(CliError::Config(format!(
                    "bath.spectral.weights must have length {} (one per qubit), got {}",
                    sys.n_qubits,
                    weights.len()
                )));
            }
            let modes = sb.modes.ok_or_else(|| {
                CliError::Config(
                    "bath.spectral.modes is required to discretize a spectral bath".into(),
                )
            })?;
            let j = self.spectral_density()?;
            let (omegas, lambdas) = dephase::discretize(&j, modes, self.scheme()?)?;
            let rows: Vec<Vec<f64>> = lambdas
                .iter()
                .map(|l| weights.iter().map(|w| l * w).collect())
                .collect();
            coupling = CouplingSpec::linear(rows)?;
            bath = BathSpec::thermal(omegas, self.bath.temperature)?;
        } else {
            coupling = match (&sys.linear, &sys.monomials) {
                (Some(rows), None) => CouplingSpec::linear(rows.clone())?,
                (None, Some(modes)) => {
                    let per_mode: Vec<Vec<(f64, Vec<usize>)>> = modes
                        .iter()
                        .map(|terms| terms.iter().map(|t| (t.coeff, t.qubits.clone())).collect())
                        .collect();
                    CouplingSpec::polynomial(per_mode)?
                }
                (Some(_), Some(_)) => {
                    return Err(CliError::Config(
                        "give system.linear or system.monomials, not both".into(),
                    ));
                }
                (None, None) => {
                    return Err(CliError::Config(
                        "system.linear or system.monomials is required".into(),
                    ));
                }
            };
            bath = self.build_bath()?;
        }
        let mut spec = SystemSpec::new(sys.n_qubits, coupling, bath)?;
        if let Some(e) = &sys.hs_energies {
            spec = spec.with_hs_energies(e.clone())?;
        }
        Ok(spec)
    }

    /// Builds the initial register state from `run.initial_state` /
    /// `run.initial_matrix`.
    pub fn initial_state(&self, n_qubits: usize) -> Result<DensityMatrix> {
        let r = &self.run;
        match (&r.initial_state, &r.initial_matrix) {
            (Some(_), Some(_)) => Err(CliError::Config(
                "give run.initial_state or run.initial_matrix, not both".into(),
            )),
            (None, None) => Err(CliError::Config(
                "this subcommand requires run.initial_state or run.initial_matrix".into(),
            )),
            (Some(name), None) => self.preset_state(name, n_qubits),
            (None, Some(rows)) => {
                let dim = 1usize << n_qubits;
                if rows.len() != dim || rows.iter().any(|row| row.len() != dim) {
                    return Err(CliError::Config(format!(
                        "run.initial_matrix must be {dim}×{dim} for {n_qubits} qubits"
                    )));
                }
                let m = DMatrix::from_fn(dim, dim, |i, j| {
                    Complex64::new(rows[i][j][0], rows[i][j][1])
                });
                Ok(DensityMatrix::new(m)?)
            }
        }
    }

    fn preset_state(&self, name: &str, n_qubits: usize) -> Result<DensityMatrix> {
        if name == "ghz" {
            return Ok(DensityMatrix::ghz(n_qubits)?);
        }
        if name == "plus_product" {
            return Ok(DensityMatrix::plus_product(n_qubits)?);
        }
        if let Some(idx) = name.strip_prefix("basis:") {
            let index: usize = idx.trim().parse().map_err(|_| {
                CliError::Config(format!("bad basis index in initial_state {name:?}"))
            })?;
            return Ok(DensityMatrix::basis_state(n_qubits, index)?);
        }
        if let Some(path) = name.strip_prefix("file:") {
            return self.state_from_file(path, n_qubits);
        }
        Err(CliError::Config(format!(
            "unknown initial_state {name:?} (expected \"ghz\", \"plus_product\", \
             \"basis:<index>\", or \"file:<path>\")"
        )))
    }

    /// Reads a density matrix from a table file: one row per matrix row,
    /// `2·dim` columns of alternating re, im.
    fn state_from_file(&self, path: &str, n_qubits: usize) -> Result<DensityMatrix> {
        let dim = 1usize << n_qubits;
        let rows = table::read_table(&self.resolve(path))?;
        if rows.len() != dim || rows.iter().any(|row| row.len() != 2 * dim) {
            return Err(CliError::Config(format!(
                "{path}: expected {dim} rows of {} columns (re, im pairs)",
                2 * dim
            )));
        }
        let m = DMatrix::from_fn(dim, dim, |i, j| {
            Complex64::new(rows[i][2 * j], rows[i][2 * j + 1])
        });
        Ok(DensityMatrix::new(m)?)
    }

    /// Density-matrix elements to tabulate: the configured list, defaulting
    /// to every strict upper-triangle pair for registers up to 3 qubits.
    pub fn elements(&self, n_qubits: usize) -> Result<Vec<(usize, usize)>> {
        let dim = 1usize << n_qubits;
        if let Some(list) = &self.output.elements {
            let mut out = Vec::with_capacity(list.len());
            for &[i, j] in list {
                if i >= dim || j >= dim {
                    return Err(CliError::Config(format!(
                        "output.elements entry [{i}, {j}] is out of range for dim {dim}"
                    )));
                }
                out.push((i, j));
            }
            if out.is_empty() {
                return Err(CliError::Config("output.elements must not be empty".into()));
            }
            return Ok(out);
        }
        if n_qubits > 3 {
            return Err(CliError::Config(
                "output.elements is required for registers larger than 3 qubits".into(),
            ));
        }
        let mut out = Vec::new();
        for i in 0..dim {
            for j in (i + 1)..dim {
                out.push((i, j));
            }
        }
        Ok(out)
    }
}
