// Copyright 2026 Dephase Contributors
// SPDX-License-Identifier: MIT

//! The five subcommand bodies. Each consumes a parsed [`ScenarioConfig`],
//! runs the engine over the configured time grid, and writes one or more
//! comma-delimited tables into the output directory.

use std::path::{Path, PathBuf};

use dephase::channel::{apply_map, sector_aggregates};
use dephase::exponents::{damping_thermal, lamb_shift};
use dephase::linear::{dephasing_matrix, ising_lamb_matrix};
use dephase::model::SpinConfig;
use dephase::oracle::{compare, FockTruncation, DEFAULT_THERMAL_TAIL};
use dephase::spectral::{damping_integral_grid, lamb_integral_grid, DEFAULT_INTEGRAL_TOL};
use dephase::{bosons, BathSpec, CouplingSpec, SystemSpec};
use rayon::prelude::*;

use crate::config::ScenarioConfig;
use crate::error::{CliError, Result};
use crate::table::Table;

/// Default pass tolerance (max trace distance) for validate runs.
pub const DEFAULT_VALIDATE_TOLERANCE: f64 = 1e-6;

/// Oracle-scale ceilings for validate runs: the reference diagonalizes the
/// full register ⊗ Fock space, so it is a desk-scale instrument.
pub const MAX_VALIDATE_QUBITS: usize = 3;
pub const MAX_VALIDATE_MODES: usize = 3;

fn out_path(cfg: &ScenarioConfig, out_dir: &Path, stem: &str) -> PathBuf {
    out_dir.join(format!("{}{stem}.csv", cfg.prefix()))
}

/// Evolves the register over the grid and tabulates, per time: purity, the
/// per-sector coherence weights `Σ|ρ_ij|`, and the selected matrix elements
/// as (re, im, abs, arg) column groups.
pub fn run_evolve(cfg: &ScenarioConfig, out_dir: &Path, timestamp: bool) -> Result<Vec<PathBuf>> {
    let spec = cfg.build_spec()?;
    let n = spec.n_qubits();
    let rho0 = cfg.initial_state(n)?;
    if rho0.n_qubits() != n {
        return Err(CliError::Config(format!(
            "initial state has {} qubits but the system has {n}",
            rho0.n_qubits()
        )));
    }
    let ts = cfg.times()?;
    let elements = cfg.elements(n)?;

    let mut names: Vec<String> = vec!["t".into(), "purity".into()];
    let n_i = n as i64;
    for h in -n_i..=n_i {
        names.push(format!("coh_{}", 2 * h));
    }
    for (i, j) in &elements {
        for part in ["re", "im", "abs", "arg"] {
            names.push(format!("{part}_{i}_{j}"));
        }
    }

    let rows: Vec<Vec<f64>> = ts
        .par_iter()
        .map(|&t| -> dephase::Result<Vec<f64>> {
            let rho = apply_map(&spec, &rho0, t)?;
            let mut row = Vec::with_capacity(names.len());
            row.push(t);
            row.push(rho.purity());
            for (_, total) in sector_aggregates(&rho)? {
                row.push(total);
            }
            for &(i, j) in &elements {
                let v = rho.element(i, j);
                row.extend_from_slice(&[v.re, v.im, v.norm(), v.arg()]);
            }
            Ok(row)
        })
        .collect::<dephase::Result<_>>()?;

    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut tab = Table::new(&name_refs, timestamp);
    for row in &rows {
        tab.push_row(row);
    }
    let path = out_path(cfg, out_dir, "evolve");
    tab.write(&path)?;
    Ok(vec![path])
}

/// Tabulates the pairwise phase matrix `W_ij(t)` and damping matrix
/// `Γ_ij(t)` (linear coupling only), flattened row-major per time.
pub fn run_rates(cfg: &ScenarioConfig, out_dir: &Path, timestamp: bool) -> Result<Vec<PathBuf>> {
    let spec = cfg.build_spec()?;
    let n = spec.n_qubits();
    let ts = cfg.times()?;

    let mut names: Vec<String> = vec!["t".into()];
    for i in 0..n {
        for j in 0..n {
            names.push(format!("w_{i}_{j}"));
        }
    }
    for i in 0..n {
        for j in 0..n {
            names.push(format!("g_{i}_{j}"));
        }
    }

    let rows: Vec<Vec<f64>> = ts
        .par_iter()
        .map(|&t| -> dephase::Result<Vec<f64>> {
            let w = ising_lamb_matrix(&spec, t)?;
            let g = dephasing_matrix(&spec, t)?;
            let mut row = Vec::with_capacity(1 + 2 * n * n);
            row.push(t);
            for i in 0..n {
                for j in 0..n {
                    row.push(w[(i, j)]);
                }
            }
            for i in 0..n {
                for j in 0..n {
                    row.push(g[(i, j)]);
                }
            }
            Ok(row)
        })
        .collect::<dephase::Result<_>>()?;

    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut tab = Table::new(&name_refs, timestamp);
    for row in &rows {
        tab.push_row(row);
    }
    let path = out_path(cfg, out_dir, "rates");
    tab.write(&path)?;
    Ok(vec![path])
}

/// Tabulates the conditional boson mixture: one row per
/// (time, component, mode) with the component weight and the complex
/// displacement amplitude of that mode.
pub fn run_boson(cfg: &ScenarioConfig, out_dir: &Path, timestamp: bool) -> Result<Vec<PathBuf>> {
    let spec = cfg.build_spec()?;
    let rho0 = cfg.initial_state(spec.n_qubits())?;
    let ts = cfg.times()?;

    let per_t: Vec<Vec<Vec<f64>>> = ts
        .par_iter()
        .map(|&t| -> dephase::Result<Vec<Vec<f64>>> {
            let mixture = bosons::boson_state(&spec, &rho0, t)?;
            let mut rows = Vec::new();
            for comp in mixture.components() {
                for (k, amp) in comp.amplitudes.iter().enumerate() {
                    rows.push(vec![t, comp.weight, k as f64, amp.re, amp.im]);
                }
            }
            Ok(rows)
        })
        .collect::<dephase::Result<_>>()?;

    let mut tab = Table::new(&["t", "weight", "mode", "mu_re", "mu_im"], timestamp);
    for rows in &per_t {
        for row in rows {
            tab.push_row(row);
        }
    }
    let path = out_path(cfg, out_dir, "boson");
    tab.write(&path)?;
    Ok(vec![path])
}

/// Runs the closed-form engine against the truncated-Fock reference and
/// tabulates the per-time deviations. Exits nonzero (class 3) when the
/// comparison misses `tolerance` or a truncation warning fires.
pub fn run_validate(
    cfg: &ScenarioConfig,
    out_dir: &Path,
    timestamp: bool,
    tolerance: Option<f64>,
) -> Result<Vec<PathBuf>> {
    let tol = tolerance.unwrap_or(DEFAULT_VALIDATE_TOLERANCE);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::Config(
            "--tolerance must be finite and > 0".into(),
        ));
    }
    let spec = cfg.build_spec()?;
    if spec.n_qubits() > MAX_VALIDATE_QUBITS || spec.modes() > MAX_VALIDATE_MODES {
        return Err(CliError::Capacity(format!(
            "validate is a desk-scale reference check (≤ {MAX_VALIDATE_QUBITS} qubits, \
             ≤ {MAX_VALIDATE_MODES} modes); this config has {} qubits and {} modes — \
             shrink the scenario or trust the engine path validated at this scale",
            spec.n_qubits(),
            spec.modes()
        )));
    }
    let rho0 = cfg.initial_state(spec.n_qubits())?;
    let ts = cfg.times()?;
    let trunc = match &cfg.run.fock_cutoff {
        Some(levels) => {
            if levels.len() != spec.modes() {
                return Err(CliError::Config(format!(
                    "run.fock_cutoff must list {} levels (one per mode), got {}",
                    spec.modes(),
                    levels.len()
                )));
            }
            FockTruncation::new(levels.clone())?
        }
        None => FockTruncation::for_bath(&spec, DEFAULT_THERMAL_TAIL)?,
    };

    let report = compare(&spec, &trunc, &rho0, &ts)?;

    let mut tab = Table::new(
        &[
            "t",
            "trace_distance",
            "bath_mean_dev",
            "bath_cm_dev",
            "leakage",
        ],
        timestamp,
    );
    for row in &report.rows {
        tab.push_row(&[
            row.t,
            row.trace_distance,
            row.bath_mean_dev,
            row.bath_cm_dev,
            row.leakage,
        ]);
    }
    let path = out_path(cfg, out_dir, "validate");
    tab.write(&path)?;

    println!(
        "validate: max trace distance {:.3e}, max leakage {:.3e}, tolerance {tol:.3e}",
        report.max_trace_distance, report.max_leakage
    );
    for w in &report.warnings {
        println!("validate: warning: {w}");
    }
    if report.passed(tol) {
        println!("validate: PASS");
        Ok(vec![path])
    } else {
        println!("validate: FAIL");
        Err(CliError::Failed(format!(
            "validation failed: max trace distance {:.3e} vs tolerance {tol:.3e}{}",
            report.max_trace_distance,
            if report.warnings.is_empty() {
                String::new()
            } else {
                format!(" ({} truncation warning(s))", report.warnings.len())
            }
        )))
    }
}

/// Single-flip continuum exponents over the grid via adaptive quadrature,
/// plus an optional discretization convergence study.
pub fn run_spectral(cfg: &ScenarioConfig, out_dir: &Path, timestamp: bool) -> Result<Vec<PathBuf>> {
    let j = cfg.spectral_density()?;
    let temperature = cfg.bath.temperature;
    let ts = cfg.times()?;

    let lamb = lamb_integral_grid(&j, &ts, DEFAULT_INTEGRAL_TOL)?;
    let damping = damping_integral_grid(&j, temperature, &ts, DEFAULT_INTEGRAL_TOL)?;

    let mut tab = Table::new(&["t", "lamb", "damping"], timestamp);
    for ((&t, &w), &g) in ts.iter().zip(&lamb).zip(&damping) {
        tab.push_row(&[t, w, g]);
    }
    let series_path = out_path(cfg, out_dir, "spectral");
    tab.write(&series_path)?;
    let mut written = vec![series_path];

    let k_values = cfg
        .bath
        .spectral
        .as_ref()
        .and_then(|s| s.k_values.clone())
        .unwrap_or_default();
    if !k_values.is_empty() {
        let scheme = cfg.scheme()?;
        let rows: Vec<[f64; 3]> = k_values
            .par_iter()
            .map(|&k| -> dephase::Result<[f64; 3]> {
                let (err_w, err_g) =
                    discretized_errors(&j, temperature, k, scheme, &ts, &lamb, &damping)?;
                Ok([k as f64, err_w, err_g])
            })
            .collect::<dephase::Result<_>>()?;
        let mut conv = Table::new(&["modes", "max_err_lamb", "max_err_damping"], timestamp);
        for row in &rows {
            conv.push_row(row);
        }
        let conv_path = out_path(cfg, out_dir, "convergence");
        conv.write(&conv_path)?;
        written.push(conv_path);
    }
    Ok(written)
}

/// Discretizes the continuum into `modes` thermal modes, evaluates the same
/// exponents through the finite-K engine (a single qubit flipping against
/// the whole mode set), and returns the worst deviation from the quadrature
/// references over the grid.
fn discretized_errors(
    j: &dephase::SpectralDensity,
    temperature: f64,
    modes: usize,
    scheme: dephase::DiscretizationScheme,
    ts: &[f64],
    lamb_ref: &[f64],
    damping_ref: &[f64],
) -> dephase::Result<(f64, f64)> {
    let (omegas, lambdas) = dephase::discretize(j, modes, scheme)?;
    // The continuum damping kernel carries the full squared weight λ_k² per
    // mode, which a single spin flip reproduces when the per-qubit coupling
    // is λ_k/2 (the flip then changes f_k by exactly λ_k). The phase
    // exponent carries λ_k² directly, so its probe couples at λ_k.
    let rows_w: Vec<Vec<f64>> = lambdas.iter().map(|&l| vec![l]).collect();
    let rows_g: Vec<Vec<f64>> = lambdas.iter().map(|&l| vec![0.5 * l]).collect();
    let bath = BathSpec::thermal(omegas, temperature)?;
    let spec_w = SystemSpec::new(1, CouplingSpec::linear(rows_w)?, bath.clone())?;
    let spec_g = SystemSpec::new(1, CouplingSpec::linear(rows_g)?, bath)?;
    let up = SpinConfig::new(vec![1])?;
    let down = SpinConfig::new(vec![-1])?;
    let mut err_w = 0.0f64;
    let mut err_g = 0.0f64;
    for (i, &t) in ts.iter().enumerate() {
        let w_k = lamb_shift(&spec_w, &up, t);
        let g_k = damping_thermal(&spec_g, &up, &down, t)?;
        err_w = err_w.max((w_k - lamb_ref[i]).abs());
        err_g = err_g.max((g_k - damping_ref[i]).abs());
    }
    Ok((err_w, err_g))
}
