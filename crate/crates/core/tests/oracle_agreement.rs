// Copyright 2026 Dephase Contributors
// SPDX-License-Identifier: MIT

//! End-to-end agreement between the closed-form engine and the brute-force
//! Fock reference, across bath families and coupling forms. No formula is
//! shared between the two paths: the engine evaluates exponents, the
//! reference diagonalizes the joint Hamiltonian.

use dephase::bosons::{boson_state, mixture_moments};
use dephase::channel::{apply_map, DensityMatrix};
use dephase::model::{BathSpec, CouplingSpec, SystemSpec};
use dephase::oracle::{compare, BathStateFock, FockTruncation, JointEvolution};
use nalgebra::{DMatrix, DVector};

fn time_grid(t_max: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| t_max * i as f64 / (points - 1) as f64)
        .collect()
}

#[test]
fn thermal_bath_with_register_energies() {
    let coupling = CouplingSpec::linear(vec![vec![0.4, -0.25]]).unwrap();
    let bath = BathSpec::thermal(vec![1.1], 0.8).unwrap();
    let spec = SystemSpec::new(2, coupling, bath)
        .unwrap()
        .with_hs_energies(vec![0.0, 0.7, -0.3, 1.1])
        .unwrap();
    let trunc = FockTruncation::for_bath(&spec, 1e-9).unwrap();
    let rho = DensityMatrix::ghz(2).unwrap();
    let report = compare(&spec, &trunc, &rho, &time_grid(12.0, 9)).unwrap();
    assert!(
        report.passed(1e-7),
        "max trace distance {:.3e}, warnings {:?}",
        report.max_trace_distance,
        report.warnings
    );
    for row in &report.rows {
        assert!(row.bath_mean_dev < 1e-7, "t = {}: {row:?}", row.t);
        assert!(row.bath_cm_dev < 1e-6, "t = {}: {row:?}", row.t);
    }
}

#[test]
fn squeezed_bath_damps_differently_and_reference_confirms_it() {
    let coupling = CouplingSpec::linear(vec![vec![0.35]]).unwrap();
    let bath = BathSpec::squeezed_thermal(vec![1.0], 0.4, vec![0.5]).unwrap();
    let spec = SystemSpec::new(1, coupling, bath).unwrap();
    let trunc = FockTruncation::for_bath(&spec, 1e-9).unwrap();
    let rho = DensityMatrix::plus_product(1).unwrap();
    let report = compare(&spec, &trunc, &rho, &time_grid(10.0, 9)).unwrap();
    assert!(
        report.passed(1e-7),
        "max trace distance {:.3e}, warnings {:?}",
        report.max_trace_distance,
        report.warnings
    );
    // the squeezing must actually matter: the same system with z = 0
    // disagrees with the reference by far more than the tolerance
    let unsqueezed = SystemSpec::new(
        1,
        CouplingSpec::linear(vec![vec![0.35]]).unwrap(),
        BathSpec::squeezed_thermal(vec![1.0], 0.4, vec![0.0]).unwrap(),
    )
    .unwrap();
    let bath_fock = BathStateFock::synthesize(&spec, &trunc).unwrap();
    let evo = JointEvolution::new(&spec, &trunc, &rho, bath_fock).unwrap();
    let t = 2.5;
    let reference = evo.evolve(t).reduced_spin();
    let wrong = apply_map(&unsqueezed, &rho, t).unwrap();
    assert!(wrong.trace_distance(&reference).unwrap() > 1e-3);
}

#[test]
fn polynomial_coupling_with_two_modes_at_zero_temperature() {
    // mode 0: constant + one-local, mode 1: two-local Ising term
    let coupling = CouplingSpec::polynomial(vec![
        vec![(0.1, vec![]), (0.2, vec![0])],
        vec![(0.15, vec![0, 1])],
    ])
    .unwrap();
    let bath = BathSpec::thermal(vec![1.3, 0.9], 0.0).unwrap();
    let spec = SystemSpec::new(2, coupling, bath).unwrap();
    let trunc = FockTruncation::for_bath(&spec, 1e-8).unwrap();
    let rho = DensityMatrix::plus_product(2).unwrap();
    let report = compare(&spec, &trunc, &rho, &time_grid(9.0, 7)).unwrap();
    assert!(
        report.passed(1e-7),
        "max trace distance {:.3e}, warnings {:?}",
        report.max_trace_distance,
        report.warnings
    );
}

#[test]
fn displaced_squeezed_covariance_bath() {
    // general (but uncorrelated) covariance with nonzero first moments
    let (nbar, z): (f64, f64) = (0.3, -0.4);
    let cm = DMatrix::from_diagonal(&DVector::from_vec(vec![
        (nbar + 0.5) * (2.0 * z).exp(),
        (nbar + 0.5) * (-2.0 * z).exp(),
    ]));
    let moments = DVector::from_vec(vec![0.6, -0.8]);
    let bath = BathSpec::general(vec![1.0], 0.0, cm, moments).unwrap();
    let coupling = CouplingSpec::linear(vec![vec![0.3]]).unwrap();
    let spec = SystemSpec::new(1, coupling, bath).unwrap();
    let trunc = FockTruncation::for_bath(&spec, 1e-9).unwrap();
    let rho = DensityMatrix::plus_product(1).unwrap();
    let report = compare(&spec, &trunc, &rho, &time_grid(10.0, 9)).unwrap();
    assert!(
        report.passed(1e-6),
        "max trace distance {:.3e}, warnings {:?}",
        report.max_trace_distance,
        report.warnings
    );
}

#[test]
fn correlated_two_mode_squeezed_bath_via_measured_moments() {
    // the bath is built explicitly as a two-mode squeezed vacuum; its
    // measured covariance feeds the engine, so the general-covariance
    // damping path is tested against dynamics it never saw
    let r = 0.4;
    let levels = vec![22, 22];
    let fock = BathStateFock::two_mode_squeezed_vacuum(levels.clone(), r).unwrap();
    assert!(fock.norm_deficit() < 1e-12);
    let (mean, cm) = fock.measured_moments();
    let omega = vec![1.0, 1.4];
    let bath = BathSpec::general(omega, 0.0, cm, mean).unwrap();
    let coupling = CouplingSpec::linear(vec![vec![0.3, -0.2], vec![0.15, 0.25]]).unwrap();
    let spec = SystemSpec::new(2, coupling, bath).unwrap();
    let trunc = FockTruncation::new(levels).unwrap();
    let rho = DensityMatrix::ghz(2).unwrap();
    let evo = JointEvolution::new(&spec, &trunc, &rho, fock).unwrap();
    for t in time_grid(8.0, 7) {
        let joint = evo.evolve(t);
        assert!(
            joint.leakage() < 1e-9,
            "t = {t}: leakage {:.3e}",
            joint.leakage()
        );
        let reference = joint.reduced_spin();
        let engine = apply_map(&spec, &rho, t).unwrap();
        let td = engine.trace_distance(&reference).unwrap();
        assert!(td < 1e-6, "t = {t}: trace distance {td:.3e}");
        let (mean_ref, cm_ref) = joint.bath_moments();
        let mixture = boson_state(&spec, &rho, t).unwrap();
        let (mean_eng, cm_eng) = mixture_moments(&mixture);
        assert!((&mean_ref - &mean_eng).abs().max() < 1e-8, "t = {t}");
        assert!((&cm_ref - &cm_eng).abs().max() < 1e-7, "t = {t}");
    }
}
