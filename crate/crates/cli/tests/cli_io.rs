// Copyright 2026 Dephase Contributors
// SPDX-License-Identifier: MIT

//! End-to-end tests of the `dephase` binary: exit codes, determinism,
//! lossless output, config validation, and preset handling.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_dephase")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_cfg(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const BASIC_EVOLVE: &str = r#"
[system]
n_qubits = 2
linear = [[0.4, -0.25]]
hs_energies = [0.0, 0.7, -0.3, 1.1]

[bath]
omega = [1.3]
temperature = 0.8

[run]
t_start = 0.0
t_stop = 5.0
t_points = 11
initial_state = "ghz"
"#;

fn read_to_string(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

/// Data cells (non-`#` lines split on commas).
fn cells(text: &str) -> Vec<String> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .flat_map(|l| l.split(',').map(str::to_owned))
        .collect()
}

#[test]
fn reruns_are_byte_identical_without_timestamps() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "cfg.toml", BASIC_EVOLVE);
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for (out, threads) in [(&out_a, "1"), (&out_b, "4")] {
        let o = run(&[
            "evolve",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--no-timestamp",
            "--threads",
            threads,
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = read_to_string(&out_a.join("evolve.csv"));
    let b = read_to_string(&out_b.join("evolve.csv"));
    assert!(!a.is_empty());
    assert_eq!(a, b, "outputs must not depend on the thread count");
    assert!(
        a.lines().filter(|l| l.starts_with('#')).count() == 1,
        "exactly one header line without timestamps"
    );
}

#[test]
fn timestamp_header_is_present_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "cfg.toml", BASIC_EVOLVE);
    let out = dir.path().join("out");
    let o = run(&[
        "evolve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = read_to_string(&out.join("evolve.csv"));
    assert!(text.starts_with("# generated "));
    assert_eq!(text.lines().filter(|l| l.starts_with('#')).count(), 2);
}

#[test]
fn emitted_numbers_reparse_losslessly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "cfg.toml", BASIC_EVOLVE);
    let out = dir.path().join("out");
    let o = run(&[
        "evolve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert!(o.status.success());
    let text = read_to_string(&out.join("evolve.csv"));
    let cs = cells(&text);
    assert!(!cs.is_empty());
    for cell in cs {
        let v: f64 = cell.parse().expect("every cell parses as f64");
        assert_eq!(
            format!("{v:.16e}"),
            cell,
            "parse → print must reproduce the emitted text"
        );
    }
}

#[test]
fn exit_codes_cover_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out_s = out.to_str().unwrap();

    // 0: success.
    let ok_cfg = write_cfg(dir.path(), "ok.toml", BASIC_EVOLVE);
    let o = run(&[
        "evolve",
        "--config",
        ok_cfg.to_str().unwrap(),
        "--out",
        out_s,
    ]);
    assert_eq!(o.status.code(), Some(0));

    // 1: unknown key in the config.
    let bad = BASIC_EVOLVE.replace("[bath]", "typo_key = 1\n[bath]");
    let bad_cfg = write_cfg(dir.path(), "bad.toml", &bad);
    let o = run(&[
        "evolve",
        "--config",
        bad_cfg.to_str().unwrap(),
        "--out",
        out_s,
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("typo_key"),
        "diagnostic names the bad key: {err}"
    );
    assert!(
        err.contains("line"),
        "diagnostic carries a line number: {err}"
    );

    // 1: missing config file.
    let o = run(&["evolve", "--config", "/nonexistent/x.toml", "--out", out_s]);
    assert_eq!(o.status.code(), Some(1));

    // 1: bad usage (unknown flag).
    let o = run(&["evolve", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));

    // 0: help.
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));

    // 2: a validate scenario beyond the reference scale.
    let big = BASIC_EVOLVE
        .replace("n_qubits = 2", "n_qubits = 4")
        .replace("[[0.4, -0.25]]", "[[0.4, -0.25, 0.1, 0.2]]")
        .replace("hs_energies = [0.0, 0.7, -0.3, 1.1]", "");
    let big_cfg = write_cfg(dir.path(), "big.toml", &big);
    let o = run(&[
        "validate",
        "--config",
        big_cfg.to_str().unwrap(),
        "--out",
        out_s,
    ]);
    assert_eq!(o.status.code(), Some(2));

    // 3: validation failure under an unreachable tolerance.
    let val_cfg = write_cfg(
        dir.path(),
        "val.toml",
        &BASIC_EVOLVE.replace("t_points = 11", "t_points = 3"),
    );
    let o = run(&[
        "validate",
        "--config",
        val_cfg.to_str().unwrap(),
        "--out",
        out_s,
        "--tolerance",
        "1e-30",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn ghz_preset_matches_the_equivalent_explicit_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let preset_cfg = write_cfg(dir.path(), "p.toml", BASIC_EVOLVE);
    let explicit = BASIC_EVOLVE.replace(
        "initial_state = \"ghz\"",
        "initial_matrix = [\n  [[0.5, 0.0], [0.0, 0.0], [0.0, 0.0], [0.5, 0.0]],\n  [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],\n  [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],\n  [[0.5, 0.0], [0.0, 0.0], [0.0, 0.0], [0.5, 0.0]],\n]",
    );
    let explicit_cfg = write_cfg(dir.path(), "e.toml", &explicit);
    let out_p = dir.path().join("p");
    let out_e = dir.path().join("e");
    for (cfg, out) in [(&preset_cfg, &out_p), (&explicit_cfg, &out_e)] {
        let o = run(&[
            "evolve",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--no-timestamp",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(
        read_to_string(&out_p.join("evolve.csv")),
        read_to_string(&out_e.join("evolve.csv"))
    );
}

#[test]
fn file_preset_reads_a_density_matrix_relative_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    // |+⟩ state for one qubit, written as re, im pairs.
    std::fs::write(
        dir.path().join("state.csv"),
        "# re0,im0,re1,im1\n0.5,0.0,0.5,0.0\n0.5,0.0,0.5,0.0\n",
    )
    .unwrap();
    let cfg_text = r#"
[system]
n_qubits = 1
linear = [[0.5]]

[bath]
omega = [1.0]

[run]
t_stop = 2.0
t_points = 3
initial_state = "file:state.csv"
"#;
    let cfg = write_cfg(dir.path(), "cfg.toml", cfg_text);
    let out = dir.path().join("out");
    let o = run(&[
        "evolve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = read_to_string(&out.join("evolve.csv"));
    // Row at t=0: columns t, purity, coh_-2, coh_0, coh_2, re_0_1, …
    let first: Vec<f64> = text
        .lines()
        .find(|l| !l.starts_with('#'))
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    assert_eq!(first[0], 0.0);
    assert!((first[1] - 1.0).abs() < 1e-12, "pure state");
    assert!((first[5] - 0.5).abs() < 1e-12, "ρ01(0) = 1/2");
}

#[test]
fn a_single_point_grid_echoes_the_initial_state() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_text = BASIC_EVOLVE
        .replace("t_stop = 5.0", "t_stop = 0.0")
        .replace("t_points = 11", "t_points = 1");
    let cfg = write_cfg(dir.path(), "cfg.toml", &cfg_text);
    let out = dir.path().join("out");
    let o = run(&[
        "evolve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert!(o.status.success());
    let text = read_to_string(&out.join("evolve.csv"));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 1);
    let vals: Vec<f64> = rows[0].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(vals[0], 0.0, "t = 0");
    assert_eq!(vals[1], 1.0, "GHZ purity echoed");
    // GHZ coherence ρ03 = 1/2 exactly at t = 0 (columns: …, re_0_3 at 15).
    let header: Vec<&str> = text
        .lines()
        .next()
        .unwrap()
        .trim_start_matches("# ")
        .split(',')
        .collect();
    let idx = header.iter().position(|c| *c == "re_0_3").unwrap();
    assert_eq!(vals[idx], 0.5);
    assert_eq!(vals[idx + 1], 0.0);
}

#[test]
fn rates_tables_expose_the_topology() {
    let dir = tempfile::tempdir().unwrap();
    // Sectorized: qubit k couples only to mode k → off-diagonals vanish.
    let cfg_text = r#"
[system]
n_qubits = 2
linear = [[0.4, 0.0], [0.0, -0.3]]

[bath]
omega = [1.0, 1.4]
temperature = 0.6

[run]
t_start = 0.0
t_stop = 4.0
t_points = 5
"#;
    let cfg = write_cfg(dir.path(), "cfg.toml", cfg_text);
    let out = dir.path().join("out");
    let o = run(&[
        "rates",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = read_to_string(&out.join("rates.csv"));
    let header: Vec<String> = text
        .lines()
        .next()
        .unwrap()
        .trim_start_matches("# ")
        .split(',')
        .map(str::to_owned)
        .collect();
    let col = |name: &str| header.iter().position(|c| c == name).unwrap();
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        let vals: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(vals[col("w_0_1")], 0.0);
        assert_eq!(vals[col("w_1_0")], 0.0);
        assert_eq!(vals[col("g_0_1")], 0.0);
        assert_eq!(vals[col("g_1_0")], 0.0);
        if vals[0] == 0.0 {
            assert!(
                vals[1..].iter().all(|v| *v == 0.0),
                "all rates vanish at t = 0"
            );
        }
    }
}

#[test]
fn boson_weights_are_conserved_in_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "cfg.toml", BASIC_EVOLVE);
    let out = dir.path().join("out");
    let o = run(&[
        "boson",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert!(o.status.success());
    let text = read_to_string(&out.join("boson.csv"));
    let mut per_t: std::collections::BTreeMap<u64, f64> = Default::default();
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        let vals: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        // One mode in this scenario → one row per (t, component).
        *per_t.entry(vals[0].to_bits()).or_insert(0.0) += vals[1];
    }
    assert_eq!(per_t.len(), 11);
    for total in per_t.values() {
        assert!((total - 1.0).abs() < 1e-15, "weights sum to the trace");
    }
}

#[test]
fn spectral_run_emits_series_and_convergence_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_text = r#"
[bath]
temperature = 1.0

[bath.spectral]
family = "ohmic"
eta = 0.1
s = 1.0
omega_c = 1.0
scheme = "logarithmic"
k_values = [50, 100]

[run]
t_start = 0.0
t_stop = 5.0
t_points = 11
"#;
    let cfg = write_cfg(dir.path(), "cfg.toml", cfg_text);
    let out = dir.path().join("out");
    let o = run(&[
        "spectral",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let series = read_to_string(&out.join("spectral.csv"));
    let first: Vec<f64> = series
        .lines()
        .find(|l| !l.starts_with('#'))
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    assert_eq!(first, vec![0.0, 0.0, 0.0], "exponents vanish at t = 0");
    let conv = read_to_string(&out.join("convergence.csv"));
    let rows: Vec<Vec<f64>> = conv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert!(
        rows[1][2] < rows[0][2],
        "refinement shrinks the damping error"
    );
}

#[test]
fn spectral_bath_couples_through_weights_in_evolve() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_text = r#"
[system]
n_qubits = 1

[bath]
temperature = 0.5

[bath.spectral]
family = "ohmic"
eta = 0.05
omega_c = 1.0
modes = 64
weights = [1.0]

[run]
t_stop = 3.0
t_points = 4
initial_state = "plus_product"
"#;
    let cfg = write_cfg(dir.path(), "cfg.toml", cfg_text);
    let out = dir.path().join("out");
    let o = run(&[
        "evolve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = read_to_string(&out.join("evolve.csv"));
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    // |ρ01| decays from 1/2 under the discretized continuum.
    let header: Vec<&str> = text
        .lines()
        .next()
        .unwrap()
        .trim_start_matches("# ")
        .split(',')
        .collect();
    let abs_col = header.iter().position(|c| *c == "abs_0_1").unwrap();
    assert!((rows[0][abs_col] - 0.5).abs() < 1e-15);
    assert!(rows[3][abs_col] < 0.5);

    // Omitting the weights is a config error (exit 1) with a pointed message.
    let missing = cfg_text.replace("weights = [1.0]\n", "");
    let cfg2 = write_cfg(dir.path(), "cfg2.toml", &missing);
    let o = run(&[
        "evolve",
        "--config",
        cfg2.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("weights"));
}

#[test]
fn conflicting_bath_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cases = [
        // covariance + occupation
        "[system]\nn_qubits = 1\nlinear = [[0.5]]\n[bath]\nomega = [1.0]\noccupation = [0.5]\ncovariance = [[0.5, 0.0], [0.0, 0.5]]\n[run]\nt_stop = 1.0\nt_points = 2\ninitial_state = \"plus_product\"\n",
        // first moments without covariance
        "[system]\nn_qubits = 1\nlinear = [[0.5]]\n[bath]\nomega = [1.0]\nfirst_moments = [0.1, 0.2]\n[run]\nt_stop = 1.0\nt_points = 2\ninitial_state = \"plus_product\"\n",
        // both coupling forms at once
        "[system]\nn_qubits = 1\nlinear = [[0.5]]\nmonomials = [[{ coeff = 0.5, qubits = [0] }]]\n[bath]\nomega = [1.0]\n[run]\nt_stop = 1.0\nt_points = 2\ninitial_state = \"plus_product\"\n",
        // unknown preset
        "[system]\nn_qubits = 1\nlinear = [[0.5]]\n[bath]\nomega = [1.0]\n[run]\nt_stop = 1.0\nt_points = 2\ninitial_state = \"bell\"\n",
    ];
    for (i, text) in cases.iter().enumerate() {
        let cfg = write_cfg(dir.path(), &format!("c{i}.toml"), text);
        let o = run(&[
            "evolve",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(
            o.status.code(),
            Some(1),
            "case {i}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn monomial_coupling_drives_multi_qubit_terms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_text = r#"
[system]
n_qubits = 2
monomials = [[{ coeff = 0.15, qubits = [0, 1] }]]

[bath]
omega = [1.0]

[run]
t_stop = 4.0
t_points = 5
initial_state = "ghz"
"#;
    let cfg = write_cfg(dir.path(), "cfg.toml", cfg_text);
    let out = dir.path().join("out");
    let o = run(&[
        "evolve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = read_to_string(&out.join("evolve.csv"));
    let header: Vec<&str> = text
        .lines()
        .next()
        .unwrap()
        .trim_start_matches("# ")
        .split(',')
        .collect();
    let abs03 = header.iter().position(|c| *c == "abs_0_3").unwrap();
    let abs12 = header.iter().position(|c| *c == "abs_1_2").unwrap();
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        let vals: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        // σ0σ1 is +1 on both GHZ branches: the GHZ coherence is untouched…
        assert!((vals[abs03] - 0.5).abs() < 1e-12);
        // …and the (1,2) coherence of GHZ is zero anyway.
        assert_eq!(vals[abs12], 0.0);
    }
}
