// Copyright 2026 Dephase Contributors
// SPDX-License-Identifier: MIT

//! Adaptive Gauss–Legendre quadrature.
//!
//! A globally adaptive scheme: each interval is estimated with a 15-point
//! Gauss–Legendre rule, its error with the difference against the 7-point
//! rule, and the worst interval (by that error) is bisected until the summed
//! error estimate meets the requested absolute tolerance. Nodes and weights
//! are generated at first use by Newton iteration on the Legendre
//! polynomials — no tabulated constants.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Default cap on the number of refined intervals.
pub const DEFAULT_MAX_INTERVALS: usize = 20_000;

/// Legendre polynomial `P_n(x)` and its derivative via the three-term
/// recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for m in 1..n {
        let m_f = m as f64;
        let p2 = ((2.0 * m_f + 1.0) * x * p1 - m_f * p0) / (m_f + 1.0);
        p0 = p1;
        p1 = p2;
    }
    // P′_n(x) = n (x P_n − P_{n−1}) / (x² − 1)
    let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[−1, 1]`.
///
/// Roots found by Newton iteration seeded with the Chebyshev estimates
/// `x_i ≈ cos(π(i − ¼)/(n + ½))`; weights are `2 / ((1 − x²) P′_n(x)²)`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "rule needs at least two nodes");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..64 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    // cos is decreasing: reverse to ascending node order
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

struct RulePair {
    low_nodes: Vec<f64>,
    low_weights: Vec<f64>,
    high_nodes: Vec<f64>,
    high_weights: Vec<f64>,
}

fn rule_pair() -> &'static RulePair {
    static PAIR: OnceLock<RulePair> = OnceLock::new();
    PAIR.get_or_init(|| {
        let (low_nodes, low_weights) = gauss_legendre(7);
        let (high_nodes, high_weights) = gauss_legendre(15);
        RulePair {
            low_nodes,
            low_weights,
            high_nodes,
            high_weights,
        }
    })
}

/// One interval's high-order estimate and error estimate.
struct Segment {
    error: f64,
    a: f64,
    b: f64,
    value: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn evaluate_segment(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Result<Segment> {
    let rules = rule_pair();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut low = 0.0;
    for (x, w) in rules.low_nodes.iter().zip(&rules.low_weights) {
        low += w * f(mid + half * x);
    }
    let mut high = 0.0;
    for (x, w) in rules.high_nodes.iter().zip(&rules.high_weights) {
        high += w * f(mid + half * x);
    }
    low *= half;
    high *= half;
    if !high.is_finite() || !low.is_finite() {
        return Err(Error::integration(format!(
            "integrand produced a non-finite value on [{a:.6e}, {b:.6e}]"
        )));
    }
    Ok(Segment {
        error: (high - low).abs(),
        a,
        b,
        value: high,
    })
}

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol`.
///
/// Globally adaptive: always bisects the interval with the largest error
/// estimate. Errors if more than `max_intervals` intervals are needed or the
/// integrand returns a non-finite value.
pub fn adaptive_integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Result<f64> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::integration("integration bounds must be finite"));
    }
    if abs_tol <= 0.0 || abs_tol.is_nan() {
        return Err(Error::integration("tolerance must be positive"));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return adaptive_integrate(f, b, a, abs_tol, max_intervals).map(|v| -v);
    }

    let mut heap = BinaryHeap::new();
    heap.push(evaluate_segment(&f, a, b)?);
    let mut count = 1usize;
    loop {
        let total_error: f64 = heap.iter().map(|s| s.error).sum();
        if total_error <= abs_tol {
            return Ok(heap.iter().map(|s| s.value).sum());
        }
        if count >= max_intervals {
            return Err(Error::integration(format!(
                "failed to reach tolerance {abs_tol:.3e} within {max_intervals} intervals \
                 (remaining error estimate {total_error:.3e})"
            )));
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval no longer splittable in f64; accept its estimate
            let mut spent = worst;
            spent.error = 0.0;
            heap.push(spent);
            continue;
        }
        heap.push(evaluate_segment(&f, worst.a, mid)?);
        heap.push(evaluate_segment(&f, mid, worst.b)?);
        count += 1;
    }
}

/// [`adaptive_integrate`] with the default interval cap.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    adaptive_integrate(f, a, b, abs_tol, DEFAULT_MAX_INTERVALS)
}
