//! Fourier-tail probabilities of phase states and their bounds.
//!
//! Writing `Nθ = k* + x` with `k* = ⌊Nθ⌋` and `x ∈ [0, 1)`, the phase state
//! `(1/√N) Σ_j e^{2πijθ}|j⟩` has Fourier amplitudes
//! `|α_k|² = sin²(πx) / (N² sin²(π(x − (k − k*))/N))`. The window `S` is the
//! `2K` integers `k* − K + 1, …, k* + K` (mod `N`), and the tail is the
//! probability mass outside it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;
use crate::tolerance::RESONANCE_TOL;

/// Splits `Nθ` into `(k*, x)`.
pub fn split_phase(dim: u64, theta: f64) -> (u64, f64) {
    let scaled = theta * dim as f64;
    let k_star = scaled.floor();
    ((k_star as u64) % dim, scaled - k_star)
}

fn check_dim(dim: u64) -> Result<()> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::range(
            "N",
            format!("{dim} is not a power of two >= 2"),
        ));
    }
    Ok(())
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::range("theta", format!("{theta} not in [0, 1)")));
    }
    Ok(())
}

/// `|α_{k*+offset}|²` for fractional part `x`.
pub fn alpha_sq_offset(dim: u64, x: f64, offset: i64) -> f64 {
    let n = dim as f64;
    let den = (PI * (x - offset as f64) / n).sin();
    if den.abs() < RESONANCE_TOL {
        // x = 0 and offset ≡ 0 (mod N): the exact resonance.
        return 1.0;
    }
    let num = (PI * x).sin();
    (num * num) / (n * n * den * den)
}

/// `|⟨k̂|phase state(θ)⟩|²`.
pub fn alpha_sq(dim: u64, theta: f64, k: u64) -> Result<f64> {
    check_dim(dim)?;
    check_theta(theta)?;
    if k >= dim {
        return Err(Error::range("k", format!("{k} >= {dim}")));
    }
    let (k_star, x) = split_phase(dim, theta);
    Ok(alpha_sq_offset(dim, x, k as i64 - k_star as i64))
}

fn check_window(dim: u64, window: u64) -> Result<()> {
    if window < 1 || 2 * window > dim {
        return Err(Error::range(
            "K",
            format!("need 2 <= 2K <= N, got K = {window}, N = {dim}"),
        ));
    }
    Ok(())
}

/// `1 − Σ_{k∈S} |α_k|²` for fractional part `x`.
pub fn tail_probability_at(dim: u64, x: f64, window: u64) -> Result<f64> {
    check_dim(dim)?;
    check_window(dim, window)?;
    if !(0.0..1.0).contains(&x) {
        return Err(Error::range("x", format!("{x} not in [0, 1)")));
    }
    let k = window as i64;
    let inside = compensated_sum((-k + 1..=k).map(|d| alpha_sq_offset(dim, x, d)));
    Ok((1.0 - inside).clamp(0.0, 1.0))
}

/// Probability that a perfect inverse QFT applied to the phase state of
/// `θ` gives an outcome outside the `2K`-window around `Nθ`.
pub fn tail_probability_exact(dim: u64, theta: f64, window: u64) -> Result<f64> {
    check_dim(dim)?;
    check_theta(theta)?;
    let (_, x) = split_phase(dim, theta);
    tail_probability_at(dim, x, window)
}

fn check_rigorous_k(window: u64) -> Result<()> {
    if window < 2 {
        return Err(Error::range(
            "K",
            format!("rigorous bound needs K >= 2, got {window}"),
        ));
    }
    Ok(())
}

/// `(1/4)(1/(K − x) + 1/(K − 1 + x))`.
pub fn tail_bound_rigorous(window: u64, x: f64) -> Result<f64> {
    check_rigorous_k(window)?;
    if !(0.0..1.0).contains(&x) {
        return Err(Error::range("x", format!("{x} not in [0, 1)")));
    }
    let k = window as f64;
    Ok(0.25 * (1.0 / (k - x) + 1.0 / (k - 1.0 + x)))
}

/// `(1/4)(1/K + 1/(K − 1))`, the supremum of [`tail_bound_rigorous`] over `x`.
pub fn tail_bound_rigorous_uniform(window: u64) -> Result<f64> {
    check_rigorous_k(window)?;
    let k = window as f64;
    Ok(0.25 * (1.0 / k + 1.0 / (k - 1.0)))
}

/// `4/(π²(2K − 1))`, valid if the tail is largest at `x = 1/2`.
pub fn tail_bound_conjectured(window: u64) -> Result<f64> {
    if window < 1 {
        return Err(Error::range("K", "conjectured bound needs K >= 1"));
    }
    Ok(4.0 / (PI * PI * (2.0 * window as f64 - 1.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailBoundRow {
    #[serde(rename = "N")]
    pub dim: u64,
    #[serde(rename = "K")]
    pub window: u64,
    pub x: f64,
    pub exact_tail: f64,
    /// x-free rigorous bound.
    pub rigorous_bound: f64,
    /// x-dependent rigorous bound.
    pub rigorous_bound_at_x: f64,
    pub conjectured_bound: f64,
}

/// One row per `(K, x)` pair, `K` varying slowest.
pub fn bounds_table(dim: u64, windows: &[u64], xs: &[f64]) -> Result<Vec<TailBoundRow>> {
    let mut rows = Vec::with_capacity(windows.len() * xs.len());
    for &window in windows {
        for &x in xs {
            rows.push(TailBoundRow {
                dim,
                window,
                x,
                exact_tail: tail_probability_at(dim, x, window)?,
                rigorous_bound: tail_bound_rigorous_uniform(window)?,
                rigorous_bound_at_x: tail_bound_rigorous(window, x)?,
                conjectured_bound: tail_bound_conjectured(window)?,
            });
        }
    }
    Ok(rows)
}

/// Point of an `x` grid where the exact tail is largest, with its value.
/// Ties resolve to the grid point closest to 1/2.
pub fn tail_maximizer(dim: u64, window: u64, grid: &[f64]) -> Result<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for &x in grid {
        let t = tail_probability_at(dim, x, window)?;
        best = match best {
            Some((bx, bt))
                if bt > t + 1e-15
                    || ((bt - t).abs() <= 1e-15 && (bx - 0.5).abs() <= (x - 0.5).abs()) =>
            {
                Some((bx, bt))
            }
            _ => Some((x, t)),
        };
    }
    best.ok_or(Error::EmptyInput("x grid"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_phase_is_a_single_fourier_state() {
        let dim = 64;
        for k in [0u64, 1, 17, 63] {
            let theta = k as f64 / dim as f64;
            for j in 0..dim {
                let a = alpha_sq(dim, theta, j).unwrap();
                assert_eq!(a, if j == k { 1.0 } else { 0.0 }, "k={k} j={j}");
            }
        }
    }

    #[test]
    fn amplitudes_normalize() {
        let dim = 1024;
        let theta = 333.5 / 1024.0;
        let total = compensated_sum((0..dim).map(|k| alpha_sq(dim, theta, k).unwrap()));
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tail_table_values() {
        let exact: Vec<f64> = [2, 3, 4]
            .iter()
            .map(|&k| tail_probability_at(1024, 0.5, k).unwrap())
            .collect();
        for (got, want) in exact.iter().zip([0.099, 0.067, 0.050]) {
            assert!((got - want).abs() <= 1e-3, "{got} vs {want}");
        }
        for (k, want) in [(2, 0.375), (3, 0.208), (4, 0.146)] {
            assert!((tail_bound_rigorous_uniform(k).unwrap() - want).abs() <= 1e-3);
        }
        for (k, want) in [(2, 0.135), (3, 0.081), (4, 0.058)] {
            assert!((tail_bound_conjectured(k).unwrap() - want).abs() <= 1e-3);
        }
    }

    #[test]
    fn rigorous_endpoint_matches_uniform_form() {
        for k in 2..10 {
            assert!(
                (tail_bound_rigorous(k, 0.0).unwrap() - tail_bound_rigorous_uniform(k).unwrap())
                    .abs()
                    < 1e-15
            );
        }
        assert!(tail_bound_rigorous(1, 0.3).is_err());
        assert!(tail_bound_rigorous_uniform(1).is_err());
        assert!(tail_bound_rigorous(2, 1.0).is_err());
    }

    #[test]
    fn zero_fraction_has_no_tail() {
        let rows = bounds_table(1024, &[2, 3, 4], &[0.0]).unwrap();
        assert!(rows.iter().all(|r| r.exact_tail == 0.0));
    }

    #[test]
    fn window_range_checked() {
        assert!(tail_probability_at(8, 0.5, 0).is_err());
        assert!(tail_probability_at(8, 0.5, 5).is_err());
        assert!(tail_probability_at(8, 0.5, 4).is_ok());
        assert!(tail_probability_at(12, 0.5, 2).is_err());
        assert!(alpha_sq(8, 0.5, 8).is_err());
        assert!(alpha_sq(8, 1.5, 0).is_err());
    }

    #[test]
    fn window_wraps_around() {
        // θ just below 1: k* = N − 1 and the window spills over to 0, 1, ...
        let dim = 16;
        let theta = 15.5 / 16.0;
        let inside: f64 = [14u64, 15, 0, 1]
            .iter()
            .map(|&k| alpha_sq(dim, theta, k).unwrap())
            .sum();
        let tail = tail_probability_exact(dim, theta, 2).unwrap();
        assert!((1.0 - inside - tail).abs() < 1e-12);
    }

    #[test]
    fn symmetric_in_x() {
        for k in 2..6 {
            for i in 1..50 {
                let x = i as f64 / 100.0;
                let a = tail_probability_at(256, x, k).unwrap();
                let b = tail_probability_at(256, 1.0 - x, k).unwrap();
                assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
