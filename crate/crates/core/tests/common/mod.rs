//! Shared test oracles. Everything here is computed directly from the
//! defining formulas, without going through the library's circuits.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use qftcheck::{inverse_qft_circuit, Channel, Circuit, Gate};

/// `e^{2πi·num/den}` with the exponent reduced modulo `den` first.
pub fn root_of_unity(num: u64, den: u64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (num % den) as f64 / den as f64)
}

/// Column `k` of the `N × N` DFT matrix `ω^{jk}/√N`.
pub fn dft_column(n: usize, k: u64) -> Vec<Complex64> {
    let dim = 1u64 << n;
    let scale = (dim as f64).sqrt().recip();
    (0..dim)
        .map(|j| root_of_unity(j * k, dim) * scale)
        .collect()
}

/// Dense DFT matrix, row-major.
pub fn dft_matrix(n: usize) -> Vec<Vec<Complex64>> {
    let dim = 1u64 << n;
    let scale = (dim as f64).sqrt().recip();
    (0..dim)
        .map(|j| {
            (0..dim)
                .map(|k| root_of_unity(j * k, dim) * scale)
                .collect()
        })
        .collect()
}

/// `F·v` using the dense matrix.
pub fn dft_apply(n: usize, v: &[Complex64]) -> Vec<Complex64> {
    dft_matrix(n)
        .iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// `F†·v` using the dense matrix.
pub fn inverse_dft_apply(n: usize, v: &[Complex64]) -> Vec<Complex64> {
    let m = dft_matrix(n);
    let dim = v.len();
    (0..dim)
        .map(|j| (0..dim).map(|i| m[i][j].conj() * v[i]).sum())
        .collect()
}

/// `(1/√N) Σ_j e^{2πi·jθ}|j⟩`.
pub fn phase_vector(n: usize, theta: f64) -> Vec<Complex64> {
    let dim = 1u64 << n;
    let scale = (dim as f64).sqrt().recip();
    (0..dim)
        .map(|j| Complex64::from_polar(scale, 2.0 * PI * j as f64 * theta))
        .collect()
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `|sin(πx)|² / (N² |sin(π(x−d)/N)|²)` evaluated by direct summation of
/// the geometric series instead of the closed form.
pub fn alpha_sq_by_sum(n: usize, theta: f64, k: u64) -> f64 {
    inner(&dft_column(n, k), &phase_vector(n, theta)).norm_sqr()
}

/// Sum of `|α_k|²` over `k` outside the window of the `2K` nearest
/// grid points, by direct summation.
pub fn tail_by_sum(n: usize, theta: f64, window: u64) -> f64 {
    let dim = 1u64 << n;
    let k_star = (theta * dim as f64).floor() as i64;
    let mut inside = 0.0;
    for d in -(window as i64 - 1)..=window as i64 {
        let k = (k_star + d).rem_euclid(dim as i64) as u64;
        inside += alpha_sq_by_sum(n, theta, k);
    }
    1.0 - inside
}

/// Inverse QFT followed by an `X` on qubit 0: maps `|k̂⟩` to `|k ⊕ N/2⟩`.
pub fn flipped_inverse_qft(n: usize) -> Circuit {
    let mut c = inverse_qft_circuit(n).unwrap();
    c.push(Gate::PauliX { target: 0 }).unwrap();
    c
}

/// `(1 − p)·F⁻¹ + p·X₀F⁻¹`, with average infidelity exactly `p`.
pub fn flip_mixture(n: usize, p: f64) -> Channel {
    Channel::mixture([
        (1.0 - p, inverse_qft_circuit(n).unwrap()),
        (p, flipped_inverse_qft(n)),
    ])
    .unwrap()
}

/// Corruptor on the Fourier states `bad`, each sent to `k + N/2`.
pub fn half_shift_corruptor(n: usize, bad: &[usize]) -> Channel {
    let dim = 1usize << n;
    Channel::corruptor(n, bad.iter().map(|&k| (k, (k + dim / 2) % dim))).unwrap()
}

/// `count` bad Fourier states spread over the register.
pub fn spread_bad_set(n: usize, count: usize) -> Vec<usize> {
    let dim = 1usize << n;
    let stride = dim / count.max(1);
    (0..count).map(|i| (i * stride + i / 3) % dim).collect()
}
