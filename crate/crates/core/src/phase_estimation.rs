//! Phase estimation through a possibly faulty inverse QFT, with a uniformly
//! random `n`-bit offset added to the phase before the channel and
//! subtracted from the outcome afterwards.
//!
//! Everything ahead of the inverse QFT is taken to be perfect, so the
//! register state entering the channel is prepared directly as
//! `(1/√N) Σ_j e^{2πij(θ+λ)}|j⟩`; this is what replacing the first-layer
//! Hadamards by `|0⟩ ↦ (|0⟩ + e^{2πi·2^(n−ℓ)λ}|1⟩)/√2` produces.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::linalg::min_eigenvalue_hermitian;
use crate::numeric::compensated_sum;
use crate::seed::SeedStream;
use crate::state::prepare_phase_state;
use crate::tolerance::PSD_TOL;

/// One shot of randomized phase estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseRunOutcome {
    /// `Nλ`.
    pub lambda_int: u64,
    pub raw_outcome: u64,
    /// `(raw_outcome − lambda_int) mod N`.
    pub corrected: u64,
}

impl PhaseRunOutcome {
    pub fn new(lambda_int: u64, raw_outcome: u64, n: usize) -> Self {
        let dim = 1u64 << n;
        Self {
            lambda_int,
            raw_outcome,
            corrected: (raw_outcome + dim - lambda_int % dim) % dim,
        }
    }

    /// `corrected / 2ⁿ`.
    pub fn estimate(&self, n: usize) -> f64 {
        self.corrected as f64 / (1u64 << n) as f64
    }
}

/// How the offset `λ` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Offset {
    /// Uniform over `{0, 1/N, …, (N−1)/N}`, fresh per shot.
    #[default]
    Uniform,
    /// Fixed `Nλ`; `Pinned(0)` is plain, un-randomized phase estimation.
    Pinned(u64),
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::range("theta", format!("{theta} not in [0, 1)")));
    }
    Ok(())
}

/// `frac(θ + λ_int/N)`.
fn shifted_phase(theta: f64, lambda_int: u64, n: usize) -> f64 {
    let dim = (1u64 << n) as f64;
    let shifted = theta + lambda_int as f64 / dim;
    if shifted >= 1.0 {
        shifted - 1.0
    } else {
        shifted
    }
}

/// Randomized phase estimation of `θ` with a fresh uniform offset.
pub fn run_pe_once<R: Rng + ?Sized>(
    channel: &Channel,
    theta: f64,
    rng: &mut R,
) -> Result<PhaseRunOutcome> {
    run_pe_once_with_offset(channel, theta, Offset::Uniform, rng)
}

pub fn run_pe_once_with_offset<R: Rng + ?Sized>(
    channel: &Channel,
    theta: f64,
    offset: Offset,
    rng: &mut R,
) -> Result<PhaseRunOutcome> {
    check_theta(theta)?;
    let n = channel.num_qubits();
    let dim = 1u64 << n;
    let lambda_int = match offset {
        Offset::Uniform => rng.random_range(0..dim),
        Offset::Pinned(l) => l % dim,
    };
    let input = prepare_phase_state(n, shifted_phase(theta, lambda_int, n))?;
    let out = channel.apply_shot(&input, rng)?;
    let raw = out.measure(rng)? as u64;
    Ok(PhaseRunOutcome::new(lambda_int, raw, n))
}

/// `shots` independent runs; shot `i` uses stream `i` of `seed`.
pub fn randomized_pe(
    channel: &Channel,
    theta: f64,
    shots: usize,
    seed: u64,
) -> Result<Vec<PhaseRunOutcome>> {
    randomized_pe_with_offset(channel, theta, shots, Offset::Uniform, seed)
}

pub fn randomized_pe_with_offset(
    channel: &Channel,
    theta: f64,
    shots: usize,
    offset: Offset,
    seed: u64,
) -> Result<Vec<PhaseRunOutcome>> {
    check_theta(theta)?;
    if shots == 0 {
        return Err(Error::range("shots", "need at least one shot"));
    }
    let seeds = SeedStream::new(seed);
    (0..shots as u64)
        .into_par_iter()
        .map(|i| run_pe_once_with_offset(channel, theta, offset, &mut seeds.shot(i)))
        .collect()
}

/// Circular distance between two points of `[0, 1)`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// True iff `corrected/2ⁿ` lies within `K/2ⁿ` of `θ` on the unit circle.
pub fn good_outcome(corrected: u64, theta: f64, window: u64, n: usize) -> bool {
    let dim = (1u64 << n) as f64;
    circular_distance(theta, corrected as f64 / dim) <= window as f64 / dim
}

/// The `2K` integers `k* − K + 1, …, k* + K` (mod `N`) around `Nθ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub window: u64,
    pub k_star: u64,
    pub n: usize,
}

impl WindowSpec {
    pub fn new(n: usize, theta: f64, window: u64) -> Result<Self> {
        check_theta(theta)?;
        let dim = 1u64 << n;
        if window < 1 || 2 * window > dim {
            return Err(Error::range(
                "K",
                format!("need 2 <= 2K <= N, got K = {window}"),
            ));
        }
        let (k_star, _) = crate::bounds::split_phase(dim, theta);
        Ok(Self { window, k_star, n })
    }

    pub fn members(&self) -> Vec<u64> {
        let dim = 1u64 << self.n;
        (0..2 * self.window)
            .map(|i| (self.k_star + dim + i + 1 - self.window) % dim)
            .collect()
    }

    pub fn contains(&self, k: u64) -> bool {
        let dim = 1u64 << self.n;
        let rel = (k + dim - self.k_star % dim) % dim;
        rel <= self.window || rel >= dim + 1 - self.window
    }
}

/// Point of `values` minimizing the summed circular distance to all of
/// them; ties go to the smaller value.
pub fn circular_median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput("median of no samples"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let cost = |c: f64| compensated_sum(values.iter().map(|&v| circular_distance(c, v)));
    let mut best = (sorted[0], cost(sorted[0]));
    for &c in &sorted[1..] {
        let v = cost(c);
        if v < best.1 {
            best = (c, v);
        }
    }
    Ok(best.0)
}

/// Circular median of the corrected estimates `corrected/2ⁿ`.
pub fn median_phase_estimate(outcomes: &[PhaseRunOutcome], n: usize) -> Result<f64> {
    let values: Vec<f64> = outcomes.iter().map(|o| o.estimate(n)).collect();
    circular_median(&values)
}

/// `2|S|η + 2(1 − |S|η)·tail` with `|S| = 2K`: the bad-outcome bound for a
/// known window tail `tail = |α_ρ|²`.
pub fn bad_outcome_bound_with_tail(window: u64, eta: f64, tail: f64) -> Result<f64> {
    if window < 1 {
        return Err(Error::range("K", "need K >= 1"));
    }
    if eta.is_nan() || eta < 0.0 {
        return Err(Error::range("eta", format!("{eta} < 0")));
    }
    if !(0.0..=1.0).contains(&tail) {
        return Err(Error::range("tail", format!("{tail} not in [0, 1]")));
    }
    let s = 2.0 * window as f64;
    Ok(2.0 * s * eta + 2.0 * (1.0 - s * eta) * tail)
}

/// `4Kη + (1/2 − Kη)(1/K + 1/(K−1))`: probability of an outcome more than
/// `K/N` from `θ` for a channel of average infidelity `η`, any `θ`.
pub fn bad_outcome_bound(window: u64, eta: f64) -> Result<f64> {
    if window < 2 {
        return Err(Error::range("K", format!("need K >= 2, got {window}")));
    }
    let k = window as f64;
    if eta.is_nan() || eta < 0.0 || k * eta > 0.5 {
        return Err(Error::range(
            "eta",
            format!("need 0 <= Kη <= 1/2, got η = {eta}"),
        ));
    }
    Ok(4.0 * k * eta + (0.5 - k * eta) * (1.0 / k + 1.0 / (k - 1.0)))
}

/// Distribution of corrected outcomes for a fixed offset, computed from
/// the channel's exact output distribution.
pub fn corrected_distribution(channel: &Channel, theta: f64, lambda_int: u64) -> Result<Vec<f64>> {
    check_theta(theta)?;
    let n = channel.num_qubits();
    let dim = 1usize << n;
    let lambda = (lambda_int % dim as u64) as usize;
    let input = prepare_phase_state(n, shifted_phase(theta, lambda as u64, n))?;
    let raw = channel.output_distribution(&input)?;
    Ok((0..dim).map(|c| raw[(c + lambda) % dim]).collect())
}

/// Exact probability, averaged over all `N` offsets, that the corrected
/// outcome fails `accept`.
pub fn exact_rejection_probability<F>(channel: &Channel, theta: f64, accept: F) -> Result<f64>
where
    F: Fn(u64) -> bool + Sync,
{
    let dim = 1u64 << channel.num_qubits();
    let per_offset: Vec<f64> = (0..dim)
        .into_par_iter()
        .map(|l| {
            let dist = corrected_distribution(channel, theta, l)?;
            Ok(compensated_sum(
                dist.iter()
                    .enumerate()
                    .filter(|(c, _)| !accept(*c as u64))
                    .map(|(_, p)| *p),
            ))
        })
        .collect::<Result<_>>()?;
    Ok(compensated_sum(per_offset) / dim as f64)
}

/// Exact failure probability of randomized phase estimation for the
/// `n`-bit phase `k/N`.
pub fn exact_failure_probability(channel: &Channel, k: u64) -> Result<f64> {
    let n = channel.num_qubits();
    let dim = 1u64 << n;
    if k >= dim {
        return Err(Error::range("k", format!("{k} >= {dim}")));
    }
    exact_rejection_probability(channel, k as f64 / dim as f64, |c| c == k)
}

/// Exact probability of an outcome farther than `K/N` from `θ`.
pub fn exact_bad_outcome_probability(channel: &Channel, theta: f64, window: u64) -> Result<f64> {
    let n = channel.num_qubits();
    exact_rejection_probability(channel, theta, |c| good_outcome(c, theta, window, n))
}

fn small_support_matrix(beta: &[Complex64]) -> Result<DMatrix<Complex64>> {
    const MAX_SUPPORT: usize = 64;
    if beta.is_empty() {
        return Err(Error::EmptyInput("coefficient vector"));
    }
    if beta.len() > MAX_SUPPORT {
        return Err(Error::TooLarge {
            path: "small-support psd check",
            n: beta.len(),
            cap: MAX_SUPPORT,
        });
    }
    let t = beta.len() as f64;
    Ok(DMatrix::from_fn(beta.len(), beta.len(), |i, j| {
        let diag = if i == j { t * beta[i].norm_sqr() } else { 0.0 };
        Complex64::new(diag, 0.0) - beta[i] * beta[j].conj()
    }))
}

/// Smallest eigenvalue of `|T|·Σ_j |β_j|²|j⟩⟨j| − |ψ⟩⟨ψ|` for
/// `|ψ⟩ = Σ_j β_j|j⟩` on a support of size `|T| ≤ 64`.
pub fn small_support_min_eigenvalue(beta: &[Complex64]) -> Result<f64> {
    Ok(min_eigenvalue_hermitian(small_support_matrix(beta)?))
}

/// Checks `|ψ⟩⟨ψ| ⪯ |T|·Σ_j |β_j|²|j⟩⟨j|`. The eigenvalue tolerance is
/// `1e-10` times `max(1, |T|·Σ|β_j|²)`, so unnormalized inputs are judged
/// on the same relative scale.
pub fn small_support_psd_check(beta: &[Complex64]) -> Result<bool> {
    let scale = (beta.len() as f64 * beta.iter().map(|b| b.norm_sqr()).sum::<f64>()).max(1.0);
    Ok(small_support_min_eigenvalue(beta)? >= -PSD_TOL * scale)
}

/// `⟨φ|ψ⟩⟨ψ|φ⟩ / ⟨φ|M|φ⟩` for `|φ⟩ ∝ Σ_j (1/β_j*)|j⟩`, which attains 1
/// whenever every `β_j` is nonzero: the factor `|T|` cannot be lowered.
pub fn small_support_tightness_ratio(beta: &[Complex64]) -> Result<f64> {
    if beta.is_empty() {
        return Err(Error::EmptyInput("coefficient vector"));
    }
    if beta.iter().any(|b| b.norm_sqr() == 0.0) {
        return Err(Error::range(
            "beta",
            "tightness witness needs nonzero coefficients",
        ));
    }
    let t = beta.len() as f64;
    let phi: Vec<Complex64> = beta.iter().map(|b| b.conj().inv()).collect();
    let overlap: Complex64 = phi.iter().zip(beta).map(|(p, b)| p.conj() * b).sum();
    let m_expect: f64 = phi
        .iter()
        .zip(beta)
        .map(|(p, b)| t * b.norm_sqr() * p.norm_sqr())
        .sum();
    Ok(overlap.norm_sqr() / m_expect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn corrected_wraps_modulo_n() {
        let o = PhaseRunOutcome::new(5, 2, 3);
        assert_eq!(o.corrected, 5);
        assert_eq!(PhaseRunOutcome::new(0, 7, 3).corrected, 7);
    }

    #[test]
    fn perfect_channel_recovers_exact_phase_for_every_offset() {
        let ch = Channel::perfect(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for l in 0..16 {
            let o = run_pe_once_with_offset(&ch, 13.0 / 16.0, Offset::Pinned(l), &mut rng).unwrap();
            assert_eq!(o.corrected, 13);
            assert_eq!(o.lambda_int, l);
        }
        let runs = randomized_pe(&ch, 13.0 / 16.0, 100, 9).unwrap();
        assert!(runs.iter().all(|o| o.corrected == 13));
        assert!(runs.iter().any(|o| o.lambda_int != runs[0].lambda_int));
    }

    #[test]
    fn pinned_offset_hits_the_corrupted_state() {
        let k = 9;
        let ch = Channel::corruptor(4, [(k, 0)]).unwrap();
        let runs =
            randomized_pe_with_offset(&ch, k as f64 / 16.0, 50, Offset::Pinned(0), 1).unwrap();
        assert!(runs.iter().all(|o| o.corrected != k as u64));
    }

    #[test]
    fn good_outcome_examples() {
        assert!(good_outcome(7, 7.0 / 1024.0, 1, 10));
        assert!(good_outcome(1023, 0.0005, 2, 10));
        let k_star = 300u64;
        let theta = (k_star as f64 + 0.5) / 1024.0;
        assert!(!good_outcome(k_star + 3, theta, 2, 10));
        assert!(good_outcome(k_star + 2, theta, 2, 10));
        assert!(good_outcome(k_star - 1, theta, 2, 10));
        assert!(!good_outcome(k_star - 2, theta, 2, 10));
    }

    #[test]
    fn window_members() {
        let w = WindowSpec::new(4, 0.5 / 16.0, 2).unwrap();
        assert_eq!(w.members(), vec![15, 0, 1, 2]);
        for k in 0..16 {
            assert_eq!(w.contains(k), w.members().contains(&k), "{k}");
        }
        assert!(WindowSpec::new(2, 0.1, 3).is_err());
    }

    #[test]
    fn window_members_are_good_outcomes() {
        for &x in &[0.1, 0.25, 0.5, 0.9] {
            let theta = (77.0 + x) / 256.0;
            let w = WindowSpec::new(8, theta, 3).unwrap();
            for k in 0..256 {
                assert_eq!(w.contains(k), good_outcome(k, theta, 3, 8), "x={x} k={k}");
            }
        }
    }

    #[test]
    fn median_examples() {
        let n = 6;
        let same: Vec<_> = (0..5).map(|l| PhaseRunOutcome::new(l, 17 + l, n)).collect();
        assert_eq!(median_phase_estimate(&same, n).unwrap(), 17.0 / 64.0);
        let mixed = [20, 20, 21, 50].map(|c| PhaseRunOutcome::new(0, c, n));
        assert_eq!(median_phase_estimate(&mixed, n).unwrap(), 20.0 / 64.0);
        assert!(median_phase_estimate(&[], n).is_err());
        // Across the wrap point.
        assert_eq!(
            circular_median(&[0.98, 0.99, 0.01, 0.5, 0.995]).unwrap(),
            0.99
        );
        // Ties go to the smaller value.
        assert_eq!(circular_median(&[0.2, 0.3]).unwrap(), 0.2);
    }

    #[test]
    fn closed_form_bound_examples() {
        let b = bad_outcome_bound(4, 0.015).unwrap();
        assert!((b - 0.496_666_666_666_666_7).abs() < 1e-12);
        assert!(b < 0.497);
        assert!((bad_outcome_bound(2, 0.0).unwrap() - 0.75).abs() < 1e-15);
        assert!(bad_outcome_bound(1, 0.01).is_err());
        assert!(bad_outcome_bound(4, 0.2).is_err());
        let sharp = bad_outcome_bound_with_tail(2, 0.041, 0.099).unwrap();
        assert!((sharp - 0.493_528).abs() < 1e-12);
        assert!(sharp < 0.5);
        assert!((bad_outcome_bound_with_tail(2, 0.0, 0.099).unwrap() - 0.198).abs() < 1e-12);
    }

    #[test]
    fn closed_form_is_tail_form_at_proven_tail() {
        for k in 2..8u64 {
            for &eta in &[0.0, 0.01, 0.03] {
                let tail = crate::bounds::tail_bound_rigorous_uniform(k).unwrap();
                let a = bad_outcome_bound(k, eta).unwrap();
                let b = bad_outcome_bound_with_tail(k, eta, tail).unwrap();
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn psd_check_examples() {
        let one = [Complex64::new(0.3, -0.4)];
        assert!(small_support_psd_check(&one).unwrap());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let pair = [Complex64::new(h, 0.0), Complex64::new(h, 0.0)];
        assert!(small_support_psd_check(&pair).unwrap());
        // M − ψψ† = [[1/2, −1/2], [−1/2, 1/2]] has eigenvalues {0, 1}.
        assert!(small_support_min_eigenvalue(&pair).unwrap().abs() < 1e-15);
        assert!(small_support_psd_check(&vec![Complex64::new(1.0, 0.0); 65]).is_err());
        assert!(small_support_psd_check(&[]).is_err());
    }

    #[test]
    fn tightness_witness() {
        let beta = [
            Complex64::new(0.5, 0.1),
            Complex64::new(-0.2, 0.7),
            Complex64::new(0.05, -0.3),
        ];
        assert!((small_support_tightness_ratio(&beta).unwrap() - 1.0).abs() < 1e-12);
        assert!(small_support_tightness_ratio(&[Complex64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn exact_failure_of_perfect_channel_is_zero() {
        let ch = Channel::perfect(5).unwrap();
        assert!(exact_failure_probability(&ch, 11).unwrap() < 1e-12);
    }
}
