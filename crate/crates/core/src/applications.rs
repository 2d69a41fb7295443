//! Period finding and amplitude estimation driven by randomized phase
//! estimation through a possibly faulty inverse QFT.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::phase_estimation::{circular_median, run_pe_once, PhaseRunOutcome};
use crate::seed::SeedStream;
use crate::state::{cis_turns, sample_index, StateVector};

/// Largest register for which Fourier coefficients of a periodic state are
/// tabulated.
pub const MAX_PERIODIC_QUBITS: usize = 14;

/// `|π_s⟩ = (1/√p) Σ_{z<p} |s + zr⟩` on `N = 2ⁿ` basis states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicStateSpec {
    pub n: usize,
    pub period: u64,
    pub offset: u64,
}

impl PeriodicStateSpec {
    pub fn new(n: usize, period: u64, offset: u64) -> Result<Self> {
        if n == 0 || n > MAX_PERIODIC_QUBITS {
            return Err(Error::range(
                "n",
                format!("{n} not in 1..={MAX_PERIODIC_QUBITS}"),
            ));
        }
        let dim = 1u64 << n;
        if period == 0 || period >= dim {
            return Err(Error::range(
                "r",
                format!("need 1 <= r < N, got r = {period}, N = {dim}"),
            ));
        }
        if offset >= period {
            return Err(Error::range(
                "s",
                format!("need 0 <= s < r, got s = {offset}"),
            ));
        }
        Ok(Self { n, period, offset })
    }

    pub fn dim(&self) -> u64 {
        1u64 << self.n
    }

    /// Number of basis states in the superposition, `⌈(N − s)/r⌉`.
    pub fn count(&self) -> u64 {
        (self.dim() - self.offset).div_ceil(self.period)
    }
}

pub fn periodic_state(spec: &PeriodicStateSpec) -> Result<StateVector> {
    let dim = spec.dim() as usize;
    let amp = Complex64::new((spec.count() as f64).sqrt().recip(), 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    for z in 0..spec.count() {
        amps[(spec.offset + z * spec.period) as usize] = amp;
    }
    StateVector::from_amplitudes(amps)
}

/// `α_j = ω^{js}/√(pN) · Σ_{z<p} ω^{jzr}`, with the geometric sum in closed
/// form.
pub fn fourier_coefficients_periodic(spec: &PeriodicStateSpec) -> Vec<Complex64> {
    let dim = spec.dim();
    let p = spec.count();
    let norm = ((p * dim) as f64).sqrt().recip();
    let turns = |e: u64| (e % dim) as f64 / dim as f64;
    (0..dim)
        .map(|j| {
            let step = (j as u128 * spec.period as u128 % dim as u128) as u64;
            let geometric = if step == 0 {
                Complex64::new(p as f64, 0.0)
            } else {
                let full = (step as u128 * p as u128 % dim as u128) as u64;
                (Complex64::new(1.0, 0.0) - cis_turns(turns(full)))
                    / (Complex64::new(1.0, 0.0) - cis_turns(turns(step)))
            };
            let lead = (j as u128 * spec.offset as u128 % dim as u128) as u64;
            cis_turns(turns(lead)) * geometric * norm
        })
        .collect()
}

/// Convergents `c/r′` of `j/N` in lowest terms, ending at `j/N` itself.
pub fn continued_fraction_convergents(j: u64, dim: u64) -> Result<Vec<(u64, u64)>> {
    if dim == 0 || j >= dim {
        return Err(Error::range(
            "j",
            format!("need 0 <= j < N, got j = {j}, N = {dim}"),
        ));
    }
    let (mut num, mut den) = (j, dim);
    let (mut h_prev, mut h) = (0u64, 1u64);
    let (mut k_prev, mut k) = (1u64, 0u64);
    let mut out = Vec::new();
    loop {
        let a = num / den;
        (h_prev, h) = (h, a * h + h_prev);
        (k_prev, k) = (k, a * k + k_prev);
        out.push((h, k));
        let rem = num - a * den;
        if rem == 0 {
            break;
        }
        (num, den) = (den, rem);
    }
    Ok(out)
}

/// True iff `|j − cN/r| < 1` for some integer `c`.
pub fn near_multiple(j: u64, dim: u64, period: u64) -> bool {
    let jr = j as u128 * period as u128;
    let (dim, period) = (dim as u128, period as u128);
    let c = jr / dim;
    [c, c + 1].iter().any(|&c| jr.abs_diff(c * dim) < period)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodFindingResult {
    /// Eigenphase numerator drawn from the periodic state's spectrum.
    pub eigen_j: u64,
    pub outcome: PhaseRunOutcome,
    /// Corrected phase-estimation outcome `j`.
    pub outcome_j: u64,
    pub candidate_period: Option<u64>,
    pub convergents: Vec<(u64, u64)>,
    pub success: bool,
}

/// Closest convergent with denominator at most `bound` and within `1/(2N)`
/// of `j/N`; ties go to the smaller denominator.
pub fn select_period(j: u64, dim: u64, convergents: &[(u64, u64)], bound: u64) -> Option<u64> {
    let target = j as f64 / dim as f64;
    convergents
        .iter()
        .filter(|(_, r)| *r <= bound)
        .map(|&(c, r)| ((target - c as f64 / r as f64).abs(), r))
        .filter(|(d, _)| *d <= 0.5 / dim as f64 + 1e-15)
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, r)| r)
}

/// One period-finding attempt. The second register is treated as a mixture
/// of `+1 mod N` eigenstates: eigenphase `j/N` is drawn with probability
/// `|α_j|²` and estimated by randomized phase estimation through `channel`.
pub fn period_finding_run<R: Rng + ?Sized>(
    channel: &Channel,
    spec: &PeriodicStateSpec,
    period_bound: u64,
    rng: &mut R,
) -> Result<PeriodFindingResult> {
    let weights: Vec<f64> = fourier_coefficients_periodic(spec)
        .iter()
        .map(|a| a.norm_sqr())
        .collect();
    period_finding_from_weights(channel, spec, period_bound, &weights, rng)
}

fn period_finding_from_weights<R: Rng + ?Sized>(
    channel: &Channel,
    spec: &PeriodicStateSpec,
    period_bound: u64,
    weights: &[f64],
    rng: &mut R,
) -> Result<PeriodFindingResult> {
    if channel.num_qubits() != spec.n {
        return Err(Error::DimensionMismatch {
            expected: spec.n,
            actual: channel.num_qubits(),
        });
    }
    if period_bound < spec.period {
        return Err(Error::range(
            "R",
            format!("period bound {period_bound} below period {}", spec.period),
        ));
    }
    let dim = spec.dim();
    let total: f64 = weights.iter().sum();
    let eigen_j = sample_index(weights.iter().copied(), total, rng) as u64;
    let outcome = run_pe_once(channel, eigen_j as f64 / dim as f64, rng)?;
    let j = outcome.corrected;
    let convergents = continued_fraction_convergents(j, dim)?;
    let candidate_period = select_period(j, dim, &convergents, period_bound);
    Ok(PeriodFindingResult {
        eigen_j,
        outcome,
        outcome_j: j,
        candidate_period,
        success: candidate_period == Some(spec.period),
        convergents,
    })
}

/// `runs` independent attempts; run `i` uses stream `i` of `seed`.
pub fn period_finding(
    channel: &Channel,
    spec: &PeriodicStateSpec,
    period_bound: u64,
    runs: usize,
    seed: u64,
) -> Result<Vec<PeriodFindingResult>> {
    let weights: Vec<f64> = fourier_coefficients_periodic(spec)
        .iter()
        .map(|a| a.norm_sqr())
        .collect();
    let seeds = SeedStream::new(seed);
    (0..runs as u64)
        .into_par_iter()
        .map(|i| {
            period_finding_from_weights(channel, spec, period_bound, &weights, &mut seeds.shot(i))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeEstimate {
    /// `π ×` circular median of the folded samples.
    pub mu_hat: f64,
    /// Folded per-shot phase estimates, each in `[0, 1/2]`.
    pub samples: Vec<f64>,
}

/// Maps a phase estimate in `[1/2, 1)` to `1 − estimate`.
pub fn fold_phase(estimate: f64) -> f64 {
    if estimate >= 0.5 {
        1.0 - estimate
    } else {
        estimate
    }
}

/// Amplitude estimation of the angle `μ ∈ [0, π/2]`.
///
/// The Grover-type rotation `A R₀ A⁻¹ (I ⊗ Z)` acts on a 2-dimensional
/// subspace with eigenphases `±μ/π`. Each shot picks one eigenbranch with
/// probability 1/2, runs randomized phase estimation on it and folds the
/// estimate into `[0, 1/2]`.
pub fn amplitude_estimation(
    channel: &Channel,
    mu: f64,
    shots: usize,
    seed: u64,
) -> Result<AmplitudeEstimate> {
    if !(0.0..=PI / 2.0).contains(&mu) {
        return Err(Error::range("mu", format!("{mu} not in [0, π/2]")));
    }
    if shots == 0 {
        return Err(Error::range("shots", "need at least one shot"));
    }
    let n = channel.num_qubits();
    let phase = mu / PI;
    let mirrored = (1.0 - phase).rem_euclid(1.0);
    let seeds = SeedStream::new(seed);
    let samples: Vec<f64> = (0..shots as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeds.shot(i);
            let theta = if rng.random::<bool>() {
                phase
            } else {
                mirrored
            };
            let theta = if theta >= 1.0 { 0.0 } else { theta };
            let outcome = run_pe_once(channel, theta, &mut rng)?;
            Ok(fold_phase(outcome.estimate(n)))
        })
        .collect::<Result<_>>()?;
    Ok(AmplitudeEstimate {
        mu_hat: PI * circular_median(&samples)?,
        samples,
    })
}
