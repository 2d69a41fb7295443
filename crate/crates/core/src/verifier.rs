//! Average-infidelity test for a purported inverse QFT.
//!
//! Each round draws a uniformly random `k`, prepares the product state
//! `|k̂⟩`, runs the channel once and measures; the round fails when the
//! outcome is not `k`. The failure frequency is an unbiased estimate of the
//! average infidelity `η`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::seed::SeedStream;
use crate::state::prepare_fourier_basis_state;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorMode {
    /// `⌈ln(2/δ)/(2ε²)⌉` rounds.
    Fixed,
    /// Empirical-Bernstein early stopping, capped at the fixed budget.
    Sequential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfidelityEstimate {
    pub eta_hat: f64,
    pub shots: u64,
    pub epsilon: f64,
    pub delta: f64,
    pub failures: u64,
    pub seed: u64,
    pub mode: EstimatorMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Hoeffding round count `⌈ln(2/δ)/(2ε²)⌉` for additive error `ε` with
/// confidence `1 − δ`.
pub fn hoeffding_shots(epsilon: f64, delta: f64) -> Result<u64> {
    check_params(epsilon, delta)?;
    Ok(((2.0 / delta).ln() / (2.0 * epsilon * epsilon)).ceil() as u64)
}

fn check_params(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::range("epsilon", format!("{epsilon} not in (0, 1)")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::range("delta", format!("{delta} not in (0, 1)")));
    }
    Ok(())
}

/// Runs round `index` and reports whether it failed.
fn round_fails(channel: &Channel, seeds: &SeedStream, index: u64) -> Result<bool> {
    let n = channel.num_qubits();
    let mut rng = seeds.shot(index);
    let k = rng.random_range(0..1usize << n);
    let input = prepare_fourier_basis_state(n, k)?;
    let out = channel.apply_shot(&input, &mut rng)?;
    Ok(out.measure(&mut rng)? != k)
}

fn count_failures(
    channel: &Channel,
    seeds: &SeedStream,
    range: std::ops::Range<u64>,
) -> Result<u64> {
    range
        .into_par_iter()
        .map(|i| round_fails(channel, seeds, i).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Fixed-budget estimate of the average infidelity: `|η̂ − η| ≤ ε` with
/// probability at least `1 − δ`.
pub fn estimate_average_infidelity(
    channel: &Channel,
    epsilon: f64,
    delta: f64,
    seed: u64,
) -> Result<InfidelityEstimate> {
    let shots = hoeffding_shots(epsilon, delta)?;
    let failures = count_failures(channel, &SeedStream::new(seed), 0..shots)?;
    Ok(InfidelityEstimate {
        eta_hat: failures as f64 / shots as f64,
        shots,
        epsilon,
        delta,
        failures,
        seed,
        mode: EstimatorMode::Fixed,
    })
}

/// Deviation radius of the empirical-Bernstein bound (two-sided, level
/// `delta`) for `t` Bernoulli samples with `failures` ones.
fn bernstein_radius(t: u64, failures: u64, delta: f64) -> f64 {
    let tf = t as f64;
    let p = failures as f64 / tf;
    let var = p * (1.0 - p) * tf / (tf - 1.0);
    let l = (4.0 / delta).ln();
    (2.0 * var * l / tf).sqrt() + 7.0 * l / (3.0 * (tf - 1.0))
}

/// Sequential estimate that stops early when the observed failure rate is
/// small. Half of `δ` is spread over doubling checkpoints tested with an
/// empirical-Bernstein bound; the other half backs a Hoeffding-sized final
/// stage, so the run never exceeds `hoeffding_shots(ε, δ/2)` rounds.
pub fn estimate_average_infidelity_sequential(
    channel: &Channel,
    epsilon: f64,
    delta: f64,
    seed: u64,
) -> Result<InfidelityEstimate> {
    let cap = hoeffding_shots(epsilon, delta / 2.0)?;
    let seeds = SeedStream::new(seed);
    let mut t = 64.min(cap);
    let mut failures = count_failures(channel, &seeds, 0..t)?;
    let mut stage = 0i32;
    while t < cap {
        let delta_stage = delta / 2f64.powi(stage + 2);
        if t > 1 && bernstein_radius(t, failures, delta_stage) <= epsilon {
            break;
        }
        let next = (t * 2).min(cap);
        failures += count_failures(channel, &seeds, t..next)?;
        t = next;
        stage += 1;
    }
    Ok(InfidelityEstimate {
        eta_hat: failures as f64 / t as f64,
        shots: t,
        epsilon,
        delta,
        failures,
        seed,
        mode: EstimatorMode::Sequential,
    })
}

/// PASS iff `η̂ + ε ≤ threshold`.
pub fn verdict(estimate: &InfidelityEstimate, threshold_eta: f64) -> Verdict {
    if estimate.eta_hat + estimate.epsilon <= threshold_eta {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}
