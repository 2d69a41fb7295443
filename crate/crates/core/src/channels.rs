//! Purported inverse-QFT implementations.
//!
//! Every channel is a stochastic mixture of pure-state maps: one call to
//! [`Channel::apply_shot`] draws one branch. Where the mixture is finite the
//! exact output distribution and per-Fourier-state infidelities are also
//! available.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{inverse_qft_circuit, Circuit, Gate};
use crate::error::{Error, Result};
use crate::numeric::compensated_mean;
use crate::seed::SeedStream;
use crate::state::{prepare_fourier_basis_state, sample_index, StateVector};
use crate::tolerance::PROBABILITY_SUM_TOL;

/// Largest register for exhaustive per-basis-state evaluation.
pub const MAX_EXACT_QUBITS: usize = 14;

/// A candidate implementation of `F_N⁻¹`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Channel {
    /// A fixed unitary.
    ExactUnitary { circuit: Circuit },
    /// A convex mixture of unitaries, one drawn per shot.
    StochasticMixture(Mixture),
    /// Perfect `F_N⁻¹` except on a set of Fourier basis states, which are
    /// sent to wrong computational basis states.
    AdversarialFourierCorruptor(FourierCorruptor),
    /// A template circuit whose rotation gates are independently dropped or
    /// over-rotated on every shot.
    PerGateNoise(GateNoise),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureBranch {
    pub probability: f64,
    pub circuit: Circuit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MixtureDoc", into = "MixtureDoc")]
pub struct Mixture {
    branches: Vec<MixtureBranch>,
}

#[derive(Serialize, Deserialize)]
struct MixtureDoc {
    branches: Vec<MixtureBranch>,
}

impl Mixture {
    pub fn new(branches: Vec<MixtureBranch>) -> Result<Self> {
        let first = branches
            .first()
            .ok_or(Error::EmptyInput("mixture branches"))?;
        let n = first.circuit.num_qubits();
        if let Some(b) = branches.iter().find(|b| b.circuit.num_qubits() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: b.circuit.num_qubits(),
            });
        }
        if branches.iter().any(|b| b.probability.is_nan() || b.probability < 0.0) {
            return Err(Error::InvalidChannel("negative branch probability".into()));
        }
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        if (total - 1.0).abs() > PROBABILITY_SUM_TOL {
            return Err(Error::InvalidChannel(format!(
                "branch probabilities sum to {total}"
            )));
        }
        Ok(Self { branches })
    }

    pub fn branches(&self) -> &[MixtureBranch] {
        &self.branches
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &Circuit {
        let i = sample_index(self.branches.iter().map(|b| b.probability), 1.0, rng);
        &self.branches[i].circuit
    }
}

impl TryFrom<MixtureDoc> for Mixture {
    type Error = Error;
    fn try_from(doc: MixtureDoc) -> Result<Self> {
        Mixture::new(doc.branches)
    }
}

impl From<Mixture> for MixtureDoc {
    fn from(m: Mixture) -> Self {
        MixtureDoc {
            branches: m.branches,
        }
    }
}

/// Sends `|k̂⟩ ↦ |remap(k)⟩` for every corrupted `k`, and acts as `F_N⁻¹`
/// elsewhere.
///
/// On a superposition the input is split by Fourier component into the good
/// subspace and one branch per corrupted `k`; a branch is then chosen with
/// probability equal to its squared norm. Coherence between branches is
/// discarded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CorruptorDoc", into = "CorruptorDoc")]
pub struct FourierCorruptor {
    num_qubits: usize,
    remap: BTreeMap<usize, usize>,
}

#[derive(Serialize, Deserialize)]
struct CorruptorDoc {
    num_qubits: usize,
    /// `[k, remap(k)]` pairs sorted by `k`.
    remap: Vec<(usize, usize)>,
}

impl FourierCorruptor {
    pub fn new(num_qubits: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if num_qubits == 0 || num_qubits > crate::state::MAX_QUBITS {
            return Err(Error::range("num_qubits", num_qubits.to_string()));
        }
        let dim = 1usize << num_qubits;
        let mut remap = BTreeMap::new();
        let mut targets = std::collections::BTreeSet::new();
        for (k, target) in pairs {
            if k >= dim || target >= dim {
                return Err(Error::InvalidChannel(format!(
                    "remap pair ({k}, {target}) outside [0, {dim})"
                )));
            }
            if k == target {
                return Err(Error::InvalidChannel(format!("remap fixes {k}")));
            }
            if remap.insert(k, target).is_some() {
                return Err(Error::InvalidChannel(format!("{k} remapped twice")));
            }
            if !targets.insert(target) {
                return Err(Error::InvalidChannel(format!(
                    "remap is not injective at target {target}"
                )));
            }
        }
        Ok(Self { num_qubits, remap })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn remap(&self) -> &BTreeMap<usize, usize> {
        &self.remap
    }

    pub fn is_bad(&self, k: usize) -> bool {
        self.remap.contains_key(&k)
    }

    fn fourier_components(&self, state: &StateVector) -> Result<Vec<Complex64>> {
        Ok(inverse_qft_circuit(self.num_qubits)?
            .apply(state)?
            .into_amplitudes())
    }

    fn apply_shot<R: Rng + ?Sized>(&self, state: &StateVector, rng: &mut R) -> Result<StateVector> {
        let mut coeffs = self.fourier_components(state)?;
        let good: f64 = coeffs
            .iter()
            .enumerate()
            .filter(|(k, _)| !self.is_bad(*k))
            .map(|(_, c)| c.norm_sqr())
            .sum();
        let bad: Vec<(usize, f64)> = self
            .remap
            .iter()
            .map(|(&k, &t)| (t, coeffs[k].norm_sqr()))
            .collect();
        let total = good + bad.iter().map(|(_, w)| w).sum::<f64>();
        let pick = sample_index(
            std::iter::once(good).chain(bad.iter().map(|(_, w)| *w)),
            total,
            rng,
        );
        if pick == 0 {
            for &k in self.remap.keys() {
                coeffs[k] = Complex64::new(0.0, 0.0);
            }
            StateVector::normalized(coeffs)
        } else {
            StateVector::basis(self.num_qubits, bad[pick - 1].0)
        }
    }

    fn output_distribution(&self, state: &StateVector) -> Result<Vec<f64>> {
        let coeffs = self.fourier_components(state)?;
        let mut probs: Vec<f64> = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| if self.is_bad(k) { 0.0 } else { c.norm_sqr() })
            .collect();
        for (&k, &t) in &self.remap {
            probs[t] += coeffs[k].norm_sqr();
        }
        Ok(probs)
    }
}

impl TryFrom<CorruptorDoc> for FourierCorruptor {
    type Error = Error;
    fn try_from(doc: CorruptorDoc) -> Result<Self> {
        FourierCorruptor::new(doc.num_qubits, doc.remap)
    }
}

impl From<FourierCorruptor> for CorruptorDoc {
    fn from(c: FourierCorruptor) -> Self {
        CorruptorDoc {
            num_qubits: c.num_qubits,
            remap: c.remap.into_iter().collect(),
        }
    }
}

/// Independent noise on each rotation gate of a template circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GateNoiseDoc", into = "GateNoiseDoc")]
pub struct GateNoise {
    template: Circuit,
    /// Standard deviation of the additive phase error, in turns.
    over_rotation_stddev: f64,
    drop_probability: f64,
}

#[derive(Serialize, Deserialize)]
struct GateNoiseDoc {
    template: Circuit,
    over_rotation_stddev: f64,
    drop_probability: f64,
}

impl GateNoise {
    pub fn new(
        template: Circuit,
        over_rotation_stddev: f64,
        drop_probability: f64,
    ) -> Result<Self> {
        if !over_rotation_stddev.is_finite() || over_rotation_stddev < 0.0 {
            return Err(Error::InvalidChannel(format!(
                "over_rotation_stddev {over_rotation_stddev} must be finite and >= 0"
            )));
        }
        if !(0.0..=1.0).contains(&drop_probability) {
            return Err(Error::InvalidChannel(format!(
                "drop_probability {drop_probability} not in [0, 1]"
            )));
        }
        Ok(Self {
            template,
            over_rotation_stddev,
            drop_probability,
        })
    }

    pub fn template(&self) -> &Circuit {
        &self.template
    }

    /// One noisy realization of the template.
    pub fn sample_circuit<R: Rng + ?Sized>(&self, rng: &mut R) -> Circuit {
        let normal = Normal::new(0.0, self.over_rotation_stddev).expect("validated stddev");
        let gates = self
            .template
            .gates()
            .iter()
            .filter_map(|g| {
                if !matches!(g, Gate::PhaseRot { .. } | Gate::ControlledPhaseRot { .. }) {
                    return Some(*g);
                }
                if rng.random::<f64>() < self.drop_probability {
                    return None;
                }
                let turns = g.turns() + normal.sample(rng);
                Some(match *g {
                    Gate::PhaseRot { target, .. } => Gate::SingleQubitPhase {
                        target,
                        turns: turns.rem_euclid(1.0),
                    },
                    Gate::ControlledPhaseRot {
                        control, target, ..
                    } => Gate::ControlledPhase {
                        control,
                        target,
                        turns,
                    },
                    _ => unreachable!(),
                })
            })
            .collect();
        Circuit::new(self.template.num_qubits(), gates).expect("template gates fit")
    }
}

impl TryFrom<GateNoiseDoc> for GateNoise {
    type Error = Error;
    fn try_from(d: GateNoiseDoc) -> Result<Self> {
        GateNoise::new(d.template, d.over_rotation_stddev, d.drop_probability)
    }
}

impl From<GateNoise> for GateNoiseDoc {
    fn from(g: GateNoise) -> Self {
        GateNoiseDoc {
            template: g.template,
            over_rotation_stddev: g.over_rotation_stddev,
            drop_probability: g.drop_probability,
        }
    }
}

impl Channel {
    /// The ideal inverse QFT.
    pub fn perfect(n: usize) -> Result<Channel> {
        Ok(Channel::ExactUnitary {
            circuit: inverse_qft_circuit(n)?,
        })
    }

    pub fn unitary(circuit: Circuit) -> Channel {
        Channel::ExactUnitary { circuit }
    }

    pub fn mixture(branches: impl IntoIterator<Item = (f64, Circuit)>) -> Result<Channel> {
        let branches = branches
            .into_iter()
            .map(|(probability, circuit)| MixtureBranch {
                probability,
                circuit,
            })
            .collect();
        Ok(Channel::StochasticMixture(Mixture::new(branches)?))
    }

    pub fn corruptor(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Channel> {
        Ok(Channel::AdversarialFourierCorruptor(FourierCorruptor::new(
            n, pairs,
        )?))
    }

    pub fn gate_noise(
        template: Circuit,
        over_rotation_stddev: f64,
        drop_probability: f64,
    ) -> Result<Channel> {
        Ok(Channel::PerGateNoise(GateNoise::new(
            template,
            over_rotation_stddev,
            drop_probability,
        )?))
    }

    pub fn from_json(text: &str) -> std::result::Result<Channel, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("channels always serialize")
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            Channel::ExactUnitary { circuit } => circuit.num_qubits(),
            Channel::StochasticMixture(m) => m.branches[0].circuit.num_qubits(),
            Channel::AdversarialFourierCorruptor(c) => c.num_qubits,
            Channel::PerGateNoise(g) => g.template.num_qubits(),
        }
    }

    fn check_input(&self, state: &StateVector) -> Result<()> {
        if state.num_qubits() != self.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits(),
                actual: state.num_qubits(),
            });
        }
        Ok(())
    }

    /// One sampled pure-state realization of the channel on `state`.
    pub fn apply_shot<R: Rng + ?Sized>(
        &self,
        state: &StateVector,
        rng: &mut R,
    ) -> Result<StateVector> {
        self.check_input(state)?;
        match self {
            Channel::ExactUnitary { circuit } => circuit.apply(state),
            Channel::StochasticMixture(m) => m.sample(rng).apply(state),
            Channel::AdversarialFourierCorruptor(c) => c.apply_shot(state, rng),
            Channel::PerGateNoise(g) => g.sample_circuit(rng).apply(state),
        }
    }

    /// Whether [`Channel::output_distribution`] is available.
    pub fn is_exact(&self) -> bool {
        !matches!(self, Channel::PerGateNoise(_))
    }

    /// Exact computational-basis outcome distribution of `C(|state⟩⟨state|)`.
    pub fn output_distribution(&self, state: &StateVector) -> Result<Vec<f64>> {
        self.check_input(state)?;
        match self {
            Channel::ExactUnitary { circuit } => Ok(circuit.apply(state)?.probabilities()),
            Channel::StochasticMixture(m) => {
                let mut acc = vec![0.0; state.dim()];
                for b in &m.branches {
                    let p = b.circuit.apply(state)?.probabilities();
                    for (a, q) in acc.iter_mut().zip(p) {
                        *a += b.probability * q;
                    }
                }
                Ok(acc)
            }
            Channel::AdversarialFourierCorruptor(c) => c.output_distribution(state),
            Channel::PerGateNoise(_) => Err(Error::InvalidChannel(
                "per-gate noise has no finite exact output distribution".into(),
            )),
        }
    }
}

/// `η_k = 1 − ⟨k|C(|k̂⟩)|k⟩` for every `k`, and their mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerBasisInfidelity {
    pub n: usize,
    pub eta_k: Vec<f64>,
    pub eta_avg: f64,
    /// Number of sampled noise realizations when the values are estimates.
    pub realizations: Option<usize>,
    /// Standard error of `eta_avg` across realizations, for estimates.
    pub eta_avg_std_err: Option<f64>,
}

impl PerBasisInfidelity {
    fn from_values(n: usize, eta_k: Vec<f64>, realizations: Option<usize>) -> Self {
        let eta_avg = compensated_mean(&eta_k);
        Self {
            n,
            eta_k,
            eta_avg,
            realizations,
            eta_avg_std_err: None,
        }
    }
}

/// Sampling budget for channels without an exact per-basis evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseBudget {
    /// Number of noisy circuit realizations averaged over.
    pub realizations: usize,
    pub seed: u64,
}

/// Per-Fourier-basis-state infidelities, over all `2ⁿ` basis states.
///
/// Exact for unitaries, mixtures and the corruptor. For per-gate noise the
/// values are averaged over `budget.realizations` sampled circuits (each
/// evaluated exactly on every `k`); `budget` is required in that case.
pub fn exact_per_basis_infidelity(
    channel: &Channel,
    budget: Option<NoiseBudget>,
) -> Result<PerBasisInfidelity> {
    let n = channel.num_qubits();
    if n > MAX_EXACT_QUBITS {
        return Err(Error::TooLarge {
            path: "exhaustive per-basis infidelity",
            n,
            cap: MAX_EXACT_QUBITS,
        });
    }
    let dim = 1usize << n;
    match channel {
        Channel::ExactUnitary { circuit } => Ok(PerBasisInfidelity::from_values(
            n,
            unitary_infidelities(circuit)?,
            None,
        )),
        Channel::StochasticMixture(m) => {
            let mut acc = vec![0.0; dim];
            for b in &m.branches {
                for (a, e) in acc.iter_mut().zip(unitary_infidelities(&b.circuit)?) {
                    *a += b.probability * e;
                }
            }
            Ok(PerBasisInfidelity::from_values(n, acc, None))
        }
        Channel::AdversarialFourierCorruptor(c) => Ok(PerBasisInfidelity::from_values(
            n,
            (0..dim)
                .map(|k| if c.is_bad(k) { 1.0 } else { 0.0 })
                .collect(),
            None,
        )),
        Channel::PerGateNoise(g) => {
            let budget = budget.ok_or_else(|| {
                Error::InvalidChannel("per-gate noise needs a realization budget".into())
            })?;
            if budget.realizations == 0 {
                return Err(Error::EmptyInput("noise realizations"));
            }
            let seeds = SeedStream::new(budget.seed);
            let mut acc = vec![0.0; dim];
            let mut means = Vec::with_capacity(budget.realizations);
            for r in 0..budget.realizations {
                let circuit = g.sample_circuit(&mut seeds.shot(r as u64));
                let eta = unitary_infidelities(&circuit)?;
                means.push(compensated_mean(&eta));
                for (a, e) in acc.iter_mut().zip(eta) {
                    *a += e;
                }
            }
            let count = budget.realizations as f64;
            acc.iter_mut().for_each(|a| *a /= count);
            let mut out = PerBasisInfidelity::from_values(n, acc, Some(budget.realizations));
            if budget.realizations > 1 {
                let var =
                    means.iter().map(|m| (m - out.eta_avg).powi(2)).sum::<f64>() / (count - 1.0);
                out.eta_avg_std_err = Some((var / count).sqrt());
            }
            Ok(out)
        }
    }
}

fn unitary_infidelities(circuit: &Circuit) -> Result<Vec<f64>> {
    let n = circuit.num_qubits();
    (0..1usize << n)
        .into_par_iter()
        .map(|k| {
            let out = circuit.apply(&prepare_fourier_basis_state(n, k)?)?;
            Ok((1.0 - out.amplitudes()[k].norm_sqr()).clamp(0.0, 1.0))
        })
        .collect()
}
