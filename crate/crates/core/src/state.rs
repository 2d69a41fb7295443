//! Dense pure-state simulation.
//!
//! Qubit 0 is the most significant bit of a basis-state index: in an
//! `n`-qubit register, qubit `q` is the bit with weight `2^(n-1-q)`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::tolerance::{MEASURE_NORM_GUARD, NORM_TOL};

/// Largest register the state-vector path accepts.
pub const MAX_QUBITS: usize = 24;

/// `e^{2πi·turns}`.
pub(crate) fn cis_turns(turns: f64) -> Complex64 {
    let t = turns.rem_euclid(1.0);
    Complex64::from_polar(1.0, std::f64::consts::TAU * t)
}

/// Dense amplitude vector of an `n`-qubit pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros basis state `|0…0⟩`.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_qubits(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::range("basis index", format!("{index} >= {dim}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    /// Wraps an explicit amplitude vector, which must have power-of-two
    /// length and unit norm.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "amplitude count {dim} is not a power of two >= 2"
            )));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        check_qubits(num_qubits)?;
        let s = Self { num_qubits, amps };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm² = {norm}, expected 1")));
        }
        Ok(s)
    }

    /// Builds a state from amplitudes that are normalized here.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::from_amplitudes(amps.into_iter().map(|a| a / norm).collect())
    }

    pub(crate) fn from_raw(num_qubits: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << num_qubits);
        Self { num_qubits, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// `2^n`.
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Outcome distribution of a computational-basis measurement.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same_dim(other.num_qubits)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr().min(1.0))
    }

    pub(crate) fn check_same_dim(&self, n: usize) -> Result<()> {
        if self.num_qubits != n {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                actual: n,
            });
        }
        Ok(())
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::InvalidGate(format!(
                "qubit {qubit} out of range for {} qubits",
                self.num_qubits
            )));
        }
        Ok(())
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::InvalidGate(format!("repeated qubit index {a}")));
        }
        Ok(())
    }

    /// Applies one gate in place.
    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        match *gate {
            Gate::Hadamard { target } => {
                self.check_qubit(target)?;
                let m = self.mask(target);
                for i in (0..self.amps.len()).filter(|i| i & m == 0) {
                    let a = self.amps[i];
                    let b = self.amps[i | m];
                    self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                    self.amps[i | m] = (a - b) * FRAC_1_SQRT_2;
                }
            }
            Gate::PauliX { target } => {
                self.check_qubit(target)?;
                let m = self.mask(target);
                for i in (0..self.amps.len()).filter(|i| i & m == 0) {
                    self.amps.swap(i, i | m);
                }
            }
            Gate::Swap { a, b } => {
                self.check_pair(a, b)?;
                let (ma, mb) = (self.mask(a), self.mask(b));
                for i in (0..self.amps.len()).filter(|i| i & ma != 0 && i & mb == 0) {
                    self.amps.swap(i, (i & !ma) | mb);
                }
            }
            Gate::PhaseRot { target, .. } | Gate::SingleQubitPhase { target, .. } => {
                self.check_qubit(target)?;
                if let Gate::PhaseRot { s: 0, .. } = gate {
                    return Err(Error::InvalidGate("PhaseRot requires s >= 1".into()));
                }
                let phase = cis_turns(gate.turns());
                let m = self.mask(target);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & m != 0 {
                        *a *= phase;
                    }
                }
            }
            Gate::ControlledPhaseRot {
                control, target, ..
            }
            | Gate::ControlledPhase {
                control, target, ..
            } => {
                self.check_pair(control, target)?;
                if let Gate::ControlledPhaseRot { s: 0, .. } = gate {
                    return Err(Error::InvalidGate(
                        "ControlledPhaseRot requires s >= 1".into(),
                    ));
                }
                let phase = cis_turns(gate.turns());
                let m = self.mask(control) | self.mask(target);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & m == m {
                        *a *= phase;
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies every gate of `circuit` in order.
    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        self.check_same_dim(circuit.num_qubits())?;
        for gate in circuit.gates() {
            self.apply_gate(gate)?;
        }
        Ok(())
    }

    /// Samples a computational-basis outcome with probability `|amp|²`.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > MEASURE_NORM_GUARD {
            return Err(Error::InvalidState(format!(
                "cannot measure a state with norm² = {norm}"
            )));
        }
        Ok(sample_index(
            self.amps.iter().map(|a| a.norm_sqr()),
            norm,
            rng,
        ))
    }
}

/// Draws an index from unnormalized non-negative weights summing to `total`.
pub(crate) fn sample_index<R, I>(weights: I, total: f64, rng: &mut R) -> usize
where
    R: Rng + ?Sized,
    I: IntoIterator<Item = f64>,
{
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (i, w) in weights.into_iter().enumerate() {
        if w > 0.0 {
            last_nonzero = i;
        }
        acc += w;
        if u < acc {
            return i;
        }
    }
    last_nonzero
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::range(
            "num_qubits",
            format!("{n} not in 1..={MAX_QUBITS}"),
        ));
    }
    Ok(())
}

/// Functional form of [`StateVector::apply_gate`].
pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply_gate(gate)?;
    Ok(out)
}

/// Computational-basis measurement.
pub fn measure_computational<R: Rng + ?Sized>(state: &StateVector, rng: &mut R) -> Result<usize> {
    state.measure(rng)
}

/// `|⟨a|b⟩|²`.
pub fn fidelity_pure(a: &StateVector, b: &StateVector) -> Result<f64> {
    a.fidelity(b)
}

/// Fourier basis state `F_N|k⟩`, prepared as a product of single-qubit
/// states: qubit `q` is put into `(|0⟩ + e^{2πi·k/2^(q+1)}|1⟩)/√2` by a
/// Hadamard followed by a single-qubit phase.
pub fn prepare_fourier_basis_state(n: usize, k: usize) -> Result<StateVector> {
    prepare_fourier_basis_state_truncated(n, k, None)
}

/// As [`prepare_fourier_basis_state`], optionally rounding every qubit phase
/// to `phase_bits` bits.
pub fn prepare_fourier_basis_state_truncated(
    n: usize,
    k: usize,
    phase_bits: Option<u32>,
) -> Result<StateVector> {
    check_qubits(n)?;
    if k >> n != 0 {
        return Err(Error::range("k", format!("{k} >= 2^{n}")));
    }
    let mut state = StateVector::zero(n)?;
    for q in 0..n {
        // k / 2^(q+1) mod 1, exactly: keep the low q+1 bits of k.
        let low = (k & ((1usize << (q + 1)) - 1)) as f64;
        let turns = low / (1u64 << (q + 1)) as f64;
        let turns = match phase_bits {
            Some(bits) => round_turns(turns, bits),
            None => turns,
        };
        state.apply_gate(&Gate::Hadamard { target: q })?;
        state.apply_gate(&Gate::SingleQubitPhase { target: q, turns })?;
    }
    Ok(state)
}

fn round_turns(turns: f64, bits: u32) -> f64 {
    let scale = 2f64.powi(bits as i32);
    ((turns * scale).round() / scale).rem_euclid(1.0)
}

/// `(1/√N) Σ_j e^{2πi·j·phase}|j⟩`.
pub fn prepare_phase_state(n: usize, phase: f64) -> Result<StateVector> {
    check_qubits(n)?;
    if !(0.0..1.0).contains(&phase) {
        return Err(Error::range("phase", format!("{phase} not in [0, 1)")));
    }
    let dim = 1usize << n;
    let scale = (dim as f64).sqrt().recip();
    let amps = (0..dim)
        .map(|j| cis_turns((j as f64 * phase).fract()) * scale)
        .collect();
    Ok(StateVector::from_raw(n, amps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &StateVector, b: &StateVector, tol: f64) -> bool {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .all(|(x, y)| (x - y).norm() < tol)
    }

    fn random_state(n: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1 << n)
            .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        StateVector::normalized(amps).unwrap()
    }

    #[test]
    fn hadamard_on_zero() {
        let s = apply_gate(
            &StateVector::zero(1).unwrap(),
            &Gate::Hadamard { target: 0 },
        )
        .unwrap();
        let plus = StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2, 0.0); 2]).unwrap();
        assert!(close(&s, &plus, 1e-15));
    }

    #[test]
    fn phase_rot_one_is_z() {
        let plus = StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2, 0.0); 2]).unwrap();
        let s = apply_gate(
            &plus,
            &Gate::PhaseRot {
                target: 0,
                s: 1,
                adjoint: false,
            },
        )
        .unwrap();
        let minus =
            StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)])
                .unwrap();
        assert!(close(&s, &minus, 1e-12));
    }

    #[test]
    fn swap_twice_is_identity() {
        let s = random_state(3, 1);
        let swap = Gate::Swap { a: 0, b: 2 };
        let t = apply_gate(&apply_gate(&s, &swap).unwrap(), &swap).unwrap();
        assert!(close(&s, &t, 1e-12));
        let once = apply_gate(&s, &swap).unwrap();
        // |001⟩ ↔ |100⟩
        assert_eq!(once.amplitudes()[4], s.amplitudes()[1]);
    }

    #[test]
    fn invalid_indices_rejected() {
        let mut s = StateVector::zero(2).unwrap();
        assert!(matches!(
            s.apply_gate(&Gate::Hadamard { target: 2 }),
            Err(Error::InvalidGate(_))
        ));
        assert!(matches!(
            s.apply_gate(&Gate::Swap { a: 1, b: 1 }),
            Err(Error::InvalidGate(_))
        ));
        assert!(matches!(
            s.apply_gate(&Gate::PhaseRot {
                target: 0,
                s: 0,
                adjoint: false
            }),
            Err(Error::InvalidGate(_))
        ));
    }

    #[test]
    fn fourier_basis_single_qubit() {
        let p = prepare_fourier_basis_state(1, 0).unwrap();
        assert!((p.amplitudes()[1] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        let m = prepare_fourier_basis_state(1, 1).unwrap();
        assert!((m.amplitudes()[1] - c(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!(prepare_fourier_basis_state(3, 8).is_err());
    }

    #[test]
    fn phase_state_uniform_at_zero() {
        let s = prepare_phase_state(2, 0.0).unwrap();
        assert!(s
            .amplitudes()
            .iter()
            .all(|a| (a - c(0.5, 0.0)).norm() < 1e-15));
        assert!(prepare_phase_state(2, 1.0).is_err());
    }

    #[test]
    fn phase_state_at_grid_point_matches_fourier_state() {
        let a = prepare_phase_state(3, 5.0 / 8.0).unwrap();
        let b = prepare_fourier_basis_state(3, 5).unwrap();
        assert!(close(&a, &b, 1e-12));
    }

    #[test]
    fn truncation_changes_fine_phases_only() {
        let exact = prepare_fourier_basis_state(6, 37).unwrap();
        let full = prepare_fourier_basis_state_truncated(6, 37, Some(6)).unwrap();
        assert!(close(&exact, &full, 1e-12));
        let coarse = prepare_fourier_basis_state_truncated(6, 37, Some(2)).unwrap();
        let f = exact.fidelity(&coarse).unwrap();
        assert!(f < 1.0 - 1e-6 && f > 0.0);
    }

    #[test]
    fn measurement_of_basis_state() {
        let s = StateVector::basis(3, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(s.measure(&mut rng).unwrap(), 5);
        }
    }

    #[test]
    fn measurement_frequency_of_plus_state() {
        // 10^5 shots; |freq − 1/2| ≤ 0.01 is a 6.3σ band (σ = 0.00158).
        let plus = prepare_phase_state(1, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let zeros = (0..100_000)
            .filter(|_| plus.measure(&mut rng).unwrap() == 0)
            .count();
        let f = zeros as f64 / 1e5;
        assert!((0.49..=0.51).contains(&f), "{f}");
    }

    #[test]
    fn measurement_is_deterministic_given_seed() {
        let s = random_state(4, 3);
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50)
                .map(|_| s.measure(&mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(run(9), run(9));
    }

    #[test]
    fn unnormalized_state_cannot_be_measured() {
        let s = StateVector::from_raw(1, vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(s.measure(&mut rng), Err(Error::InvalidState(_))));
    }

    #[test]
    fn fidelity_examples() {
        let zero = StateVector::basis(1, 0).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        let plus = prepare_phase_state(1, 0.0).unwrap();
        assert!((fidelity_pure(&zero, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fidelity_pure(&zero, &one).unwrap(), 0.0);
        assert!((fidelity_pure(&plus, &zero).unwrap() - 0.5).abs() < 1e-15);
        assert!(fidelity_pure(&zero, &StateVector::zero(2).unwrap()).is_err());
    }
}
