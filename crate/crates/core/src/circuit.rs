//! Gates, circuits and the (approximate) quantum Fourier transform.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{StateVector, MAX_QUBITS};

/// An elementary gate. Phases are fractions of a full turn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum Gate {
    Hadamard {
        target: usize,
    },
    PauliX {
        target: usize,
    },
    Swap {
        a: usize,
        b: usize,
    },
    /// `R_s = diag(1, e^{2πi/2^s})`, or its adjoint.
    PhaseRot {
        target: usize,
        s: u32,
        #[serde(default)]
        adjoint: bool,
    },
    /// `R_s` on `target`, controlled by `control`.
    ControlledPhaseRot {
        control: usize,
        target: usize,
        s: u32,
        #[serde(default)]
        adjoint: bool,
    },
    /// `diag(1, e^{2πi·turns})`.
    SingleQubitPhase {
        target: usize,
        turns: f64,
    },
    /// `diag(1, 1, 1, e^{2πi·turns})` on (control, target).
    ControlledPhase {
        control: usize,
        target: usize,
        turns: f64,
    },
}

impl Gate {
    /// Phase (in turns) applied to the `|1⟩` / `|11⟩` component, or 0 for
    /// non-diagonal gates.
    pub fn turns(&self) -> f64 {
        match *self {
            Gate::PhaseRot { s, adjoint, .. } | Gate::ControlledPhaseRot { s, adjoint, .. } => {
                let t = 0.5f64.powi(s as i32);
                if adjoint {
                    -t
                } else {
                    t
                }
            }
            Gate::SingleQubitPhase { turns, .. } | Gate::ControlledPhase { turns, .. } => turns,
            _ => 0.0,
        }
    }

    pub fn adjoint(&self) -> Gate {
        match *self {
            Gate::PhaseRot { target, s, adjoint } => Gate::PhaseRot {
                target,
                s,
                adjoint: !adjoint,
            },
            Gate::ControlledPhaseRot {
                control,
                target,
                s,
                adjoint,
            } => Gate::ControlledPhaseRot {
                control,
                target,
                s,
                adjoint: !adjoint,
            },
            Gate::SingleQubitPhase { target, turns } => Gate::SingleQubitPhase {
                target,
                turns: (-turns).rem_euclid(1.0),
            },
            Gate::ControlledPhase {
                control,
                target,
                turns,
            } => Gate::ControlledPhase {
                control,
                target,
                turns: -turns,
            },
            g => g,
        }
    }

    /// True for the rotation gates that truncation and gate noise act on.
    pub fn is_phase_rotation(&self) -> bool {
        matches!(
            self,
            Gate::PhaseRot { .. } | Gate::ControlledPhaseRot { .. } | Gate::ControlledPhase { .. }
        )
    }

    fn max_qubit(&self) -> usize {
        match *self {
            Gate::Hadamard { target }
            | Gate::PauliX { target }
            | Gate::PhaseRot { target, .. }
            | Gate::SingleQubitPhase { target, .. } => target,
            Gate::Swap { a, b } => a.max(b),
            Gate::ControlledPhaseRot {
                control, target, ..
            }
            | Gate::ControlledPhase {
                control, target, ..
            } => control.max(target),
        }
    }
}

/// An ordered gate list on a fixed register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitSpec", into = "CircuitSpec")]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        check_register(num_qubits, 1)?;
        if let Some(g) = gates.iter().find(|g| g.max_qubit() >= num_qubits) {
            return Err(Error::InvalidGate(format!(
                "{g:?} does not fit in {num_qubits} qubits"
            )));
        }
        Ok(Self { num_qubits, gates })
    }

    pub fn identity(num_qubits: usize) -> Result<Self> {
        Self::new(num_qubits, Vec::new())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// The adjoint circuit: gates reversed and individually inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    /// `self` followed by `next`.
    pub fn then(mut self, next: &Circuit) -> Result<Circuit> {
        if next.num_qubits != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                actual: next.num_qubits,
            });
        }
        self.gates.extend_from_slice(&next.gates);
        Ok(self)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if gate.max_qubit() >= self.num_qubits {
            return Err(Error::InvalidGate(format!(
                "{gate:?} does not fit in {} qubits",
                self.num_qubits
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Returns a new state `U|state⟩`.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let mut out = state.clone();
        out.apply_circuit(self)?;
        Ok(out)
    }
}

fn check_register(n: usize, min: usize) -> Result<()> {
    if n < min || n > MAX_QUBITS {
        return Err(Error::range(
            "num_qubits",
            format!("{n} not in {min}..={MAX_QUBITS}"),
        ));
    }
    Ok(())
}

/// The textbook `O(n²)` QFT circuit, ending in qubit-reversal swaps so that
/// its matrix is exactly `ω^{jk}/√N`.
pub fn qft_circuit(n: usize) -> Result<Circuit> {
    check_register(n, 1)?;
    build_qft(n, u32::MAX)
}

/// The exact inverse QFT `F_N⁻¹`.
pub fn inverse_qft_circuit(n: usize) -> Result<Circuit> {
    Ok(qft_circuit(n)?.inverse())
}

/// Coppersmith's approximate QFT: the exact circuit with every controlled
/// rotation `R_s` for `s > cutoff·log₂ n` removed.
pub fn approx_qft_circuit(n: usize, cutoff: f64) -> Result<Circuit> {
    check_register(n, 2)?;
    if !cutoff.is_finite() || cutoff <= 0.0 {
        return Err(Error::range("cutoff", format!("{cutoff} must be positive")));
    }
    let max_s = (cutoff * (n as f64).log2()).floor();
    let max_s = if max_s >= u32::MAX as f64 {
        u32::MAX
    } else {
        max_s as u32
    };
    build_qft(n, max_s)
}

/// Inverse of [`approx_qft_circuit`].
pub fn approx_inverse_qft_circuit(n: usize, cutoff: f64) -> Result<Circuit> {
    Ok(approx_qft_circuit(n, cutoff)?.inverse())
}

fn build_qft(n: usize, max_s: u32) -> Result<Circuit> {
    let mut gates = Vec::with_capacity(n * (n + 1) / 2 + n / 2);
    for target in 0..n {
        gates.push(Gate::Hadamard { target });
        for control in target + 1..n {
            let s = (control - target + 1) as u32;
            if s <= max_s {
                gates.push(Gate::ControlledPhaseRot {
                    control,
                    target,
                    s,
                    adjoint: false,
                });
            }
        }
    }
    for q in 0..n / 2 {
        gates.push(Gate::Swap { a: q, b: n - 1 - q });
    }
    Circuit::new(n, gates)
}

/// Serialized form of a circuit. Documents may name a standard circuit
/// instead of spelling out its gates; a [`Circuit`] always serializes as an
/// explicit gate list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CircuitSpec {
    Qft {
        n: usize,
    },
    InverseQft {
        n: usize,
    },
    ApproxQft {
        n: usize,
        cutoff: f64,
    },
    ApproxInverseQft {
        n: usize,
        cutoff: f64,
    },
    Gates {
        num_qubits: usize,
        gates: Vec<Gate>,
    },
    /// Parts applied left to right.
    Sequence {
        parts: Vec<CircuitSpec>,
    },
}

impl CircuitSpec {
    pub fn build(&self) -> Result<Circuit> {
        match self {
            CircuitSpec::Qft { n } => qft_circuit(*n),
            CircuitSpec::InverseQft { n } => inverse_qft_circuit(*n),
            CircuitSpec::ApproxQft { n, cutoff } => approx_qft_circuit(*n, *cutoff),
            CircuitSpec::ApproxInverseQft { n, cutoff } => approx_inverse_qft_circuit(*n, *cutoff),
            CircuitSpec::Gates { num_qubits, gates } => Circuit::new(*num_qubits, gates.clone()),
            CircuitSpec::Sequence { parts } => {
                let mut iter = parts.iter();
                let first = iter
                    .next()
                    .ok_or(Error::EmptyInput("circuit sequence"))?
                    .build()?;
                iter.try_fold(first, |acc, p| acc.then(&p.build()?))
            }
        }
    }
}

impl TryFrom<CircuitSpec> for Circuit {
    type Error = Error;

    fn try_from(spec: CircuitSpec) -> Result<Circuit> {
        spec.build()
    }
}

impl From<Circuit> for CircuitSpec {
    fn from(c: Circuit) -> CircuitSpec {
        CircuitSpec::Gates {
            num_qubits: c.num_qubits,
            gates: c.gates,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qft_one_qubit_is_hadamard() {
        let c = qft_circuit(1).unwrap();
        assert_eq!(c.gates(), &[Gate::Hadamard { target: 0 }]);
    }

    #[test]
    fn qft_gate_count_is_quadratic() {
        for n in 1..=12 {
            let c = qft_circuit(n).unwrap();
            assert_eq!(c.gate_count(), n * (n + 1) / 2 + n / 2);
        }
        assert!(qft_circuit(0).is_err());
        assert!(qft_circuit(MAX_QUBITS + 1).is_err());
        assert!(qft_circuit(20).is_ok());
    }

    #[test]
    fn huge_cutoff_keeps_everything() {
        assert_eq!(approx_qft_circuit(2, 1e6).unwrap(), qft_circuit(2).unwrap());
    }

    #[test]
    fn cutoff_drops_fine_rotations() {
        // 3·log₂10 ≈ 9.97, so only R_10 goes.
        let approx = approx_qft_circuit(10, 3.0).unwrap();
        assert_eq!(
            approx.gate_count() + 1,
            qft_circuit(10).unwrap().gate_count()
        );
        let approx = approx_qft_circuit(10, 1.0).unwrap();
        let max_s = approx
            .gates()
            .iter()
            .filter_map(|g| match g {
                Gate::ControlledPhaseRot { s, .. } => Some(*s),
                _ => None,
            })
            .max()
            .unwrap();
        assert_eq!(max_s, 3);
        assert!(approx_qft_circuit(1, 1.0).is_err());
        assert!(approx_qft_circuit(4, 0.0).is_err());
    }

    #[test]
    fn inverse_reverses_and_adjoints() {
        let c = qft_circuit(3).unwrap();
        let inv = c.inverse();
        assert_eq!(inv.gate_count(), c.gate_count());
        assert_eq!(inv.inverse(), c);
        assert_eq!(inv.gates().last(), Some(&Gate::Hadamard { target: 0 }));
    }

    #[test]
    fn gates_must_fit_register() {
        assert!(Circuit::new(2, vec![Gate::Hadamard { target: 2 }]).is_err());
        let mut c = Circuit::identity(2).unwrap();
        assert!(c.push(Gate::Swap { a: 0, b: 5 }).is_err());
    }

    #[test]
    fn spec_document_builds_named_circuits() {
        let spec: CircuitSpec =
            serde_json::from_str(r#"{"kind":"approx_inverse_qft","n":5,"cutoff":1.0}"#).unwrap();
        assert_eq!(
            spec.build().unwrap(),
            approx_inverse_qft_circuit(5, 1.0).unwrap()
        );

        let c: Circuit = serde_json::from_str(
            r#"{"kind":"sequence","parts":[{"kind":"inverse_qft","n":3},
                {"kind":"gates","num_qubits":3,"gates":[{"gate":"pauli_x","target":0}]}]}"#,
        )
        .unwrap();
        assert_eq!(
            c.gate_count(),
            inverse_qft_circuit(3).unwrap().gate_count() + 1
        );

        let text = serde_json::to_string(&c).unwrap();
        let back: Circuit = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }
}
