//! Dense-matrix routines for small registers.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::state::StateVector;

/// Largest register for which a circuit is expanded into a dense matrix.
pub const MAX_DENSE_QUBITS: usize = 10;

/// The `2ⁿ × 2ⁿ` unitary of a circuit, built column by column.
pub fn dense_unitary(circuit: &Circuit) -> Result<DMatrix<Complex64>> {
    let n = circuit.num_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooLarge {
            path: "dense matrix",
            n,
            cap: MAX_DENSE_QUBITS,
        });
    }
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let out = circuit.apply(&StateVector::basis(n, col)?)?;
        for (row, a) in out.amplitudes().iter().enumerate() {
            m[(row, col)] = *a;
        }
    }
    Ok(m)
}

/// Spectral norm `‖U₁ − U₂‖` of two circuits' unitaries.
pub fn operator_distance(c1: &Circuit, c2: &Circuit) -> Result<f64> {
    if c1.num_qubits() != c2.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: c1.num_qubits(),
            actual: c2.num_qubits(),
        });
    }
    let diff = dense_unitary(c1)? - dense_unitary(c2)?;
    Ok(spectral_norm(diff))
}

/// Largest singular value.
pub fn spectral_norm(m: DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue_hermitian(m: DMatrix<Complex64>) -> f64 {
    m.symmetric_eigenvalues().min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{qft_circuit, Gate};

    #[test]
    fn identical_circuits_have_zero_distance() {
        let c = qft_circuit(4).unwrap();
        assert!(operator_distance(&c, &c).unwrap() < 1e-10);
        let twice = c.inverse().inverse();
        assert!(operator_distance(&c, &twice).unwrap() < 1e-10);
    }

    #[test]
    fn z_versus_identity_has_distance_two() {
        let z = Circuit::new(
            1,
            vec![Gate::PhaseRot {
                target: 0,
                s: 1,
                adjoint: false,
            }],
        )
        .unwrap();
        let id = Circuit::identity(1).unwrap();
        assert!((operator_distance(&z, &id).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dense_path_is_capped() {
        let c = Circuit::identity(11).unwrap();
        assert!(matches!(dense_unitary(&c), Err(Error::TooLarge { .. })));
        let small = Circuit::identity(2).unwrap();
        assert!(operator_distance(&small, &Circuit::identity(3).unwrap()).is_err());
    }

    #[test]
    fn min_eigenvalue_of_diagonal() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(-0.5, 0.0),
        ]));
        assert!((min_eigenvalue_hermitian(m) + 0.5).abs() < 1e-14);
    }
}
