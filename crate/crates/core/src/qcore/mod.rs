//! Dense state algebra on registers of at most eight qubits.
//!
//! Qubit 0 is the most significant bit of a basis index; the protocol
//! modules number qubits from 1 in their docs and subtract one in code.

mod bell;
mod density;
mod matrix;
mod pauli;
mod state;

pub use bell::{bell_measure, bell_probabilities, bell_project, BellLabel};
pub use density::{min_eigenvalue, DensityMatrix, POSITIVITY_FLOOR};
pub use matrix::CMatrix;
pub use pauli::{Pauli, PauliString};
pub use state::{haar_state, haar_two_qubit, PureState, MAX_QUBITS};

pub(crate) use density::{conjugate_1q, conjugate_by_pauli};
pub(crate) use state::{apply_1q, bit_of, hadamard_gate, sample_index};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// States a Pauli string can act on.
pub trait PauliTarget: Sized {
    fn pauli_conjugated(&self, p: &PauliString) -> Result<Self>;
}

impl<T: Real> PauliTarget for PureState<T> {
    fn pauli_conjugated(&self, p: &PauliString) -> Result<Self> {
        self.apply_pauli(p)
    }
}

impl<T: Real> PauliTarget for DensityMatrix<T> {
    fn pauli_conjugated(&self, p: &PauliString) -> Result<Self> {
        self.apply_pauli(p)
    }
}

pub fn apply_pauli<S: PauliTarget>(state: &S, p: &PauliString) -> Result<S> {
    state.pauli_conjugated(p)
}

/// `<psi| rho |psi>`, clamped to `[0, 1]` when within tolerance of the ends.
pub fn fidelity<T: Real>(rho: &DensityMatrix<T>, psi: &PureState<T>) -> Result<T> {
    if rho.n() != psi.n() {
        return Err(Error::DimensionMismatch {
            expected: rho.n(),
            found: psi.n(),
        });
    }
    let f = rho.matrix().quadratic_form(psi.amplitudes()).re;
    let tol = T::tolerance();
    if f < -tol || f > T::one() + tol {
        return Err(Error::InvalidState(format!("fidelity {f} outside [0, 1]")));
    }
    Ok(f.max(T::zero()).min(T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fidelity_of_maximally_mixed_is_inverse_dimension() {
        let rho = DensityMatrix::<f64>::maximally_mixed(6).unwrap();
        let psi = PureState::plus(6).unwrap();
        assert!((fidelity(&rho, &psi).unwrap() - 1.0 / 64.0).abs() < 1e-15);
    }

    #[test]
    fn fidelity_rejects_size_mismatch() {
        let rho = DensityMatrix::<f64>::maximally_mixed(2).unwrap();
        assert!(fidelity(&rho, &PureState::plus(3).unwrap()).is_err());
    }

    #[test]
    fn apply_pauli_works_on_both_kinds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = haar_state::<f64, _>(2, &mut rng).unwrap();
        let p: PauliString = "XZ".parse().unwrap();
        let a = DensityMatrix::from_pure(&apply_pauli(&psi, &p).unwrap());
        let b = apply_pauli(&DensityMatrix::from_pure(&psi), &p).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-14);
        assert!(apply_pauli(&psi, &"XZZ".parse().unwrap()).is_err());
    }
}
