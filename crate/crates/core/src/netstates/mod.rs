//! Multi-node entangled states built from flying-cat checks: GHZ
//! preparation, the six-qubit tetrahedron state with its syndrome decoder,
//! and the two-setting stabilizer witness.
//!
//! Docs number qubits from 1 as in the stabilizer lists; code indices are
//! one lower.

mod ghz;
mod tetra;
mod witness;

pub use ghz::{ghz_checks, ghz_fidelity_sampled, ghz_state, prepare_ghz, GhzPrediction};
pub use tetra::{
    stabilizers, tetra_checks, tetra_decode, tetra_fidelity_sampled, tetra_prepare, tetra_prepare_exact,
    tetra_prepare_sampled, tetra_target, DecoderTable, ErrorKind, TetraConfig, TetraExact, TetraSyndrome,
};
pub use witness::{witness_expectation, witness_noisy_model, WitnessEstimate, WitnessMode};

use crate::error::{Error, Result};
use crate::montecarlo::PlacedCheck;
use crate::paritycheck::{CheckKernel, Parity};
use crate::qcore::{fidelity, CMatrix, DensityMatrix, PureState};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Average over every inferred-outcome branch.
    Exact,
    /// One sampled trajectory.
    Sampled,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PreparedState<T> {
    Mixed(DensityMatrix<T>),
    Pure(PureState<T>),
}

impl<T: Real> PreparedState<T> {
    pub fn fidelity(&self, target: &PureState<T>) -> Result<T> {
        match self {
            PreparedState::Mixed(rho) => fidelity(rho, target),
            PreparedState::Pure(psi) => target.overlap_sqr(psi),
        }
    }

    pub fn to_density(&self) -> DensityMatrix<T> {
        match self {
            PreparedState::Mixed(rho) => rho.clone(),
            PreparedState::Pure(psi) => DensityMatrix::from_pure(psi),
        }
    }
}

/// Unnormalized state of one inferred-outcome branch; its trace is the
/// branch probability.
#[derive(Debug, Clone)]
pub(crate) struct Branch<T> {
    pub m: CMatrix<T>,
    pub outcomes: Vec<Parity>,
}

/// Splits `start` over every inferred outcome of the checks in order.
/// Branches whose probability underflows are dropped.
pub(crate) fn enumerate_branches<T: Real>(start: &DensityMatrix<T>, checks: &[PlacedCheck<T>]) -> Result<Vec<Branch<T>>> {
    let kernels = checks
        .iter()
        .map(|c| CheckKernel::new(&c.config, start.n(), &c.qubits))
        .collect::<Result<Vec<_>>>()?;
    let mut branches = vec![Branch {
        m: start.matrix().clone(),
        outcomes: Vec::new(),
    }];
    for kernel in &kernels {
        let mut next = Vec::with_capacity(branches.len() * 2);
        for b in &branches {
            for mu in Parity::BOTH {
                let m = kernel.branch(&b.m, mu);
                if m.trace().re > T::min_positive_value() {
                    let mut outcomes = b.outcomes.clone();
                    outcomes.push(mu);
                    next.push(Branch { m, outcomes });
                }
            }
        }
        branches = next;
    }
    if branches.is_empty() {
        return Err(Error::ZeroProbability);
    }
    Ok(branches)
}

/// Mean and standard error of `f(shot)` over `shots` seeded trajectories.
pub(crate) fn sampled_mean<F>(seed: u64, shots: usize, f: F) -> Result<(f64, f64)>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<f64> + Sync,
{
    if shots < 2 {
        return Err(crate::error::invalid("shots", "need at least two shots for an error bar"));
    }
    let (sum, sq) = crate::rng::fold_shots(
        seed,
        shots,
        || Ok((0.0, 0.0)),
        |acc: &mut Result<(f64, f64)>, _, rng| {
            if let Ok((s, q)) = acc {
                match f(rng) {
                    Ok(v) => {
                        *s += v;
                        *q += v * v;
                    }
                    Err(e) => *acc = Err(e),
                }
            }
        },
        |a, b| {
            let (a, b) = (a?, b?);
            Ok((a.0 + b.0, a.1 + b.1))
        },
    )?;
    let n = shots as f64;
    let mean = sum / n;
    let var = (sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}
