//! Flying-cat parity checks: a coherent pulse picks up a pi phase per
//! excited qubit, loses photons to a beam-splitter cascade between
//! interactions, and is read out by homodyne detection.

mod budget;
mod inference;
mod kernel;
mod repeated;

use std::fmt;

pub use budget::{error_budget, optimize_alpha, ErrorBudget, Optimum};
pub use inference::{conditional_post_state, thresholded_inference, InferredBranch, ThresholdedInference};
pub use kernel::{overlap_integrals, CheckKernel};
pub use repeated::{repeated_decision, DecisionMode, RepeatedDecision};

use crate::error::{invalid, Error, Result};
use crate::field::{propagate_losses, CoherentAmplitude, LossProfile};
use crate::qcore::{conjugate_by_pauli, CMatrix, DensityMatrix, Pauli, PauliString};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    pub fn pauli(self) -> Pauli {
        match self {
            Basis::Z => Pauli::Z,
            Basis::X => Pauli::X,
        }
    }
}

/// Eigenvalue of the checked Pauli product. `Even` is `+1` and sends the
/// pulse to `+abar`; `Odd` sends it to `-abar`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub const BOTH: [Parity; 2] = [Parity::Even, Parity::Odd];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn sign<T: Real>(self) -> T {
        match self {
            Parity::Even => T::one(),
            Parity::Odd => -T::one(),
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    /// Threshold decision; `x = 0` reads as even.
    pub fn from_quadrature<T: Real>(x: T) -> Self {
        if x >= T::zero() {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "+",
            Parity::Odd => "-",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParityCheckConfig<T> {
    pub alpha: T,
    pub losses: LossProfile<T>,
    pub basis: Basis,
}

impl<T: Real> ParityCheckConfig<T> {
    /// Check of weight `losses.len()`, which must be 2 or 3.
    pub fn new(alpha: T, losses: LossProfile<T>, basis: Basis) -> Result<Self> {
        if !(alpha > T::zero() && alpha.is_finite()) {
            return Err(invalid("alpha", format!("{alpha} must be real, finite and positive")));
        }
        if !(2..=3).contains(&losses.len()) {
            return Err(invalid(
                "losses",
                format!("check weight {} not in {{2, 3}}", losses.len()),
            ));
        }
        Ok(Self { alpha, losses, basis })
    }

    pub fn uniform(alpha: T, eta: T, weight: usize, basis: Basis) -> Result<Self> {
        Self::new(alpha, LossProfile::uniform(eta, weight)?, basis)
    }

    #[inline]
    pub fn weight(&self) -> usize {
        self.losses.len()
    }

    pub fn amplitude(&self) -> CoherentAmplitude<T> {
        CoherentAmplitude::real(self.alpha).expect("validated alpha")
    }

    /// Surviving amplitude after every loss segment.
    pub fn abar(&self) -> T {
        propagate_losses(self.amplitude(), &self.losses).0.value.re
    }

    /// `|alpha_k|^2` for each loss segment.
    pub fn leaked_photons(&self) -> Vec<T> {
        propagate_losses(self.amplitude(), &self.losses)
            .1
            .iter()
            .map(|a| a.mean_photons())
            .collect()
    }
}

/// Joint qubit-field state just before homodyne readout, resolved into
/// parity blocks `rho[s][s']` that accompany the field term `|s abar><s' abar|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreMeasurementState<T> {
    pub abar: CoherentAmplitude<T>,
    pub basis: Basis,
    /// Register positions of the checked qubits, in interaction order.
    pub qubits: Vec<usize>,
    n: usize,
    blocks: [[CMatrix<T>; 2]; 2],
}

impl<T: Real> PreMeasurementState<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block(&self, s: Parity, t: Parity) -> &CMatrix<T> {
        &self.blocks[s.index()][t.index()]
    }

    pub fn blocks(&self) -> &[[CMatrix<T>; 2]; 2] {
        &self.blocks
    }

    /// Probability that the register has parity `s`.
    pub fn weight(&self, s: Parity) -> T {
        self.block(s, s).trace().re
    }

    /// Qubit marginal after discarding the field: the two diagonal blocks.
    pub fn qubit_state(&self) -> DensityMatrix<T> {
        DensityMatrix::from_raw(self.n, &self.blocks[0][0] + &self.blocks[1][1])
    }

    pub fn validate(&self) -> Result<()> {
        let tol = T::tolerance();
        let total = self.weight(Parity::Even) + self.weight(Parity::Odd);
        if (total - T::one()).abs() > tol {
            return Err(Error::InvalidState(format!("block traces sum to {total}")));
        }
        let swap = self.blocks[1][0].adjoint();
        if self.blocks[0][1].max_abs_diff(&swap) > tol {
            return Err(Error::InvalidState("off-diagonal blocks are not adjoint".into()));
        }
        self.qubit_state().validate()
    }
}

/// Exact check on every qubit of `rho`; the register size must equal the check weight.
pub fn run_check_exact<T: Real>(rho: &DensityMatrix<T>, cfg: &ParityCheckConfig<T>) -> Result<PreMeasurementState<T>> {
    if rho.n() != cfg.weight() {
        return Err(Error::DimensionMismatch {
            expected: cfg.weight(),
            found: rho.n(),
        });
    }
    let qubits: Vec<usize> = (0..cfg.weight()).collect();
    run_check_on(rho, &qubits, cfg)
}

/// Exact check on the listed qubits of a larger register.
pub fn run_check_on<T: Real>(
    rho: &DensityMatrix<T>,
    qubits: &[usize],
    cfg: &ParityCheckConfig<T>,
) -> Result<PreMeasurementState<T>> {
    let kernel = CheckKernel::new(cfg, rho.n(), qubits)?;
    Ok(PreMeasurementState {
        abar: CoherentAmplitude::real(kernel.abar())?,
        basis: cfg.basis,
        qubits: qubits.to_vec(),
        n: rho.n(),
        blocks: kernel.blocks(rho.matrix()),
    })
}

/// Stochastic-Pauli unraveling of the loss channel: segment `k` applies the
/// check's Pauli to every qubit after interaction `k` with probability
/// `(1 - exp(-2|alpha_k|^2)) / 2`. The last entry always carries the identity.
pub fn dephasing_decomposition<T: Real>(cfg: &ParityCheckConfig<T>) -> Vec<(T, PauliString)> {
    let qubits: Vec<usize> = (0..cfg.weight()).collect();
    dephasing_on(cfg, cfg.weight(), &qubits).expect("check qubits fit the register")
}

/// [`dephasing_decomposition`] placed on qubits of an `n`-qubit register.
pub fn dephasing_on<T: Real>(cfg: &ParityCheckConfig<T>, n: usize, qubits: &[usize]) -> Result<Vec<(T, PauliString)>> {
    if qubits.len() != cfg.weight() {
        return Err(Error::DimensionMismatch {
            expected: cfg.weight(),
            found: qubits.len(),
        });
    }
    cfg.leaked_photons()
        .into_iter()
        .enumerate()
        .map(|(k, photons)| {
            let p = T::half() * (T::one() - (-T::two() * photons).exp());
            Ok((p, PauliString::on_qubits(n, &qubits[k + 1..], cfg.basis.pauli())?))
        })
        .collect()
}

/// Applies the unraveled loss channel to a `weight`-qubit state: each
/// segment mixes in its Pauli with the segment's flip probability. On the
/// diagonal parity blocks this equals the exact check.
pub fn apply_dephasing<T: Real>(rho: &DensityMatrix<T>, cfg: &ParityCheckConfig<T>) -> Result<DensityMatrix<T>> {
    if rho.n() != cfg.weight() {
        return Err(Error::DimensionMismatch {
            expected: cfg.weight(),
            found: rho.n(),
        });
    }
    let mut m = rho.matrix().clone();
    for (p, e) in dephasing_decomposition(cfg) {
        let flipped = conjugate_by_pauli(&m, &e);
        let mut next = m.scale(T::one() - p);
        next.add_scaled(&flipped, p);
        m = next;
    }
    Ok(DensityMatrix::from_raw(rho.n(), m))
}

/// Multiplies a weight-3 hook error by the gauge operator `ZZZ` (or `XXX`)
/// when that lowers its weight.
pub fn hook_gauge_reduce(error: &PauliString, basis: Basis) -> Result<PauliString> {
    error.check_len(3)?;
    let kind = basis.pauli();
    if error.ops().iter().any(|p| *p != Pauli::I && *p != kind) {
        return Err(invalid("error", format!("{error} is not a {kind:?}-type error")));
    }
    let gauge = PauliString::new(vec![kind; 3]);
    let reduced = error.mul_ignoring_phase(&gauge)?;
    Ok(if reduced.weight() < error.weight() {
        reduced
    } else {
        error.clone()
    })
}
