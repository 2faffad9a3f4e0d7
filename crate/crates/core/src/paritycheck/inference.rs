use crate::error::{Error, Result};
use crate::field::gaussian_amplitude;
use crate::paritycheck::kernel::{combine, overlap_integrals};
use crate::paritycheck::{Parity, PreMeasurementState};
use crate::qcore::DensityMatrix;
use crate::scalar::Real;

const SUPPORT_FLOOR: f64 = 1e-300;

/// Qubit state conditioned on homodyne outcome `x`, and the outcome density `p(x)`.
pub fn conditional_post_state<T: Real>(pre: &PreMeasurementState<T>, x: T) -> Result<(DensityMatrix<T>, T)> {
    let abar = pre.abar.as_real()?;
    let g = [gaussian_amplitude(x, abar), gaussian_amplitude(x, -abar)];
    let px = Parity::BOTH
        .iter()
        .map(|s| pre.weight(*s) * g[s.index()] * g[s.index()])
        .fold(T::zero(), |a, b| a + b);
    if !(px.as_f64() >= SUPPORT_FLOOR) {
        return Err(Error::OutOfSupport {
            x: x.as_f64(),
            density: px.as_f64(),
        });
    }
    let weights = [
        [g[0] * g[0] / px, g[0] * g[1] / px],
        [g[1] * g[0] / px, g[1] * g[1] / px],
    ];
    Ok((DensityMatrix::from_raw(pre.n(), combine(pre.blocks(), &weights)), px))
}

/// One side of the threshold: its probability and the normalized state
/// (absent when the probability underflows to zero).
#[derive(Debug, Clone, PartialEq)]
pub struct InferredBranch<T> {
    pub weight: T,
    pub state: Option<DensityMatrix<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdedInference<T> {
    pub plus: InferredBranch<T>,
    pub minus: InferredBranch<T>,
    /// `joint[inferred][actual]`, indexed by [`Parity::index`].
    pub joint: [[T; 2]; 2],
    /// Probability of misreading a definite parity, from the quadrature.
    pub p_m: T,
}

impl<T: Real> ThresholdedInference<T> {
    pub fn branch(&self, mu: Parity) -> &InferredBranch<T> {
        match mu {
            Parity::Even => &self.plus,
            Parity::Odd => &self.minus,
        }
    }
}

/// Integrates the conditional state over each half-line of the quadrature.
pub fn thresholded_inference<T: Real>(pre: &PreMeasurementState<T>) -> Result<ThresholdedInference<T>> {
    let overlaps = overlap_integrals(pre.abar.as_real()?)?;
    let branch = |mu: Parity| {
        let m = combine(pre.blocks(), &overlaps[mu.index()]);
        let weight = m.trace().re.max(T::zero());
        let state = (weight > T::zero()).then(|| DensityMatrix::from_raw(pre.n(), m.scale(T::one() / weight)));
        InferredBranch { weight, state }
    };
    let mut joint = [[T::zero(); 2]; 2];
    for mu in Parity::BOTH {
        for s in Parity::BOTH {
            joint[mu.index()][s.index()] = pre.weight(s) * overlaps[mu.index()][s.index()][s.index()];
        }
    }
    Ok(ThresholdedInference {
        plus: branch(Parity::Even),
        minus: branch(Parity::Odd),
        joint,
        p_m: overlaps[Parity::Odd.index()][0][0],
    })
}
