use rand::Rng;

use super::{enumerate_branches, sampled_mean, Mode, PreparedState};
use crate::error::{invalid, Result};
use crate::field::LossProfile;
use crate::montecarlo::{run_trajectory, PlacedCheck};
use crate::paritycheck::{Basis, Parity, ParityCheckConfig};
use crate::qcore::{CMatrix, DensityMatrix, Pauli, PauliString, PureState};
use crate::scalar::{cr, Real};

/// Error probabilities behind a GHZ preparation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhzPrediction<T> {
    /// Loss-induced phase-flip probabilities of the two checks.
    pub p12: T,
    pub p23: T,
    /// Misread probabilities with amplitude `(1 - eta) alpha`.
    pub q12_printed: T,
    pub q23_printed: T,
    /// Misread probabilities with the cascade amplitude `sqrt(1 - eta) alpha`.
    pub q12: T,
    pub q23: T,
    /// `p12 + p23 - p12 p23 + q12 + q23 + q12 q23` with the printed q values.
    pub p_composite: T,
    /// Infidelity summed over the discrete error and misread branches.
    pub p_enumerated: T,
}

/// `(|000> + |111>) / sqrt 2`
pub fn ghz_state<T: Real>() -> PureState<T> {
    let mut amps = vec![cr(T::zero()); 8];
    amps[0] = cr(T::FRAC_1_SQRT_2());
    amps[7] = cr(T::FRAC_1_SQRT_2());
    PureState::from_raw(3, amps)
}

/// The Z1Z2 and Z2Z3 checks; each probe crosses one lossy link before its
/// second qubit.
pub fn ghz_checks<T: Real>(alpha: T, eta12: T, eta23: T) -> Result<[PlacedCheck<T>; 2]> {
    if !(alpha > T::zero() && alpha.is_finite()) {
        return Err(invalid("alpha", format!("{alpha} must be finite and positive")));
    }
    let check = |eta: T, qubits: Vec<usize>| -> Result<PlacedCheck<T>> {
        let losses = LossProfile::new(vec![eta, T::zero()])?;
        Ok(PlacedCheck {
            qubits,
            config: ParityCheckConfig::new(alpha, losses, Basis::Z)?,
        })
    };
    Ok([check(eta12, vec![0, 1])?, check(eta23, vec![1, 2])?])
}

fn correction(m12: Parity, m23: Parity) -> PauliString {
    let q = match (m12, m23) {
        (Parity::Even, Parity::Even) => None,
        (Parity::Odd, Parity::Even) => Some(0),
        (Parity::Even, Parity::Odd) => Some(2),
        (Parity::Odd, Parity::Odd) => Some(1),
    };
    let mut ops = vec![Pauli::I; 3];
    if let Some(q) = q {
        ops[q] = Pauli::X;
    }
    PauliString::new(ops)
}

fn flip_probability<T: Real>(alpha: T, eta: T) -> T {
    (T::one() - (-T::two() * eta * alpha * alpha).exp()) * T::half()
}

fn misread<T: Real>(amplitude: T) -> T {
    (T::SQRT_2() * amplitude).erfc() * T::half()
}

fn predict<T: Real>(alpha: T, eta12: T, eta23: T) -> Result<GhzPrediction<T>> {
    let (p12, p23) = (flip_probability(alpha, eta12), flip_probability(alpha, eta23));
    let q12_printed = misread((T::one() - eta12) * alpha);
    let q23_printed = misread((T::one() - eta23) * alpha);
    let q12 = misread((T::one() - eta12).sqrt() * alpha);
    let q23 = misread((T::one() - eta23).sqrt() * alpha);
    let p_composite = p12 + p23 - p12 * p23 + q12_printed + q23_printed + q12_printed * q23_printed;

    // Each link can flip the phase of the qubit behind it and each readout
    // can be wrong; walk the sixteen combinations.
    let ghz = ghz_state::<T>();
    let mut fidelity = T::zero();
    let pick = |hit: bool, p: T| if hit { p } else { T::one() - p };
    for bits in 0..16u32 {
        let [e12, e23, f12, f23] = [0, 1, 2, 3].map(|k| bits >> k & 1 == 1);
        let weight = pick(e12, p12) * pick(e23, p23) * pick(f12, q12) * pick(f23, q23);
        let mut ops = vec![Pauli::I; 3];
        if e12 {
            ops[1] = Pauli::Z;
        }
        if e23 {
            ops[2] = Pauli::Z;
        }
        // The input is a uniform mixture of both parities of each check;
        // average over the true syndrome too.
        for truth in 0..4u32 {
            let s12 = Parity::from_index((truth & 1) as usize);
            let s23 = Parity::from_index((truth >> 1) as usize);
            let read12 = if f12 { s12.flipped() } else { s12 };
            let read23 = if f23 { s23.flipped() } else { s23 };
            let start = correction(s12, s23).mul_ignoring_phase(&PauliString::new(ops.clone()))?;
            let state = ghz.apply_pauli(&start)?.apply_pauli(&correction(read12, read23))?;
            fidelity += weight * ghz.overlap_sqr(&state)? * T::lit(0.25);
        }
    }
    Ok(GhzPrediction {
        p12,
        p23,
        q12_printed,
        q23_printed,
        q12,
        q23,
        p_composite,
        p_enumerated: T::one() - fidelity,
    })
}

/// Prepares GHZ from `|+++>` with two lossy flying-cat checks and a
/// syndrome-dependent X correction. Exact mode averages every inferred branch;
/// sampled mode runs one trajectory.
pub fn prepare_ghz<T: Real, R: Rng + ?Sized>(
    alpha: T,
    eta12: T,
    eta23: T,
    rng: &mut R,
    mode: Mode,
) -> Result<(PreparedState<T>, GhzPrediction<T>)> {
    let checks = ghz_checks(alpha, eta12, eta23)?;
    let prediction = predict(alpha, eta12, eta23)?;
    let start = PureState::plus(3)?;
    let state = match mode {
        Mode::Exact => {
            let mut acc = CMatrix::zeros(8);
            for b in enumerate_branches(&DensityMatrix::from_pure(&start), &checks)? {
                let c = correction(b.outcomes[0], b.outcomes[1]);
                acc = &acc + &crate::qcore::conjugate_by_pauli(&b.m, &c);
            }
            PreparedState::Mixed(DensityMatrix::new(3, acc)?)
        }
        Mode::Sampled => {
            let record = run_trajectory(&start, &checks, rng)?;
            let c = correction(record.inferred[0], record.inferred[1]);
            PreparedState::Pure(record.final_state.apply_pauli(&c)?)
        }
    };
    Ok((state, prediction))
}

/// Mean GHZ fidelity and its standard error over sampled trajectories.
pub fn ghz_fidelity_sampled(alpha: f64, eta12: f64, eta23: f64, shots: usize, seed: u64) -> Result<(f64, f64)> {
    let target = ghz_state::<f64>();
    sampled_mean(seed, shots, |rng| {
        let (state, _) = prepare_ghz(alpha, eta12, eta23, rng, Mode::Sampled)?;
        state.fidelity(&target)
    })
}
