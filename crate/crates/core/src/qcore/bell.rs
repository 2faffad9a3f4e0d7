use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::qcore::state::{bit_of, check_qubit, sample_index, PureState};
use crate::scalar::{cr, Complex, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellLabel {
    PhiPlus,
    PsiPlus,
    PsiMinus,
    PhiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
        BellLabel::PhiMinus,
    ];

    /// Coefficients on `|00>, |01>, |10>, |11>` of the ordered pair.
    pub fn coefficients<T: Real>(self) -> [Complex<T>; 4] {
        let h = T::FRAC_1_SQRT_2();
        let (z, p, m) = (cr(T::zero()), cr(h), cr(-h));
        match self {
            BellLabel::PhiPlus => [p, z, z, p],
            BellLabel::PsiPlus => [z, p, p, z],
            BellLabel::PsiMinus => [z, p, m, z],
            BellLabel::PhiMinus => [p, z, z, m],
        }
    }

    pub fn state<T: Real>(self) -> PureState<T> {
        PureState::from_raw(2, self.coefficients().to_vec())
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellLabel::PhiPlus => "Phi+",
            BellLabel::PsiPlus => "Psi+",
            BellLabel::PsiMinus => "Psi-",
            BellLabel::PhiMinus => "Phi-",
        })
    }
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<()> {
    check_qubit(i, n)?;
    check_qubit(j, n)?;
    if i == j {
        return Err(Error::InvalidState(format!("Bell pair uses qubit {i} twice")));
    }
    Ok(())
}

/// For every assignment of the qubits outside the pair, the amplitudes
/// indexed by the pair value `2a + b`.
fn pair_slices(n: usize, i: usize, j: usize) -> impl Iterator<Item = [usize; 4]> {
    let (bi, bj) = (bit_of(n, i), bit_of(n, j));
    (0..1usize << n)
        .filter(move |s| s & (bi | bj) == 0)
        .map(move |s| [s, s | bj, s | bi, s | bi | bj])
}

fn branch_amplitude<T: Real>(amps: &[Complex<T>], idx: &[usize; 4], beta: &[Complex<T>; 4]) -> Complex<T> {
    (0..4).fold(cr(T::zero()), |acc, k| acc + beta[k].conj() * amps[idx[k]])
}

/// Born probabilities of the four Bell outcomes on `(i, j)`, in [`BellLabel::ALL`] order.
pub fn bell_probabilities<T: Real>(psi: &PureState<T>, (i, j): (usize, usize)) -> Result<[T; 4]> {
    check_pair(psi.n(), i, j)?;
    let mut probs = [T::zero(); 4];
    for (k, label) in BellLabel::ALL.iter().enumerate() {
        let beta = label.coefficients::<T>();
        probs[k] = pair_slices(psi.n(), i, j)
            .map(|idx| branch_amplitude(psi.amplitudes(), &idx, &beta).norm_sqr())
            .fold(T::zero(), |a, b| a + b);
    }
    Ok(probs)
}

/// Projects `(i, j)` onto `label`. Returns the branch probability and the
/// renormalized post-state, with the pair left in the Bell state.
pub fn bell_project<T: Real>(psi: &PureState<T>, (i, j): (usize, usize), label: BellLabel) -> Result<(T, PureState<T>)> {
    check_pair(psi.n(), i, j)?;
    let beta = label.coefficients::<T>();
    let mut out = vec![cr(T::zero()); psi.dim()];
    for idx in pair_slices(psi.n(), i, j) {
        let a = branch_amplitude(psi.amplitudes(), &idx, &beta);
        for k in 0..4 {
            out[idx[k]] = beta[k] * a;
        }
    }
    let p = out.iter().map(|a| a.norm_sqr()).fold(T::zero(), |a, b| a + b);
    if !(p > T::zero()) {
        return Err(Error::ZeroProbability);
    }
    Ok((p, PureState::normalized(psi.n(), out)?))
}

pub fn bell_measure<T: Real, R: Rng + ?Sized>(
    psi: &PureState<T>,
    pair: (usize, usize),
    rng: &mut R,
) -> Result<(BellLabel, PureState<T>)> {
    let probs = bell_probabilities(psi, pair)?;
    let label = BellLabel::ALL[sample_index(probs.iter().copied(), rng)];
    Ok((label, bell_project(psi, pair, label)?.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::state::haar_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bell_states_are_orthonormal() {
        for a in BellLabel::ALL {
            for b in BellLabel::ALL {
                let ov = a.state::<f64>().inner(&b.state()).unwrap().norm();
                assert!((ov - f64::from(u8::from(a == b))).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn eigenstate_outcome_is_certain() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for label in BellLabel::ALL {
            for _ in 0..10 {
                let (got, post) = bell_measure(&label.state::<f64>(), (0, 1), &mut rng).unwrap();
                assert_eq!(got, label);
                assert!((post.overlap_sqr(&label.state()).unwrap() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn reversed_pair_flips_psi_minus_sign_only() {
        let psi = BellLabel::PsiMinus.state::<f64>();
        let probs = bell_probabilities(&psi, (1, 0)).unwrap();
        assert!((probs[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let psi = haar_state::<f64, _>(4, &mut rng).unwrap();
            let s: f64 = bell_probabilities(&psi, (3, 1)).unwrap().iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_degenerate_pairs() {
        let psi = PureState::<f64>::plus(2).unwrap();
        assert!(bell_probabilities(&psi, (0, 0)).is_err());
        assert!(bell_probabilities(&psi, (0, 2)).is_err());
    }
}
