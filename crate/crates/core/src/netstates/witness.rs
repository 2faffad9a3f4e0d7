use super::tetra::stabilizers;
use crate::error::{invalid, Error, Result};
use crate::qcore::{bit_of, sample_index, DensityMatrix, PauliString};
use crate::rng::fold_shots;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessMode {
    Exact,
    /// All-Z and all-X readout, `shots` samples per setting.
    Sampled { shots: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessEstimate {
    /// `<W>`
    pub value: f64,
    /// `1/2 - <W>` clamped to `[0, 1]`.
    pub fidelity: f64,
    /// `1/2 - <W>` before clamping. It lower-bounds the fidelity with the
    /// target and goes negative for states far from it.
    pub fidelity_bound: f64,
    pub std_error: f64,
}

impl WitnessEstimate {
    fn from_value(value: f64, std_error: f64) -> Self {
        let bound = 0.5 - value;
        Self {
            value,
            fidelity: bound.clamp(0.0, 1.0),
            fidelity_bound: bound,
            std_error,
        }
    }

    /// Negative witness value: genuine six-qubit entanglement.
    pub fn detects_entanglement(&self) -> bool {
        self.value < 0.0
    }
}

/// `<prod (1 + S_i) / 2>` over one half of the stabilizers, expanded into
/// the eight subset products.
fn projector_expectation(rho: &DensityMatrix<f64>, group: &[PauliString]) -> Result<f64> {
    let mut total = 0.0;
    for subset in 0..1usize << group.len() {
        let mut p = PauliString::identity(6);
        for (k, s) in group.iter().enumerate() {
            if subset >> k & 1 == 1 {
                p = p.mul_ignoring_phase(s)?;
            }
        }
        total += rho.expectation(&p)?;
    }
    Ok(total / (1 << group.len()) as f64)
}

/// Whether a computational-basis outcome has even parity on every support.
fn passes(index: usize, masks: &[usize]) -> bool {
    masks.iter().all(|m| (index & m).count_ones() % 2 == 0)
}

fn sampled_projector(probs: &[f64], masks: &[usize], shots: usize, seed: u64) -> (f64, f64) {
    let hits: u64 = fold_shots(
        seed,
        shots,
        || 0u64,
        |acc, _, rng| {
            let i = sample_index(probs.iter().copied(), rng);
            *acc += u64::from(passes(i, masks));
        },
        |a, b| a + b,
    );
    let p = hits as f64 / shots as f64;
    (p, (p * (1.0 - p) / shots as f64).sqrt())
}

/// `<W> = 3/2 - <P_Z> - <P_X>` with `P` the projector onto the +1 space of
/// one stabilizer half.
pub fn witness_expectation(rho: &DensityMatrix<f64>, mode: WitnessMode) -> Result<WitnessEstimate> {
    if rho.n() != 6 {
        return Err(Error::DimensionMismatch {
            expected: 6,
            found: rho.n(),
        });
    }
    rho.validate()?;
    let s = stabilizers();
    match mode {
        WitnessMode::Exact => {
            let pz = projector_expectation(rho, &s[..3])?;
            let px = projector_expectation(rho, &s[3..])?;
            Ok(WitnessEstimate::from_value(1.5 - pz - px, 0.0))
        }
        WitnessMode::Sampled { shots, seed } => {
            if shots == 0 {
                return Err(invalid("shots", "must be positive"));
            }
            let masks = |group: &[PauliString]| -> Vec<usize> {
                group
                    .iter()
                    .map(|p| p.support().iter().fold(0, |m, &q| m | bit_of(6, q)))
                    .collect()
            };
            let z_probs = rho.z_distribution();
            let x_probs = rho.apply_hadamard(&[0, 1, 2, 3, 4, 5])?.z_distribution();
            let (pz, sez) = sampled_projector(&z_probs, &masks(&s[..3]), shots, seed);
            // A distinct stream family for the second setting.
            let (px, sex) = sampled_projector(&x_probs, &masks(&s[3..]), shots, seed ^ 0x9e37_79b9_7f4a_7c15);
            Ok(WitnessEstimate::from_value(1.5 - pz - px, sez.hypot(sex)))
        }
    }
}

/// First-order prediction of `<W>` from the misread probability and the
/// two loss-flip probabilities of a check.
pub fn witness_noisy_model<T: Real>(p_m: T, p1: T, p2: T) -> Result<T> {
    for (name, p) in [("p_m", p_m), ("p1", p1), ("p2", p2)] {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(invalid(name, format!("{p} is not a probability")));
        }
    }
    Ok(-T::half() + (T::one() - (T::one() - p_m).powi(6)) + T::lit(3.0) * (p1 + p2))
}
