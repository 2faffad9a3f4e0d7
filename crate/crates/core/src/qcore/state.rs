use rand::Rng;

use crate::error::{Error, Result};
use crate::qcore::pauli::PauliString;
use crate::scalar::{c, cr, Complex, Real};

pub const MAX_QUBITS: usize = 8;

/// Normalized state vector on `n` qubits. Qubit 0 is the most significant
/// bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T> {
    n: usize,
    amps: Vec<Complex<T>>,
}

pub(crate) fn check_register(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidState(format!(
            "register size {n} outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

pub(crate) fn check_qubit(q: usize, n: usize) -> Result<()> {
    if q >= n {
        Err(Error::QubitOutOfRange { index: q, n })
    } else {
        Ok(())
    }
}

#[inline]
pub(crate) fn bit_of(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

/// Applies a 2x2 gate to qubit `q` of an `n`-qubit amplitude vector in place.
pub(crate) fn apply_1q<T: Real>(amps: &mut [Complex<T>], n: usize, q: usize, g: &[[Complex<T>; 2]; 2]) {
    let bit = bit_of(n, q);
    for s in 0..amps.len() {
        if s & bit != 0 {
            continue;
        }
        let (a0, a1) = (amps[s], amps[s | bit]);
        amps[s] = g[0][0] * a0 + g[0][1] * a1;
        amps[s | bit] = g[1][0] * a0 + g[1][1] * a1;
    }
}

pub(crate) fn hadamard_gate<T: Real>() -> [[Complex<T>; 2]; 2] {
    let h = cr(T::FRAC_1_SQRT_2());
    [[h, h], [h, -h]]
}

pub(crate) fn pauli_permute<T: Real>(amps: &[Complex<T>], p: &PauliString) -> Vec<Complex<T>> {
    let act = p.basis_action::<T>();
    let mut out = vec![cr(T::zero()); amps.len()];
    for (s, a) in amps.iter().enumerate() {
        let (t, phase) = act(s);
        out[t] = phase * *a;
    }
    out
}

impl<T: Real> PureState<T> {
    /// Validating constructor: length `2^n` and unit norm within tolerance.
    pub fn new(n: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        check_register(n)?;
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: amps.len(),
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).fold(T::zero(), |x, y| x + y);
        if !norm.is_finite() || (norm - T::one()).abs() > T::tolerance() {
            return Err(Error::InvalidState(format!("norm^2 = {norm}, expected 1")));
        }
        Ok(Self { n, amps })
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(n: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        check_register(n)?;
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: amps.len(),
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).fold(T::zero(), |x, y| x + y);
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::ZeroProbability);
        }
        let s = T::one() / norm.sqrt();
        Ok(Self {
            n,
            amps: amps.into_iter().map(|a| a * s).collect(),
        })
    }

    pub(crate) fn from_raw(n: usize, amps: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n);
        Self { n, amps }
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_register(n)?;
        if index >= 1 << n {
            return Err(Error::InvalidState(format!("basis index {index} >= 2^{n}")));
        }
        let mut amps = vec![cr(T::zero()); 1 << n];
        amps[index] = cr(T::one());
        Ok(Self { n, amps })
    }

    /// `|+>^n`
    pub fn plus(n: usize) -> Result<Self> {
        check_register(n)?;
        let a = cr(T::one() / T::lit((1usize << n) as f64).sqrt());
        Ok(Self {
            n,
            amps: vec![a; 1 << n],
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).fold(T::zero(), |x, y| x + y)
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(cr(T::zero()), |acc, (a, b)| acc + a.conj() * *b))
    }

    /// `|<self|other>|^2`
    pub fn overlap_sqr(&self, other: &Self) -> Result<T> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        check_register(self.n + other.n)?;
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(*a * *b);
            }
        }
        Ok(Self {
            n: self.n + other.n,
            amps,
        })
    }

    pub fn apply_pauli(&self, p: &PauliString) -> Result<Self> {
        p.check_len(self.n)?;
        Ok(Self {
            n: self.n,
            amps: pauli_permute(&self.amps, p),
        })
    }

    pub fn apply_gate(&self, q: usize, g: &[[Complex<T>; 2]; 2]) -> Result<Self> {
        check_qubit(q, self.n)?;
        let mut amps = self.amps.clone();
        apply_1q(&mut amps, self.n, q, g);
        Ok(Self { n: self.n, amps })
    }

    pub fn apply_hadamard(&self, qubits: &[usize]) -> Result<Self> {
        let h = hadamard_gate::<T>();
        let mut amps = self.amps.clone();
        for &q in qubits {
            check_qubit(q, self.n)?;
            apply_1q(&mut amps, self.n, q, &h);
        }
        Ok(Self { n: self.n, amps })
    }

    /// Probability of reading `bit` on qubit `q` in the Z basis.
    pub fn z_probability(&self, q: usize, bit: u8) -> Result<T> {
        check_qubit(q, self.n)?;
        let mask = bit_of(self.n, q);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(s, _)| ((s & mask) != 0) == (bit == 1))
            .map(|(_, a)| a.norm_sqr())
            .fold(T::zero(), |x, y| x + y))
    }

    /// Projects qubit `q` onto Z eigenvalue `bit` and renormalizes. Returns
    /// the branch probability with the post-state.
    pub fn project_z(&self, q: usize, bit: u8) -> Result<(T, Self)> {
        check_qubit(q, self.n)?;
        let mask = bit_of(self.n, q);
        let amps: Vec<_> = self
            .amps
            .iter()
            .enumerate()
            .map(|(s, a)| {
                if ((s & mask) != 0) == (bit == 1) {
                    *a
                } else {
                    cr(T::zero())
                }
            })
            .collect();
        let p = amps.iter().map(|a| a.norm_sqr()).fold(T::zero(), |x, y| x + y);
        if !(p > T::zero()) {
            return Err(Error::ZeroProbability);
        }
        Ok((p, Self::normalized(self.n, amps)?))
    }

    /// X-basis projection; `plus = true` selects `|+>`.
    pub fn project_x(&self, q: usize, plus: bool) -> Result<(T, Self)> {
        let (p, post) = self.apply_hadamard(&[q])?.project_z(q, u8::from(!plus))?;
        Ok((p, post.apply_hadamard(&[q])?))
    }

    pub fn measure_z<R: Rng + ?Sized>(&self, q: usize, rng: &mut R) -> Result<(u8, Self)> {
        let p0 = self.z_probability(q, 0)?;
        let bit = u8::from(T::sample_unit(rng) >= p0);
        Ok((bit, self.project_z(q, bit)?.1))
    }

    /// Returns `true` for the `+1` outcome.
    pub fn measure_x<R: Rng + ?Sized>(&self, q: usize, rng: &mut R) -> Result<(bool, Self)> {
        let (bit, post) = self.apply_hadamard(&[q])?.measure_z(q, rng)?;
        Ok((bit == 0, post.apply_hadamard(&[q])?))
    }

    /// Draws a full computational-basis outcome.
    pub fn sample_basis<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_index(self.amps.iter().map(|a| a.norm_sqr()), rng)
    }
}

/// Inverse-CDF draw over non-negative weights summing to ~1. Never returns a
/// zero-weight index.
pub(crate) fn sample_index<T: Real, R: Rng + ?Sized>(weights: impl Iterator<Item = T> + Clone, rng: &mut R) -> usize {
    let u = T::sample_unit(rng);
    let mut acc = T::zero();
    let mut last_positive = 0;
    for (i, w) in weights.enumerate() {
        if w > T::zero() {
            last_positive = i;
            acc += w;
            if u < acc {
                return i;
            }
        }
    }
    last_positive
}

/// Haar-random pure state: normalized vector of i.i.d. complex Gaussians.
pub fn haar_state<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PureState<T>> {
    check_register(n)?;
    let amps = (0..1usize << n)
        .map(|_| c(T::sample_standard_normal(rng), T::sample_standard_normal(rng)))
        .collect();
    PureState::normalized(n, amps)
}

pub fn haar_two_qubit<T: Real, R: Rng + ?Sized>(rng: &mut R) -> PureState<T> {
    haar_state(2, rng).expect("two-qubit register is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constructor_rejects_bad_norm_and_length() {
        assert!(PureState::<f64>::new(1, vec![cr(1.0), cr(1.0)]).is_err());
        assert!(PureState::<f64>::new(2, vec![cr(1.0), cr(0.0)]).is_err());
        assert!(PureState::<f64>::new(9, vec![cr(1.0); 512]).is_err());
        assert!(PureState::<f64>::normalized(1, vec![cr(0.0), cr(0.0)]).is_err());
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        let s = PureState::<f64>::basis(3, 0).unwrap();
        let x1: PauliString = "XII".parse().unwrap();
        assert_eq!(s.apply_pauli(&x1).unwrap(), PureState::basis(3, 0b100).unwrap());
    }

    #[test]
    fn hadamard_maps_zero_to_plus() {
        let s = PureState::<f64>::basis(2, 0).unwrap().apply_hadamard(&[0, 1]).unwrap();
        let plus = PureState::<f64>::plus(2).unwrap();
        assert!((s.overlap_sqr(&plus).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn x_projection_of_plus_is_certain() {
        let s = PureState::<f64>::plus(3).unwrap();
        let (p, _) = s.project_x(1, true).unwrap();
        assert!((p - 1.0).abs() < 1e-14);
        assert_eq!(s.project_x(1, false).unwrap_err(), Error::ZeroProbability);
    }

    #[test]
    fn haar_states_are_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let s: PureState<f64> = haar_two_qubit(&mut rng);
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}
