use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::qcore::matrix::CMatrix;
use crate::qcore::pauli::PauliString;
use crate::qcore::state::{apply_1q, bit_of, check_qubit, check_register, hadamard_gate, PureState};
use crate::scalar::{cr, Complex, Real};

/// Eigenvalue floor for the positivity check.
pub const POSITIVITY_FLOOR: f64 = -1e-9;

/// Hermitian, unit-trace, positive semidefinite operator on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    n: usize,
    m: CMatrix<T>,
}

/// Smallest eigenvalue of a Hermitian matrix, computed in f64.
pub fn min_eigenvalue<T: Real>(m: &CMatrix<T>) -> f64 {
    let d = m.dim();
    let a = DMatrix::from_fn(d, d, |i, j| {
        let z = m[(i, j)];
        num_complex::Complex::new(z.re.as_f64(), z.im.as_f64())
    });
    a.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

impl<T: Real> DensityMatrix<T> {
    /// Validating constructor: Hermitian and unit trace within the scalar
    /// tolerance, eigenvalues above [`POSITIVITY_FLOOR`].
    pub fn new(n: usize, m: CMatrix<T>) -> Result<Self> {
        check_register(n)?;
        if m.dim() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: m.dim(),
            });
        }
        let rho = Self { n, m };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_raw(n: usize, m: CMatrix<T>) -> Self {
        debug_assert_eq!(m.dim(), 1 << n);
        Self { n, m }
    }

    pub fn validate(&self) -> Result<()> {
        let tol = T::tolerance();
        let herm = self.m.hermiticity_error();
        if !(herm <= tol) {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm})")));
        }
        let tr = self.m.trace();
        if !((tr.re - T::one()).abs() <= tol && tr.im.abs() <= tol) {
            return Err(Error::InvalidState(format!("trace {tr}, expected 1")));
        }
        let floor = POSITIVITY_FLOOR.min(-tol.as_f64());
        let lam = min_eigenvalue(&self.m);
        if lam < floor {
            return Err(Error::InvalidState(format!("negative eigenvalue {lam:e}")));
        }
        Ok(())
    }

    pub fn from_pure(psi: &PureState<T>) -> Self {
        Self {
            n: psi.n(),
            m: CMatrix::outer(psi.amplitudes(), psi.amplitudes()),
        }
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_register(n)?;
        let d = 1usize << n;
        Ok(Self {
            n,
            m: CMatrix::identity(d).scale(T::one() / T::lit(d as f64)),
        })
    }

    /// Convex combination; weights must be non-negative and sum to 1.
    pub fn mixture(parts: &[(T, DensityMatrix<T>)]) -> Result<Self> {
        let first = parts.first().ok_or(Error::ZeroProbability)?;
        let n = first.1.n;
        let mut m = CMatrix::zeros(1 << n);
        let mut total = T::zero();
        for (w, rho) in parts {
            if rho.n != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: rho.n,
                });
            }
            if *w < T::zero() {
                return Err(Error::InvalidState(format!("negative mixture weight {w}")));
            }
            m.add_scaled(&rho.m, *w);
            total += *w;
        }
        if (total - T::one()).abs() > T::tolerance() {
            return Err(Error::InvalidState(format!("mixture weights sum to {total}")));
        }
        Ok(Self { n, m })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.m
    }

    pub fn trace(&self) -> Complex<T> {
        self.m.trace()
    }

    pub fn purity(&self) -> T {
        (&self.m * &self.m).trace().re
    }

    /// Diagonal in the computational basis.
    pub fn z_distribution(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.m[(i, i)].re.max(T::zero())).collect()
    }

    pub fn apply_pauli(&self, p: &PauliString) -> Result<Self> {
        p.check_len(self.n)?;
        Ok(Self {
            n: self.n,
            m: conjugate_by_pauli(&self.m, p),
        })
    }

    /// `U rho U^dagger` for a single-qubit gate on qubit `q`.
    pub fn apply_gate(&self, q: usize, g: &[[Complex<T>; 2]; 2]) -> Result<Self> {
        check_qubit(q, self.n)?;
        let mut m = self.m.clone();
        conjugate_1q(&mut m, self.n, q, g);
        Ok(Self { n: self.n, m })
    }

    pub fn apply_hadamard(&self, qubits: &[usize]) -> Result<Self> {
        let mut m = self.m.clone();
        for &q in qubits {
            check_qubit(q, self.n)?;
            conjugate_1q(&mut m, self.n, q, &hadamard_gate());
        }
        Ok(Self { n: self.n, m })
    }

    /// `Tr(P rho)`.
    pub fn expectation(&self, p: &PauliString) -> Result<T> {
        p.check_len(self.n)?;
        let act = p.basis_action::<T>();
        let mut acc = cr(T::zero());
        for t in 0..self.dim() {
            let (s, phase) = act(t);
            acc += phase * self.m[(t, s)];
        }
        Ok(acc.re)
    }

    /// Reduced state of a pure state on `keep`, without forming the full
    /// density matrix.
    pub fn reduced_from_pure(psi: &PureState<T>, keep: &[usize]) -> Result<Self> {
        let n = psi.n();
        check_keep(n, keep)?;
        let keep_mask = keep.iter().fold(0, |m, &q| m | bit_of(n, q));
        let spread = |r: usize| {
            keep.iter()
                .enumerate()
                .fold(0usize, |acc, (k, &q)| if r >> (keep.len() - 1 - k) & 1 == 1 { acc | bit_of(n, q) } else { acc })
        };
        let d = 1 << keep.len();
        let full: Vec<usize> = (0..d).map(spread).collect();
        let amps = psi.amplitudes();
        let mut out = CMatrix::zeros(d);
        for env in (0..psi.dim()).filter(|s| s & keep_mask == 0) {
            for (ri, &fi) in full.iter().enumerate() {
                let a = amps[env | fi];
                if a.norm_sqr() == T::zero() {
                    continue;
                }
                for (rj, &fj) in full.iter().enumerate() {
                    out[(ri, rj)] += a * amps[env | fj].conj();
                }
            }
        }
        Ok(Self { n: keep.len(), m: out })
    }

    /// Reduced state on `keep`, in the listed order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let n = self.n;
        check_keep(n, keep)?;
        let keep_mask = keep.iter().fold(0, |m, &q| m | bit_of(n, q));
        let reduced = |s: usize| {
            keep.iter()
                .fold(0usize, |acc, &q| (acc << 1) | usize::from(s & bit_of(n, q) != 0))
        };
        let mut out = CMatrix::zeros(1 << keep.len());
        for i in 0..self.dim() {
            let (ri, env_i) = (reduced(i), i & !keep_mask);
            for j in 0..self.dim() {
                if j & !keep_mask == env_i {
                    out[(ri, reduced(j))] += self.m[(i, j)];
                }
            }
        }
        Ok(Self {
            n: keep.len(),
            m: out,
        })
    }
}

fn check_keep(n: usize, keep: &[usize]) -> Result<()> {
    for (k, &q) in keep.iter().enumerate() {
        check_qubit(q, n)?;
        if keep[..k].contains(&q) {
            return Err(Error::InvalidState(format!("qubit {q} listed twice")));
        }
    }
    check_register(keep.len())
}

pub(crate) fn conjugate_by_pauli<T: Real>(m: &CMatrix<T>, p: &PauliString) -> CMatrix<T> {
    let act = p.basis_action::<T>();
    let d = m.dim();
    let mapped: Vec<_> = (0..d).map(&act).collect();
    let mut out = CMatrix::zeros(d);
    for i in 0..d {
        let (ti, pi) = mapped[i];
        for j in 0..d {
            let (tj, pj) = mapped[j];
            out[(ti, tj)] = pi * m[(i, j)] * pj.conj();
        }
    }
    out
}

/// In-place `U m U^dagger`. The row-major storage of a `2^n` square matrix
/// is a `2n`-qubit vector whose first `n` qubits index rows.
pub(crate) fn conjugate_1q<T: Real>(m: &mut CMatrix<T>, n: usize, q: usize, g: &[[Complex<T>; 2]; 2]) {
    let gc = [
        [g[0][0].conj(), g[0][1].conj()],
        [g[1][0].conj(), g[1][1].conj()],
    ];
    let mut data = m.as_slice().to_vec();
    apply_1q(&mut data, 2 * n, q, g);
    apply_1q(&mut data, 2 * n, n + q, &gc);
    *m = CMatrix::from_row_major(data).expect("square");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::state::haar_state;
    use crate::scalar::c;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn validation_catches_each_violation() {
        let not_herm = CMatrix::from_row_major(vec![cr(0.5), c(0.0, 0.1), c(0.0, 0.1), cr(0.5)]).unwrap();
        assert!(DensityMatrix::<f64>::new(1, not_herm).is_err());
        let bad_trace = CMatrix::<f64>::identity(2);
        assert!(DensityMatrix::new(1, bad_trace).is_err());
        let negative = CMatrix::from_row_major(vec![cr(1.5), cr(0.0), cr(0.0), cr(-0.5)]).unwrap();
        assert!(DensityMatrix::<f64>::new(1, negative).is_err());
    }

    #[test]
    fn gate_conjugation_matches_dense_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let psi = haar_state::<f64, _>(3, &mut rng).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let via_state = DensityMatrix::from_pure(&psi.apply_hadamard(&[1]).unwrap());
        let via_rho = rho.apply_hadamard(&[1]).unwrap();
        assert!(via_state.matrix().max_abs_diff(via_rho.matrix()) < 1e-12);

        let p: PauliString = "YXZ".parse().unwrap();
        let pm = p.to_matrix::<f64>();
        let dense = &(&pm * rho.matrix()) * &pm.adjoint();
        assert!(dense.max_abs_diff(rho.apply_pauli(&p).unwrap().matrix()) < 1e-12);
    }

    #[test]
    fn expectation_matches_dense_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let rho = DensityMatrix::from_pure(&haar_state::<f64, _>(3, &mut rng).unwrap());
        for label in ["ZZI", "XYZ", "IIY", "III"] {
            let p: PauliString = label.parse().unwrap();
            let dense = (&p.to_matrix::<f64>() * rho.matrix()).trace().re;
            assert!((rho.expectation(&p).unwrap() - dense).abs() < 1e-12, "{label}");
        }
    }

    #[test]
    fn partial_trace_of_product_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = haar_state::<f64, _>(1, &mut rng).unwrap();
        let b = haar_state::<f64, _>(2, &mut rng).unwrap();
        let rho = DensityMatrix::from_pure(&a.tensor(&b).unwrap());
        let ra = rho.partial_trace(&[0]).unwrap();
        assert!(ra.matrix().max_abs_diff(DensityMatrix::from_pure(&a).matrix()) < 1e-12);
        let rb = rho.partial_trace(&[1, 2]).unwrap();
        assert!(rb.matrix().max_abs_diff(DensityMatrix::from_pure(&b).matrix()) < 1e-12);
        assert!(rho.partial_trace(&[1, 1]).is_err());
    }

    #[test]
    fn pure_reduction_matches_partial_trace() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let psi: PureState<f64> = crate::qcore::haar_state(5, &mut rng).unwrap();
        for keep in [vec![3, 1], vec![0], vec![4, 2, 0], vec![0, 1, 2, 3, 4]] {
            let a = DensityMatrix::reduced_from_pure(&psi, &keep).unwrap();
            let b = DensityMatrix::from_pure(&psi).partial_trace(&keep).unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-14);
        }
        assert!(DensityMatrix::reduced_from_pure(&psi, &[2, 2]).is_err());
    }

    #[test]
    fn partial_trace_respects_requested_order() {
        let psi = PureState::<f64>::basis(3, 0b011).unwrap();
        let rho = DensityMatrix::from_pure(&psi).partial_trace(&[2, 0]).unwrap();
        assert!((rho.matrix()[(0b10, 0b10)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_is_valid() {
        let rho = DensityMatrix::<f64>::maximally_mixed(6).unwrap();
        rho.validate().unwrap();
        assert!((rho.purity() - 1.0 / 64.0).abs() < 1e-15);
    }
}
