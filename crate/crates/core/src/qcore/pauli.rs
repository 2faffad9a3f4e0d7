use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::qcore::matrix::CMatrix;
use crate::scalar::{c, Complex, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    #[inline]
    fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    #[inline]
    fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn matrix<T: Real>(self) -> [[Complex<T>; 2]; 2] {
        let (o, l, i) = (T::zero(), T::one(), c(T::zero(), T::one()));
        match self {
            Pauli::I => [[c(l, o), c(o, o)], [c(o, o), c(l, o)]],
            Pauli::X => [[c(o, o), c(l, o)], [c(l, o), c(o, o)]],
            Pauli::Y => [[c(o, o), -i], [i, c(o, o)]],
            Pauli::Z => [[c(l, o), c(o, o)], [c(o, o), c(-l, o)]],
        }
    }
}

/// Tensor product of single-qubit Paulis; position `q` acts on qubit `q`
/// (qubit 0 is the most significant bit of a basis index).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    ops: Vec<Pauli>,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            ops: vec![Pauli::I; n],
        }
    }

    pub fn new(ops: Vec<Pauli>) -> Self {
        Self { ops }
    }

    /// `kind` on every listed qubit, identity elsewhere.
    pub fn on_qubits(n: usize, qubits: &[usize], kind: Pauli) -> Result<Self> {
        let mut ops = vec![Pauli::I; n];
        for &q in qubits {
            if q >= n {
                return Err(Error::QubitOutOfRange { index: q, n });
            }
            ops[q] = kind;
        }
        Ok(Self { ops })
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    pub fn get(&self, q: usize) -> Pauli {
        self.ops[q]
    }

    pub fn weight(&self) -> usize {
        self.ops.iter().filter(|p| **p != Pauli::I).count()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.ops.len()).filter(|&q| self.ops[q] != Pauli::I).collect()
    }

    /// Product `self * other` with the overall phase dropped.
    pub fn mul_ignoring_phase(&self, other: &Self) -> Result<Self> {
        self.check_len(other.len())?;
        Ok(Self {
            ops: self
                .ops
                .iter()
                .zip(&other.ops)
                .map(|(a, b)| Pauli::from_bits(a.has_x() ^ b.has_x(), a.has_z() ^ b.has_z()))
                .collect(),
        })
    }

    pub fn commutes_with(&self, other: &Self) -> Result<bool> {
        self.check_len(other.len())?;
        let anti = self
            .ops
            .iter()
            .zip(&other.ops)
            .filter(|(a, b)| (a.has_x() && b.has_z()) ^ (a.has_z() && b.has_x()))
            .count();
        Ok(anti % 2 == 0)
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.ops.len() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: n,
                found: self.ops.len(),
            })
        }
    }

    /// Bit masks `(x, z, y_count)` over basis indices of an n-qubit register.
    pub(crate) fn masks(&self) -> (usize, usize, usize) {
        let n = self.ops.len();
        let mut x = 0;
        let mut z = 0;
        let mut ys = 0;
        for (q, p) in self.ops.iter().enumerate() {
            let bit = 1 << (n - 1 - q);
            if p.has_x() {
                x |= bit;
            }
            if p.has_z() {
                z |= bit;
            }
            if *p == Pauli::Y {
                ys += 1;
            }
        }
        (x, z, ys)
    }

    /// Action on a basis state: `P|s> = phase * |s ^ x_mask>`.
    pub(crate) fn basis_action<T: Real>(&self) -> impl Fn(usize) -> (usize, Complex<T>) {
        let (x, z, ys) = self.masks();
        let base = match ys % 4 {
            0 => c(T::one(), T::zero()),
            1 => c(T::zero(), T::one()),
            2 => c(-T::one(), T::zero()),
            _ => c(T::zero(), -T::one()),
        };
        move |s| {
            let sign = if (s & z).count_ones() % 2 == 0 {
                T::one()
            } else {
                -T::one()
            };
            (s ^ x, base * sign)
        }
    }

    /// Dense `2^n x 2^n` matrix of the operator.
    pub fn to_matrix<T: Real>(&self) -> CMatrix<T> {
        self.ops
            .iter()
            .fold(CMatrix::identity(1), |acc, p| {
                let m = p.matrix::<T>();
                let single = CMatrix::from_row_major(vec![m[0][0], m[0][1], m[1][0], m[1][1]])
                    .expect("2x2");
                acc.kron(&single)
            })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.ops {
            let ch = match p {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Dense label, one character per qubit, e.g. `"IZZ"`.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(invalid("pauli", format!("unknown label {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_strings(n: usize) -> Vec<PauliString> {
        let labels = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        (0..4usize.pow(n as u32))
            .map(|mut k| {
                let mut ops = Vec::with_capacity(n);
                for _ in 0..n {
                    ops.push(labels[k % 4]);
                    k /= 4;
                }
                PauliString::new(ops)
            })
            .collect()
    }

    fn is_plus_minus_identity(m: &CMatrix<f64>) -> bool {
        let id = CMatrix::<f64>::identity(m.dim());
        m.max_abs_diff(&id) < 1e-12 || m.max_abs_diff(&id.scale(-1.0)) < 1e-12
    }

    #[test]
    fn squared_products_are_plus_minus_identity() {
        for n in 1..=3 {
            let strings = all_strings(n);
            for p in &strings {
                let pm = p.to_matrix::<f64>();
                for q in &strings {
                    let prod = &pm * &q.to_matrix::<f64>();
                    assert!(is_plus_minus_identity(&(&prod * &prod)), "({p}{q})^2");
                }
            }
        }
    }

    #[test]
    fn commutation_matches_matrices() {
        let strings = all_strings(2);
        for p in &strings {
            for q in &strings {
                let (pm, qm) = (p.to_matrix::<f64>(), q.to_matrix::<f64>());
                let comm = &(&pm * &qm) - &(&qm * &pm);
                assert_eq!(comm.max_abs() < 1e-12, p.commutes_with(q).unwrap(), "{p} {q}");
            }
        }
    }

    #[test]
    fn phase_free_product() {
        let a: PauliString = "XZI".parse().unwrap();
        let b: PauliString = "ZZX".parse().unwrap();
        assert_eq!(a.mul_ignoring_phase(&b).unwrap().to_string(), "YIX");
        assert_eq!(a.weight(), 2);
    }

    #[test]
    fn basis_action_matches_matrix() {
        for p in all_strings(3) {
            let m = p.to_matrix::<f64>();
            let act = p.basis_action::<f64>();
            for s in 0..8 {
                let (t, phase) = act(s);
                assert!((m[(t, s)] - phase).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_labels_and_lengths() {
        assert!("IXQ".parse::<PauliString>().is_err());
        let a: PauliString = "XX".parse().unwrap();
        assert!(a.mul_ignoring_phase(&"XXX".parse().unwrap()).is_err());
        assert!(PauliString::on_qubits(3, &[3], Pauli::Z).is_err());
    }
}
