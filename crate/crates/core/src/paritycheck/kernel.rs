use crate::error::{Error, Result};
use crate::field::gaussian_amplitude;
use crate::paritycheck::{Basis, Parity, ParityCheckConfig};
use crate::qcore::{bit_of, conjugate_1q, hadamard_gate, CMatrix};
use crate::quad::integrate;
use crate::scalar::Real;

/// `I[mu][s][t] = integral over the half-line read as mu of <x|s abar><t abar|x>`.
///
/// Computed by adaptive quadrature on `[0, L]` and `[-L, 0]` with
/// `L = sqrt2 abar + 10`.
pub fn overlap_integrals<T: Real>(abar: T) -> Result<[[[T; 2]; 2]; 2]> {
    let reach = T::SQRT_2() * abar.abs() + T::lit(10.0);
    let tol = T::tolerance() / T::lit(10.0);
    let mut out = [[[T::zero(); 2]; 2]; 2];
    for mu in Parity::BOTH {
        let (lo, hi) = match mu {
            Parity::Even => (T::zero(), reach),
            Parity::Odd => (-reach, T::zero()),
        };
        for s in Parity::BOTH {
            for t in Parity::BOTH {
                if t.index() < s.index() {
                    continue;
                }
                let (cs, ct) = (s.sign::<T>() * abar, t.sign::<T>() * abar);
                let q = integrate(|x| gaussian_amplitude(x, cs) * gaussian_amplitude(x, ct), lo, hi, tol)?;
                out[mu.index()][s.index()][t.index()] = q.value;
                out[mu.index()][t.index()][s.index()] = q.value;
            }
        }
    }
    Ok(out)
}

/// Precomputed action of one check on a fixed set of register qubits.
#[derive(Debug, Clone)]
pub struct CheckKernel<T> {
    n: usize,
    qubits: Vec<usize>,
    basis: Basis,
    abar: T,
    /// Coherence factor for each set of loss segments whose leaked labels differ.
    decay: Vec<T>,
    overlaps: [[[T; 2]; 2]; 2],
}

impl<T: Real> CheckKernel<T> {
    pub fn new(cfg: &ParityCheckConfig<T>, n: usize, qubits: &[usize]) -> Result<Self> {
        if qubits.len() != cfg.weight() {
            return Err(Error::DimensionMismatch {
                expected: cfg.weight(),
                found: qubits.len(),
            });
        }
        for (k, &q) in qubits.iter().enumerate() {
            if q >= n {
                return Err(Error::QubitOutOfRange { index: q, n });
            }
            if qubits[..k].contains(&q) {
                return Err(Error::InvalidState(format!("check lists qubit {q} twice")));
            }
        }
        let leaked = cfg.leaked_photons();
        let w = leaked.len();
        let decay = (0..1usize << w)
            .map(|mask| {
                (0..w)
                    .filter(|k| mask & (1 << k) != 0)
                    .fold(T::one(), |acc, k| acc * (-T::two() * leaked[k]).exp())
            })
            .collect();
        let abar = cfg.abar();
        Ok(Self {
            n,
            qubits: qubits.to_vec(),
            basis: cfg.basis,
            abar,
            decay,
            overlaps: overlap_integrals(abar)?,
        })
    }

    pub fn abar(&self) -> T {
        self.abar
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn overlaps(&self) -> &[[[T; 2]; 2]; 2] {
        &self.overlaps
    }

    /// Bit `k` is the parity of the first `k + 1` checked qubits of `s`.
    fn running_parities(&self, s: usize) -> usize {
        let mut acc = 0;
        let mut parity = 0;
        for (k, &q) in self.qubits.iter().enumerate() {
            parity ^= usize::from(s & bit_of(self.n, q) != 0);
            acc |= parity << k;
        }
        acc
    }

    fn hadamard_targets(&self, m: &mut CMatrix<T>) {
        if self.basis == Basis::X {
            let g = hadamard_gate();
            for &q in &self.qubits {
                conjugate_1q(m, self.n, q, &g);
            }
        }
    }

    /// Parity blocks of the lossy check applied to `m` (any trace).
    pub fn blocks(&self, m: &CMatrix<T>) -> [[CMatrix<T>; 2]; 2] {
        let d = m.dim();
        let w = self.qubits.len();
        let mut input = m.clone();
        self.hadamard_targets(&mut input);
        let prefix: Vec<usize> = (0..d).map(|s| self.running_parities(s)).collect();
        let mut blocks = [
            [CMatrix::zeros(d), CMatrix::zeros(d)],
            [CMatrix::zeros(d), CMatrix::zeros(d)],
        ];
        for i in 0..d {
            let si = (prefix[i] >> (w - 1)) & 1;
            for j in 0..d {
                let v = input[(i, j)];
                if v.norm_sqr() == T::zero() {
                    continue;
                }
                let sj = (prefix[j] >> (w - 1)) & 1;
                blocks[si][sj][(i, j)] = v * self.decay[prefix[i] ^ prefix[j]];
            }
        }
        for row in blocks.iter_mut() {
            for b in row.iter_mut() {
                self.hadamard_targets(b);
            }
        }
        blocks
    }

    /// Unnormalized qubit state when the homodyne outcome is read as `mu`.
    /// Its trace is the probability of that reading.
    pub fn branch(&self, m: &CMatrix<T>, mu: Parity) -> CMatrix<T> {
        let blocks = self.blocks(m);
        combine(&blocks, &self.overlaps[mu.index()])
    }
}

pub(crate) fn combine<T: Real>(blocks: &[[CMatrix<T>; 2]; 2], weights: &[[T; 2]; 2]) -> CMatrix<T> {
    let mut out = CMatrix::zeros(blocks[0][0].dim());
    for s in 0..2 {
        for t in 0..2 {
            out.add_scaled(&blocks[s][t], weights[s][t]);
        }
    }
    out
}
