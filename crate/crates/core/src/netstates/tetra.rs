use rand::Rng;

use super::{enumerate_branches, sampled_mean, Mode, PreparedState};
use crate::error::{invalid, Error, Result};
use crate::montecarlo::{run_trajectory, PlacedCheck};
use crate::paritycheck::{Basis, Parity, ParityCheckConfig};
use crate::qcore::{conjugate_by_pauli, BellLabel, CMatrix, DensityMatrix, Pauli, PauliString, PureState};
use crate::scalar::Real;

/// Supports of the six stabilizers; the first three are Z-type, the last
/// three X-type.
const SUPPORTS: [[usize; 3]; 6] = [[0, 2, 4], [0, 3, 5], [1, 3, 4], [0, 2, 5], [0, 3, 4], [1, 2, 4]];

/// `S1..S6`: three Z-type faces, three X-type vertices.
pub fn stabilizers() -> [PauliString; 6] {
    std::array::from_fn(|i| {
        let kind = if i < 3 { Pauli::Z } else { Pauli::X };
        PauliString::on_qubits(6, &SUPPORTS[i], kind).expect("fixed supports are in range")
    })
}

/// `(1/2) sum_beta |beta>_12 |beta>_34 |beta>_56` over the four Bell states.
pub fn tetra_target<T: Real>() -> PureState<T> {
    let mut amps = vec![crate::scalar::cr(T::zero()); 64];
    for label in BellLabel::ALL {
        let b = label.coefficients::<T>();
        for (i, a) in amps.iter_mut().enumerate() {
            let pair = |k: usize| (i >> (4 - 2 * k)) & 3;
            *a += b[pair(0)] * b[pair(1)] * b[pair(2)] * T::half();
        }
    }
    PureState::from_raw(6, amps)
}

/// The six stabilizer outcomes `sigma_1..sigma_6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TetraSyndrome {
    sigma: [i8; 6],
}

impl TetraSyndrome {
    pub fn new(sigma: [i8; 6]) -> Result<Self> {
        if sigma.iter().any(|s| *s != 1 && *s != -1) {
            return Err(invalid("sigma", format!("{sigma:?} has entries other than +1 and -1")));
        }
        Ok(Self { sigma })
    }

    pub fn trivial() -> Self {
        Self { sigma: [1; 6] }
    }

    pub fn sigma(&self) -> [i8; 6] {
        self.sigma
    }

    /// Outcomes of the Z-type stabilizers, which flag X errors.
    pub fn z_part(&self) -> [i8; 3] {
        [self.sigma[0], self.sigma[1], self.sigma[2]]
    }

    /// Outcomes of the X-type stabilizers, which flag Z errors.
    pub fn x_part(&self) -> [i8; 3] {
        [self.sigma[3], self.sigma[4], self.sigma[5]]
    }

    /// Outcomes an error `e` would flip on `|T>`.
    pub fn of_error(e: &PauliString) -> Result<Self> {
        let mut sigma = [1; 6];
        for (s, stab) in sigma.iter_mut().zip(stabilizers()) {
            if !stab.commutes_with(e)? {
                *s = -1;
            }
        }
        Ok(Self { sigma })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    X,
    Z,
}

impl ErrorKind {
    fn pauli(self) -> Pauli {
        match self {
            ErrorKind::X => Pauli::X,
            ErrorKind::Z => Pauli::Z,
        }
    }
}

/// Syndrome rows per single-qubit error plus the pair used for the
/// all-minus syndrome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoderTable {
    /// `x_rows[j]`: outcomes of `S1..S3` after `X` on qubit `j`.
    pub x_rows: [[i8; 3]; 6],
    /// `z_rows[j]`: outcomes of `S4..S6` after `Z` on qubit `j`.
    pub z_rows: [[i8; 3]; 6],
    pub pair: (usize, usize),
}

impl DecoderTable {
    pub fn standard() -> Self {
        Self {
            x_rows: [
                [-1, -1, 1],
                [1, 1, -1],
                [-1, 1, 1],
                [1, -1, -1],
                [-1, 1, -1],
                [1, -1, 1],
            ],
            z_rows: [
                [-1, -1, 1],
                [1, 1, -1],
                [-1, 1, -1],
                [1, -1, 1],
                [1, -1, -1],
                [-1, 1, 1],
            ],
            pair: (0, 1),
        }
    }

    /// Checks every row and the pair against the commutation of the error
    /// with the stabilizers.
    pub fn verify(&self) -> Result<()> {
        for kind in [ErrorKind::X, ErrorKind::Z] {
            let rows = self.rows(kind);
            for (j, row) in rows.iter().enumerate() {
                let e = PauliString::on_qubits(6, &[j], kind.pauli())?;
                let expected = part(&TetraSyndrome::of_error(&e)?, kind);
                if *row != expected {
                    return Err(Error::InvalidState(format!(
                        "{kind:?} row for qubit {} reads {row:?}, commutation gives {expected:?}",
                        j + 1
                    )));
                }
            }
            let e = PauliString::on_qubits(6, &[self.pair.0, self.pair.1], kind.pauli())?;
            if part(&TetraSyndrome::of_error(&e)?, kind) != [-1; 3] {
                return Err(Error::InvalidState(format!("pair {:?} does not give (-,-,-)", self.pair)));
            }
        }
        Ok(())
    }

    fn rows(&self, kind: ErrorKind) -> &[[i8; 3]; 6] {
        match kind {
            ErrorKind::X => &self.x_rows,
            ErrorKind::Z => &self.z_rows,
        }
    }

    /// Correction for one half of the syndrome: `z_part` for X errors,
    /// `x_part` for Z errors.
    pub fn decode(&self, syndrome: [i8; 3], kind: ErrorKind) -> Result<PauliString> {
        let qubits = if syndrome == [1; 3] {
            vec![]
        } else if syndrome == [-1; 3] {
            vec![self.pair.0, self.pair.1]
        } else {
            match self.rows(kind).iter().position(|r| *r == syndrome) {
                Some(j) => vec![j],
                None => return Err(Error::UnmatchedSyndrome(syndrome)),
            }
        };
        PauliString::on_qubits(6, &qubits, kind.pauli())
    }

    /// Full correction `X(z_part) Z(x_part)`.
    pub fn correction(&self, s: &TetraSyndrome) -> Result<PauliString> {
        self.decode(s.z_part(), ErrorKind::X)?
            .mul_ignoring_phase(&self.decode(s.x_part(), ErrorKind::Z)?)
    }
}

fn part(s: &TetraSyndrome, kind: ErrorKind) -> [i8; 3] {
    match kind {
        ErrorKind::X => s.z_part(),
        ErrorKind::Z => s.x_part(),
    }
}

/// Decodes with the standard table.
pub fn tetra_decode(syndrome: &TetraSyndrome, kind: ErrorKind) -> Result<PauliString> {
    DecoderTable::standard().decode(part(syndrome, kind), kind)
}

/// One check per stabilizer, indexed like [`stabilizers`].
#[derive(Debug, Clone, PartialEq)]
pub struct TetraConfig<T> {
    pub checks: [ParityCheckConfig<T>; 6],
}

impl<T: Real> TetraConfig<T> {
    pub fn new(checks: [ParityCheckConfig<T>; 6]) -> Result<Self> {
        for (i, c) in checks.iter().enumerate() {
            let basis = if i < 3 { Basis::Z } else { Basis::X };
            if c.basis != basis || c.weight() != 3 {
                return Err(invalid(
                    "checks",
                    format!("S{} needs a weight-3 {basis:?} check, got weight {} {:?}", i + 1, c.weight(), c.basis),
                ));
            }
        }
        Ok(Self { checks })
    }

    /// Same amplitude and per-segment loss on every check.
    pub fn uniform(alpha: T, eta: T) -> Result<Self> {
        let z = ParityCheckConfig::uniform(alpha, eta, 3, Basis::Z)?;
        let x = ParityCheckConfig::uniform(alpha, eta, 3, Basis::X)?;
        Ok(Self {
            checks: [z.clone(), z.clone(), z, x.clone(), x.clone(), x],
        })
    }
}

/// Checks in execution order: `S4, S5, S6` then `S1, S2, S3`.
pub fn tetra_checks<T: Real>(cfg: &TetraConfig<T>) -> Vec<PlacedCheck<T>> {
    [3, 4, 5, 0, 1, 2]
        .into_iter()
        .map(|i| PlacedCheck {
            qubits: SUPPORTS[i].to_vec(),
            config: cfg.checks[i].clone(),
        })
        .collect()
}

fn syndrome_from_run(outcomes: &[Parity]) -> TetraSyndrome {
    let o: Vec<i8> = outcomes.iter().map(|p| p.as_i8()).collect();
    TetraSyndrome {
        sigma: [o[3], o[4], o[5], o[0], o[1], o[2]],
    }
}

/// Corrected output averaged over all inferred syndromes.
#[derive(Debug, Clone)]
pub struct TetraExact<T> {
    pub state: DensityMatrix<T>,
    /// Probability of each inferred syndrome that can occur.
    pub syndromes: Vec<(TetraSyndrome, T)>,
}

pub fn tetra_prepare_exact<T: Real>(cfg: &TetraConfig<T>) -> Result<TetraExact<T>> {
    let table = DecoderTable::standard();
    let start = DensityMatrix::from_pure(&PureState::plus(6)?);
    let mut acc = CMatrix::zeros(64);
    let mut syndromes = Vec::new();
    for b in enumerate_branches(&start, &tetra_checks(cfg))? {
        let s = syndrome_from_run(&b.outcomes);
        syndromes.push((s, b.m.trace().re));
        acc = &acc + &conjugate_by_pauli(&b.m, &table.correction(&s)?);
    }
    Ok(TetraExact {
        state: DensityMatrix::new(6, acc)?,
        syndromes,
    })
}

/// One sampled run from `|+>^6` and its corrected output.
pub fn tetra_prepare_sampled<T: Real, R: Rng + ?Sized>(
    cfg: &TetraConfig<T>,
    rng: &mut R,
) -> Result<(PureState<T>, TetraSyndrome)> {
    let record = run_trajectory(&PureState::plus(6)?, &tetra_checks(cfg), rng)?;
    let s = syndrome_from_run(&record.inferred);
    let out = record.final_state.apply_pauli(&DecoderTable::standard().correction(&s)?)?;
    Ok((out, s))
}

/// Exact mode returns the branch average and no single syndrome.
pub fn tetra_prepare<T: Real, R: Rng + ?Sized>(
    cfg: &TetraConfig<T>,
    rng: &mut R,
    mode: Mode,
) -> Result<(PreparedState<T>, Option<TetraSyndrome>)> {
    match mode {
        Mode::Exact => Ok((PreparedState::Mixed(tetra_prepare_exact(cfg)?.state), None)),
        Mode::Sampled => {
            let (psi, s) = tetra_prepare_sampled(cfg, rng)?;
            Ok((PreparedState::Pure(psi), Some(s)))
        }
    }
}

/// Mean fidelity with `|T>` and its standard error over sampled runs.
pub fn tetra_fidelity_sampled(cfg: &TetraConfig<f64>, shots: usize, seed: u64) -> Result<(f64, f64)> {
    let target = tetra_target::<f64>();
    sampled_mean(seed, shots, |rng| {
        let (psi, _) = tetra_prepare_sampled(cfg, rng)?;
        target.overlap_sqr(&psi)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{bell_probabilities, bell_project, fidelity};
    use crate::rng::shot_rng;
    use rayon::prelude::*;

    fn expectation_on(psi: &PureState<f64>, p: &PauliString) -> f64 {
        psi.inner(&psi.apply_pauli(p).unwrap()).unwrap().re
    }

    fn pauli(spec: &str) -> PauliString {
        spec.parse().unwrap()
    }

    #[test]
    fn stabilizer_strings() {
        let s: Vec<String> = stabilizers().iter().map(|p| p.to_string()).collect();
        assert_eq!(s, ["ZIZIZI", "ZIIZIZ", "IZIZZI", "XIXIIX", "XIIXXI", "IXXIXI"]);
    }

    #[test]
    fn stabilizers_commute_pairwise() {
        let s = stabilizers();
        for a in &s {
            for b in &s {
                assert!(a.commutes_with(b).unwrap());
            }
        }
    }

    #[test]
    fn target_is_stabilized() {
        let t = tetra_target::<f64>();
        assert!((t.norm_sqr() - 1.0).abs() < 1e-14);
        for s in stabilizers() {
            assert!((expectation_on(&t, &s) - 1.0).abs() < 1e-14, "{s}");
        }
        let s = stabilizers();
        let z123 = s[0].mul_ignoring_phase(&s[1]).unwrap().mul_ignoring_phase(&s[2]).unwrap();
        let x456 = s[3].mul_ignoring_phase(&s[4]).unwrap().mul_ignoring_phase(&s[5]).unwrap();
        assert_eq!(z123.to_string(), "IZZIIZ");
        assert_eq!(x456.to_string(), "IXIXIX");
        assert!((expectation_on(&t, &z123) - 1.0).abs() < 1e-14);
        assert!((expectation_on(&t, &x456) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn common_eigenspace_is_one_dimensional() {
        // Product of the six projectors, built densely; its trace is its rank.
        let id = CMatrix::<f64>::identity(64);
        let mut proj = id.clone();
        for s in stabilizers() {
            let half = (&id + &s.to_matrix()).scale(0.5);
            proj = &proj * &half;
        }
        assert!((proj.trace().re - 1.0).abs() < 1e-12);
        assert!((&proj * &proj).max_abs_diff(&proj) < 1e-12);
        let t = DensityMatrix::from_pure(&tetra_target::<f64>());
        assert!(proj.max_abs_diff(t.matrix()) < 1e-12);
    }

    #[test]
    fn bell_outcomes_correlate_across_pairs() {
        let t = tetra_target::<f64>();
        let p = bell_probabilities(&t, (0, 1)).unwrap();
        for (label, prob) in BellLabel::ALL.iter().zip(p) {
            assert!((prob - 0.25).abs() < 1e-14);
            let (_, post) = bell_project(&t, (0, 1), *label).unwrap();
            for pair in [(2, 3), (4, 5)] {
                let q = bell_probabilities(&post, pair).unwrap();
                let k = BellLabel::ALL.iter().position(|l| l == label).unwrap();
                assert!((q[k] - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn standard_table_verifies() {
        DecoderTable::standard().verify().unwrap();
    }

    #[test]
    fn corrupted_table_fails_verification() {
        let mut t = DecoderTable::standard();
        t.z_rows[3][1] = -t.z_rows[3][1];
        assert!(t.verify().is_err());
        let mut t = DecoderTable::standard();
        t.pair = (0, 2);
        assert!(t.verify().is_err());
    }

    #[test]
    fn worked_examples() {
        let s = TetraSyndrome::of_error(&pauli("XIXIII")).unwrap();
        assert_eq!(s.z_part(), [1, -1, 1]);
        let c = tetra_decode(&s, ErrorKind::X).unwrap();
        assert_eq!(c.to_string(), "IIIIIX");
        assert_eq!(pauli("XIXIII").mul_ignoring_phase(&c).unwrap(), stabilizers()[3]);

        let s = TetraSyndrome::of_error(&pauli("XXIIII")).unwrap();
        assert_eq!(s.z_part(), [-1, -1, -1]);
        assert_eq!(tetra_decode(&s, ErrorKind::X).unwrap().to_string(), "XXIIII");
        // The alternative pair (3,4) also works, leaving S5 S6.
        let s56 = stabilizers()[4].mul_ignoring_phase(&stabilizers()[5]).unwrap();
        assert_eq!(s56.to_string(), "XXXXII");
        assert!((expectation_on(&tetra_target(), &s56) - 1.0).abs() < 1e-14);
    }

    fn corrected_fidelity(error: &PauliString) -> f64 {
        let t = tetra_target::<f64>();
        let s = TetraSyndrome::of_error(error).unwrap();
        let c = DecoderTable::standard().correction(&s).unwrap();
        let out = t.apply_pauli(error).unwrap().apply_pauli(&c).unwrap();
        t.overlap_sqr(&out).unwrap()
    }

    fn pattern(bits: usize, kind: Pauli) -> Vec<Pauli> {
        (0..6).map(|q| if bits >> q & 1 == 1 { kind } else { Pauli::I }).collect()
    }

    #[test]
    fn every_single_kind_pattern_is_corrected() {
        for kind in [Pauli::X, Pauli::Z] {
            for bits in 0..64 {
                let e = PauliString::new(pattern(bits, kind));
                assert!((corrected_fidelity(&e) - 1.0).abs() < 1e-12, "{e}");
            }
        }
    }

    #[test]
    fn every_mixed_pattern_is_corrected() {
        let worst = (0..4096usize)
            .into_par_iter()
            .map(|k| {
                let x = PauliString::new(pattern(k & 63, Pauli::X));
                let z = PauliString::new(pattern(k >> 6, Pauli::Z));
                let e = x.mul_ignoring_phase(&z).unwrap();
                (corrected_fidelity(&e) - 1.0).abs()
            })
            .reduce(|| 0.0, f64::max);
        assert!(worst < 1e-12);
    }

    #[test]
    fn syndrome_validation() {
        assert!(TetraSyndrome::new([1, -1, 1, 1, 1, 0]).is_err());
        assert_eq!(TetraSyndrome::new([1; 6]).unwrap(), TetraSyndrome::trivial());
    }

    #[test]
    fn config_validation() {
        let z = ParityCheckConfig::uniform(1.0, 0.0, 3, Basis::Z).unwrap();
        let x = ParityCheckConfig::uniform(1.0, 0.0, 3, Basis::X).unwrap();
        let swapped = [x.clone(), z.clone(), z.clone(), x.clone(), x.clone(), x.clone()];
        assert!(TetraConfig::new(swapped).is_err());
        let short = ParityCheckConfig::uniform(1.0, 0.0, 2, Basis::Z).unwrap();
        assert!(TetraConfig::new([short, z.clone(), z, x.clone(), x.clone(), x]).is_err());
    }

    #[test]
    fn lossless_large_alpha_reaches_target() {
        let cfg = TetraConfig::uniform(6.0, 0.0).unwrap();
        let t = tetra_target::<f64>();
        let exact = tetra_prepare_exact(&cfg).unwrap();
        assert!((fidelity(&exact.state, &t).unwrap() - 1.0).abs() < 1e-10);
        for seed in 0..100 {
            let (psi, _) = tetra_prepare_sampled(&cfg, &mut shot_rng(seed, 0)).unwrap();
            assert!((t.overlap_sqr(&psi).unwrap() - 1.0).abs() < 1e-10, "seed {seed}");
        }
    }

    #[test]
    fn vanishing_alpha_gives_random_guess() {
        let cfg = TetraConfig::uniform(1e-8f64, 0.0).unwrap();
        let exact = tetra_prepare_exact(&cfg).unwrap();
        let f = fidelity(&exact.state, &tetra_target()).unwrap();
        assert!((f - 1.0 / 64.0).abs() < 1e-6, "{f}");
        assert_eq!(exact.syndromes.len(), 64);
    }

    #[test]
    fn syndrome_distribution_sums_to_one() {
        let exact = tetra_prepare_exact(&TetraConfig::uniform(1.0, 0.01).unwrap()).unwrap();
        let total: f64 = exact.syndromes.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sampled_fidelity_matches_exact() {
        let cfg = TetraConfig::uniform(1.0, 0.01).unwrap();
        let exact = fidelity(&tetra_prepare_exact(&cfg).unwrap().state, &tetra_target()).unwrap();
        let (mean, se) = tetra_fidelity_sampled(&cfg, 20_000, 5).unwrap();
        assert!((mean - exact).abs() <= 3.0 * se, "{mean} +- {se} vs {exact}");
    }

    #[test]
    fn tetra_prepare_dispatches_modes() {
        let cfg = TetraConfig::uniform(2.0, 0.0).unwrap();
        let (state, s) = tetra_prepare(&cfg, &mut shot_rng(0, 0), Mode::Exact).unwrap();
        assert!(matches!(state, PreparedState::Mixed(_)) && s.is_none());
        let (state, s) = tetra_prepare(&cfg, &mut shot_rng(0, 0), Mode::Sampled).unwrap();
        assert!(matches!(state, PreparedState::Pure(_)) && s.is_some());
    }
}
