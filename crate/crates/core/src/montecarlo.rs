//! Trajectory sampling of flying-cat checks: stochastic Pauli errors from
//! the dephasing unraveling plus a sampled homodyne outcome.
//!
//! The tail-form unraveling reproduces the parity-diagonal blocks of the
//! exact channel. Coherences between parity sectors are not reproduced,
//! which leaves every parity-sector observable unchanged.

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::field::gaussian_amplitude;
use crate::paritycheck::{
    dephasing_on, run_check_exact, thresholded_inference, Basis, Parity, ParityCheckConfig,
};
use crate::qcore::{apply_1q, bit_of, hadamard_gate, DensityMatrix, PauliString, PureState};
use crate::rng::fold_shots;
use crate::scalar::{cr, Real};

/// A check placed on register qubits, in interaction order.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacedCheck<T> {
    pub qubits: Vec<usize>,
    pub config: ParityCheckConfig<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryConfig<T> {
    pub seed: u64,
    pub shots: usize,
    pub checks: Vec<PlacedCheck<T>>,
}

impl<T: Real> TrajectoryConfig<T> {
    pub fn new(seed: u64, shots: usize, checks: Vec<PlacedCheck<T>>) -> Result<Self> {
        if shots == 0 {
            return Err(invalid("shots", "must be at least 1"));
        }
        Ok(Self { seed, shots, checks })
    }
}

/// Outcome of one sampled check.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStep<T> {
    /// Product of the loss errors that fired.
    pub error: PauliString,
    pub sample: T,
    pub inferred: Parity,
    /// Parity the register was projected onto.
    pub actual: Parity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord<T> {
    pub errors: Vec<PauliString>,
    pub samples: Vec<T>,
    pub inferred: Vec<Parity>,
    pub final_state: PureState<T>,
}

fn rotate<T: Real>(amps: &mut [crate::scalar::Complex<T>], n: usize, qubits: &[usize], basis: Basis) {
    if basis == Basis::X {
        let h = hadamard_gate();
        for &q in qubits {
            apply_1q(amps, n, q, &h);
        }
    }
}

/// Samples one check on every qubit of `state`.
pub fn sample_check<T: Real, R: Rng + ?Sized>(
    state: &PureState<T>,
    cfg: &ParityCheckConfig<T>,
    rng: &mut R,
) -> Result<(TrajectoryStep<T>, PureState<T>)> {
    if state.n() != cfg.weight() {
        return Err(Error::DimensionMismatch {
            expected: cfg.weight(),
            found: state.n(),
        });
    }
    let qubits: Vec<usize> = (0..cfg.weight()).collect();
    sample_check_on(state, &qubits, cfg, rng)
}

/// Samples one check on the listed qubits of a larger register.
pub fn sample_check_on<T: Real, R: Rng + ?Sized>(
    state: &PureState<T>,
    qubits: &[usize],
    cfg: &ParityCheckConfig<T>,
    rng: &mut R,
) -> Result<(TrajectoryStep<T>, PureState<T>)> {
    let n = state.n();
    let mut error = PauliString::identity(n);
    for (p, e) in dephasing_on(cfg, n, qubits)? {
        if T::sample_unit(rng) < p {
            error = error.mul_ignoring_phase(&e)?;
        }
    }
    let mut amps = state.apply_pauli(&error)?.into_amplitudes();
    rotate(&mut amps, n, qubits, cfg.basis);

    let mask = qubits.iter().fold(0, |m, &q| m | bit_of(n, q));
    let parity_of = |s: usize| Parity::from_index(((s & mask).count_ones() % 2) as usize);
    let even_weight = amps
        .iter()
        .enumerate()
        .filter(|(s, _)| parity_of(*s) == Parity::Even)
        .map(|(_, a)| a.norm_sqr())
        .fold(T::zero(), |a, b| a + b);
    let actual = if T::sample_unit(rng) < even_weight {
        Parity::Even
    } else {
        Parity::Odd
    };
    let abar = cfg.abar();
    let x = actual.sign::<T>() * T::SQRT_2() * abar + T::FRAC_1_SQRT_2() * T::sample_standard_normal(rng);
    let g = [gaussian_amplitude(x, abar), gaussian_amplitude(x, -abar)];
    for (s, a) in amps.iter_mut().enumerate() {
        *a = *a * cr(g[parity_of(s).index()]);
    }
    rotate(&mut amps, n, qubits, cfg.basis);
    let post = PureState::normalized(n, amps)?;
    Ok((
        TrajectoryStep {
            error,
            sample: x,
            inferred: Parity::from_quadrature(x),
            actual,
        },
        post,
    ))
}

/// Runs the checks in order on one trajectory.
pub fn run_trajectory<T: Real, R: Rng + ?Sized>(
    state: &PureState<T>,
    checks: &[PlacedCheck<T>],
    rng: &mut R,
) -> Result<TrajectoryRecord<T>> {
    let mut current = state.clone();
    let mut record = TrajectoryRecord {
        errors: Vec::with_capacity(checks.len()),
        samples: Vec::with_capacity(checks.len()),
        inferred: Vec::with_capacity(checks.len()),
        final_state: state.clone(),
    };
    for check in checks {
        let (step, post) = sample_check_on(&current, &check.qubits, &check.config, rng)?;
        record.errors.push(step.error);
        record.samples.push(step.sample);
        record.inferred.push(step.inferred);
        current = post;
    }
    record.final_state = current;
    Ok(record)
}

/// Runs every shot of `cfg` from `state` and returns the records in shot order.
pub fn run_trajectories<T: Real>(state: &PureState<T>, cfg: &TrajectoryConfig<T>) -> Result<Vec<TrajectoryRecord<T>>> {
    fold_shots(
        cfg.seed,
        cfg.shots,
        || Ok(Vec::new()),
        |acc: &mut Result<Vec<TrajectoryRecord<T>>>, _, rng| {
            if let Ok(v) = acc {
                match run_trajectory(state, &cfg.checks, rng) {
                    Ok(r) => v.push(r),
                    Err(e) => *acc = Err(e),
                }
            }
        },
        |a, b| {
            let mut a = a?;
            a.extend(b?);
            Ok(a)
        },
    )
}

/// Z-score of an estimate against a reference. A zero standard error with
/// a nonzero deviation counts as a failure at any threshold.
fn z_score(deviation: f64, std_error: f64) -> f64 {
    deviation / std_error.max(1e-12)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deviation {
    pub quantity: String,
    pub estimate: f64,
    pub exact: f64,
    pub std_error: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McComparison {
    pub shots: usize,
    /// Every compared scalar.
    pub entries: Vec<Deviation>,
    pub max_abs_deviation: f64,
    /// Entry with the largest z-score.
    pub worst: Deviation,
    /// Set when some entry deviates by more than [`FLAG_SIGMA`].
    pub flagged: bool,
}

pub const FLAG_SIGMA: f64 = 5.0;
pub const MIN_COMPARISON_SHOTS: usize = 10_000;

impl McComparison {
    pub fn within(&self, sigmas: f64) -> bool {
        self.entries.iter().all(|d| d.z <= sigmas)
    }
}

#[derive(Clone)]
struct Tally {
    count: [u64; 2],
    joint: [[u64; 2]; 2],
    sum_re: [Vec<f64>; 2],
    sum_im: [Vec<f64>; 2],
    sq_re: [Vec<f64>; 2],
    sq_im: [Vec<f64>; 2],
}

impl Tally {
    fn new(d2: usize) -> Self {
        let z = || vec![0.0; d2];
        Self {
            count: [0; 2],
            joint: [[0; 2]; 2],
            sum_re: [z(), z()],
            sum_im: [z(), z()],
            sq_re: [z(), z()],
            sq_im: [z(), z()],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for mu in 0..2 {
            self.count[mu] += other.count[mu];
            for s in 0..2 {
                self.joint[mu][s] += other.joint[mu][s];
            }
            for (a, b) in [
                (&mut self.sum_re[mu], &other.sum_re[mu]),
                (&mut self.sum_im[mu], &other.sum_im[mu]),
                (&mut self.sq_re[mu], &other.sq_re[mu]),
                (&mut self.sq_im[mu], &other.sq_im[mu]),
            ] {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += *y;
                }
            }
        }
        self
    }
}

fn mean_and_error(sum: f64, sq: f64, count: u64) -> (f64, f64) {
    let n = count as f64;
    let mean = sum / n;
    let var = (sq / n - mean * mean).max(0.0);
    (mean, (var / (n - 1.0).max(1.0)).sqrt())
}

/// Compares sampled checks against the exact engine: post-selected states
/// per inferred parity, branch weights and the joint inference table.
pub fn mc_vs_exact<T: Real>(cfg: &ParityCheckConfig<T>, input: &PureState<T>, shots: usize, seed: u64) -> Result<McComparison> {
    if shots < MIN_COMPARISON_SHOTS {
        return Err(invalid("shots", format!("{shots} < {MIN_COMPARISON_SHOTS}")));
    }
    let exact = thresholded_inference(&run_check_exact(&DensityMatrix::from_pure(input), cfg)?)?;
    let d = input.dim();
    let tally = fold_shots(
        seed,
        shots,
        || Ok(Tally::new(d * d)),
        |acc: &mut Result<Tally>, _, rng| {
            let Ok(t) = acc else { return };
            let (step, post) = match sample_check(input, cfg, rng) {
                Ok(v) => v,
                Err(e) => {
                    *acc = Err(e);
                    return;
                }
            };
            let mu = step.inferred.index();
            t.count[mu] += 1;
            t.joint[mu][step.actual.index()] += 1;
            let a = post.amplitudes();
            for i in 0..d {
                for j in 0..d {
                    let v = a[i] * a[j].conj();
                    let (re, im) = (v.re.as_f64(), v.im.as_f64());
                    let k = i * d + j;
                    t.sum_re[mu][k] += re;
                    t.sum_im[mu][k] += im;
                    t.sq_re[mu][k] += re * re;
                    t.sq_im[mu][k] += im * im;
                }
            }
        },
        |a, b| Ok(a?.merge(b?)),
    )?;

    let mut entries = Vec::new();
    let n = shots as f64;
    for mu in Parity::BOTH {
        let m = mu.index();
        let branch = exact.branch(mu);
        let p = tally.count[m] as f64 / n;
        entries.push(Deviation {
            quantity: format!("weight[{mu}]"),
            estimate: p,
            exact: branch.weight.as_f64(),
            std_error: (p * (1.0 - p) / n).sqrt(),
            z: 0.0,
        });
        for s in Parity::BOTH {
            let q = tally.joint[m][s.index()] as f64 / n;
            entries.push(Deviation {
                quantity: format!("joint[{mu}][{s}]"),
                estimate: q,
                exact: exact.joint[m][s.index()].as_f64(),
                std_error: (q * (1.0 - q) / n).sqrt(),
                z: 0.0,
            });
        }
        let (Some(state), true) = (branch.state.as_ref(), tally.count[m] >= 2) else {
            continue;
        };
        for i in 0..d {
            for j in 0..d {
                let k = i * d + j;
                let e = state.matrix()[(i, j)];
                let (mr, sr) = mean_and_error(tally.sum_re[m][k], tally.sq_re[m][k], tally.count[m]);
                let (mi, si) = mean_and_error(tally.sum_im[m][k], tally.sq_im[m][k], tally.count[m]);
                entries.push(Deviation {
                    quantity: format!("rho[{mu}]({i},{j}).re"),
                    estimate: mr,
                    exact: e.re.as_f64(),
                    std_error: sr,
                    z: 0.0,
                });
                entries.push(Deviation {
                    quantity: format!("rho[{mu}]({i},{j}).im"),
                    estimate: mi,
                    exact: e.im.as_f64(),
                    std_error: si,
                    z: 0.0,
                });
            }
        }
    }
    // Deterministic quantities carry round-off from the exact engine's quadrature.
    let floor = 1e-9;
    for e in entries.iter_mut() {
        let dev = (e.estimate - e.exact).abs();
        e.z = if dev <= floor { 0.0 } else { z_score(dev, e.std_error) };
    }
    let max_abs_deviation = entries
        .iter()
        .map(|e| (e.estimate - e.exact).abs())
        .fold(0.0, f64::max);
    let worst = entries
        .iter()
        .max_by(|a, b| a.z.total_cmp(&b.z))
        .cloned()
        .ok_or(Error::ZeroProbability)?;
    let flagged = worst.z > FLAG_SIGMA;
    Ok(McComparison {
        shots,
        entries,
        max_abs_deviation,
        worst,
        flagged,
    })
}
