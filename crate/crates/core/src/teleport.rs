//! Controlled teleportation of a two-qubit state through the tetrahedron
//! state. Register layout: `[A1, A2, 1, 2, 3, 4, 5, 6]`; Alice holds A1, A2,
//! 1, 2, Bob holds 3, 4 and Charlie holds 5, 6.

use rand::Rng;

use crate::error::{invalid, Result};
use crate::netstates::tetra_target;
use crate::qcore::{bell_measure, bell_project, BellLabel, DensityMatrix, Pauli, PauliString, PureState};
use crate::rng::fold_shots;
use crate::scalar::{Complex, Real};

const ALICE_PAIRS: [(usize, usize); 2] = [(0, 2), (1, 3)];
const BOB: [usize; 2] = [4, 5];
/// Charlie reads qubit 5 in Z and qubit 6 in X.
const CHARLIE_Z: usize = 6;
const CHARLIE_X: usize = 7;

/// `a |Phi+> + b |Psi+> + c |Psi-> + d |Phi->`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitMessage {
    pub a: Complex<f64>,
    pub b: Complex<f64>,
    pub c: Complex<f64>,
    pub d: Complex<f64>,
}

impl TwoQubitMessage {
    pub fn new(a: Complex<f64>, b: Complex<f64>, c: Complex<f64>, d: Complex<f64>) -> Result<Self> {
        let norm = a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr();
        if !((norm - 1.0).abs() <= 1e-9) {
            return Err(invalid("message", format!("squared norm {norm}, expected 1")));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn bell(label: BellLabel) -> Self {
        let mut coeffs = [Complex::new(0.0, 0.0); 4];
        coeffs[BellLabel::ALL.iter().position(|l| *l == label).unwrap_or(0)] = Complex::new(1.0, 0.0);
        let [a, b, c, d] = coeffs;
        Self { a, b, c, d }
    }

    /// Bell-basis coefficients of a two-qubit state.
    pub fn from_state(psi: &PureState<f64>) -> Result<Self> {
        if psi.n() != 2 {
            return Err(invalid("message", format!("{} qubits, expected 2", psi.n())));
        }
        let proj = |l: BellLabel| -> Result<Complex<f64>> { l.state::<f64>().inner(psi) };
        Self::new(
            proj(BellLabel::PhiPlus)?,
            proj(BellLabel::PsiPlus)?,
            proj(BellLabel::PsiMinus)?,
            proj(BellLabel::PhiMinus)?,
        )
    }

    pub fn haar<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_state(&crate::qcore::haar_two_qubit(rng)).expect("Haar state is normalized")
    }

    pub fn state(&self) -> PureState<f64> {
        let coeffs = [self.a, self.b, self.c, self.d];
        let mut amps = vec![Complex::new(0.0, 0.0); 4];
        for (w, label) in coeffs.iter().zip(BellLabel::ALL) {
            for (amp, b) in amps.iter_mut().zip(label.coefficients::<f64>()) {
                *amp += w * b;
            }
        }
        PureState::normalized(2, amps).expect("message is normalized")
    }
}

/// Charlie's readout: Z bit on qubit 5 and X sign (`true` for `|+>`) on qubit 6.
pub type CharlieOutcome = (u8, bool);

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportOutcome {
    pub alice: [BellLabel; 2],
    pub charlie: Option<CharlieOutcome>,
    pub bob: DensityMatrix<f64>,
    pub fidelity: f64,
}

fn single(n: usize, q: usize, p: Pauli) -> PauliString {
    PauliString::on_qubits(n, &[q], p).expect("qubit in range")
}

/// Bob's correction for one of Alice's outcomes, applied to `qubit`.
fn alice_correction(psi: &PureState<f64>, label: BellLabel, qubit: usize) -> Result<PureState<f64>> {
    let n = psi.n();
    match label {
        BellLabel::PhiPlus => Ok(psi.clone()),
        BellLabel::PsiPlus => psi.apply_pauli(&single(n, qubit, Pauli::X)),
        BellLabel::PhiMinus => psi.apply_pauli(&single(n, qubit, Pauli::Z)),
        BellLabel::PsiMinus => psi
            .apply_pauli(&single(n, qubit, Pauli::X))?
            .apply_pauli(&single(n, qubit, Pauli::Z)),
    }
}

fn charlie_correction(psi: &PureState<f64>, (z, plus): CharlieOutcome) -> Result<PureState<f64>> {
    let n = psi.n();
    let mut out = psi.clone();
    if z == 1 {
        out = out.apply_pauli(&PauliString::on_qubits(n, &BOB, Pauli::X)?)?;
    }
    if !plus {
        out = out.apply_pauli(&PauliString::on_qubits(n, &BOB, Pauli::Z)?)?;
    }
    Ok(out)
}

fn resource(msg: &TwoQubitMessage) -> Result<PureState<f64>> {
    msg.state().tensor(&tetra_target())
}

fn finish(
    msg: &TwoQubitMessage,
    after_alice: PureState<f64>,
    alice: [BellLabel; 2],
    charlie: Option<(CharlieOutcome, PureState<f64>)>,
) -> Result<TeleportOutcome> {
    let (charlie, state) = match charlie {
        Some((outcome, post)) => (Some(outcome), charlie_correction(&post, outcome)?),
        None => (None, after_alice),
    };
    let bob = DensityMatrix::reduced_from_pure(&state, &BOB)?;
    let phi = msg.state();
    let fidelity = crate::qcore::fidelity(&bob, &phi)?.as_f64();
    Ok(TeleportOutcome {
        alice,
        charlie,
        bob,
        fidelity,
    })
}

/// Runs the protocol with sampled measurement outcomes.
pub fn run_teleport<R: Rng + ?Sized>(msg: &TwoQubitMessage, cooperate: bool, rng: &mut R) -> Result<TeleportOutcome> {
    let mut psi = resource(msg)?;
    let mut alice = [BellLabel::PhiPlus; 2];
    for (k, pair) in ALICE_PAIRS.into_iter().enumerate() {
        let (label, post) = bell_measure(&psi, pair, rng)?;
        alice[k] = label;
        psi = alice_correction(&post, label, BOB[k])?;
    }
    let charlie = if cooperate {
        let (z, post) = psi.measure_z(CHARLIE_Z, rng)?;
        let (plus, post) = post.measure_x(CHARLIE_X, rng)?;
        Some(((z, plus), post))
    } else {
        None
    };
    finish(msg, psi, alice, charlie)
}

/// Deterministic branch: returns its Born probability and the outcome.
pub fn teleport_branch(
    msg: &TwoQubitMessage,
    alice: [BellLabel; 2],
    charlie: Option<CharlieOutcome>,
) -> Result<(f64, TeleportOutcome)> {
    let mut psi = resource(msg)?;
    let mut prob = 1.0;
    for (k, pair) in ALICE_PAIRS.into_iter().enumerate() {
        let (p, post) = bell_project(&psi, pair, alice[k])?;
        prob *= p;
        psi = alice_correction(&post, alice[k], BOB[k])?;
    }
    let charlie = match charlie {
        Some((z, plus)) => {
            let (pz, post) = psi.project_z(CHARLIE_Z, z)?;
            let (px, post) = post.project_x(CHARLIE_X, plus)?;
            prob *= pz * px;
            Some(((z, plus), post))
        }
        None => None,
    };
    Ok((prob, finish(msg, psi, alice, charlie)?))
}

/// Bob and Charlie's four qubits after Alice's corrections, for one of her
/// outcome pairs.
pub fn bob_charlie_state(msg: &TwoQubitMessage, alice: [BellLabel; 2]) -> Result<DensityMatrix<f64>> {
    let mut psi = resource(msg)?;
    for (k, pair) in ALICE_PAIRS.into_iter().enumerate() {
        psi = alice_correction(&bell_project(&psi, pair, alice[k])?.1, alice[k], BOB[k])?;
    }
    DensityMatrix::reduced_from_pure(&psi, &[4, 5, 6, 7])
}

/// Born-weighted fidelity without Charlie, over all sixteen Alice outcomes.
pub fn uncontrolled_fidelity(msg: &TwoQubitMessage) -> Result<f64> {
    let mut total = 0.0;
    for l1 in BellLabel::ALL {
        for l2 in BellLabel::ALL {
            let (p, out) = teleport_branch(msg, [l1, l2], None)?;
            total += p * out.fidelity;
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageFidelity {
    pub fbar: f64,
    pub std_error: f64,
    /// `1 - fbar`
    pub control_power: f64,
    pub samples: usize,
}

pub const MIN_HAAR_SAMPLES: usize = 10_000;

/// Haar average of the fidelity Bob reaches without Charlie.
pub fn average_fidelity(samples: usize, seed: u64) -> Result<AverageFidelity> {
    if samples < MIN_HAAR_SAMPLES {
        return Err(invalid("samples", format!("{samples} < {MIN_HAAR_SAMPLES}")));
    }
    let (sum, sq) = fold_shots(
        seed,
        samples,
        || Ok((0.0, 0.0)),
        |acc: &mut Result<(f64, f64)>, _, rng| {
            if let Ok((s, q)) = acc {
                match uncontrolled_fidelity(&TwoQubitMessage::haar(rng)) {
                    Ok(f) => {
                        *s += f;
                        *q += f * f;
                    }
                    Err(e) => *acc = Err(e),
                }
            }
        },
        |a, b| {
            let (a, b) = (a?, b?);
            Ok((a.0 + b.0, a.1 + b.1))
        },
    )?;
    let n = samples as f64;
    let fbar = sum / n;
    let var = (sq / n - fbar * fbar).max(0.0) * n / (n - 1.0);
    Ok(AverageFidelity {
        fbar,
        std_error: (var / n).sqrt(),
        control_power: 1.0 - fbar,
        samples,
    })
}
