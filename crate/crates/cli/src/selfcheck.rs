use flycat::montecarlo::mc_vs_exact;
use flycat::netstates::{
    ghz_state, prepare_ghz, tetra_target, witness_expectation, DecoderTable, Mode, TetraSyndrome, WitnessMode,
};
use flycat::paritycheck::{apply_dephasing, run_check_exact, Basis, ParityCheckConfig};
use flycat::qcore::{haar_state, BellLabel, CMatrix, DensityMatrix, Pauli, PauliString};
use flycat::rng::shot_rng;
use flycat::scalar::{cr, Real};
use flycat::teleport::{teleport_branch, TwoQubitMessage};
use rayon::prelude::*;

use crate::commands::{even_sector_state, row_seed};
use crate::config::{Command, ScenarioConfig};
use crate::report::RunReport;

/// Shots for the reduced Monte Carlo comparison.
pub const SELFCHECK_SHOTS: usize = 20_000;
/// z-score allowed in the reduced comparison.
pub const SELFCHECK_SIGMAS: f64 = 5.0;

struct Outcome {
    passed: bool,
    metric: f64,
    detail: String,
}

impl Outcome {
    fn from_result(r: flycat::Result<Outcome>) -> Outcome {
        r.unwrap_or_else(|e| Outcome {
            passed: false,
            metric: f64::NAN,
            detail: e.to_string(),
        })
    }
}

fn decoder_table(table: &DecoderTable) -> Outcome {
    match table.verify() {
        Ok(()) => Outcome {
            passed: true,
            metric: 0.0,
            detail: "rows match stabilizer commutation".into(),
        },
        Err(e) => Outcome {
            passed: false,
            metric: 1.0,
            detail: e.to_string(),
        },
    }
}

fn pattern(bits: usize, kind: Pauli) -> flycat::Result<PauliString> {
    let qubits: Vec<usize> = (0..6).filter(|q| bits >> q & 1 == 1).collect();
    PauliString::on_qubits(6, &qubits, kind)
}

/// Every X pattern, every Z pattern, and every combination, decoded with
/// `table`; the residual must leave `|T>` unchanged.
fn decoder_exhaustion(table: &DecoderTable) -> flycat::Result<Outcome> {
    let target = tetra_target::<f64>();
    let worst = (0..4096usize)
        .into_par_iter()
        .map(|k| -> flycat::Result<f64> {
            let e = pattern(k & 63, Pauli::X)?.mul_ignoring_phase(&pattern(k >> 6, Pauli::Z)?)?;
            let c = table.correction(&TetraSyndrome::of_error(&e)?)?;
            let residual = c.mul_ignoring_phase(&e)?;
            Ok(1.0 - target.overlap_sqr(&target.apply_pauli(&residual)?)?)
        })
        .collect::<flycat::Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(Outcome {
        passed: worst < 1e-9,
        metric: worst,
        detail: "4096 patterns; metric is the worst infidelity".into(),
    })
}

fn sector_projector(parity: u32) -> CMatrix<f64> {
    let mut m = CMatrix::zeros(8);
    for s in 0..8usize {
        if s.count_ones() % 2 == parity {
            m[(s, s)] = cr(1.0);
        }
    }
    m
}

/// Dephasing composition against the exact diagonal blocks on random inputs.
fn channel_equivalence(seed: u64) -> flycat::Result<Outcome> {
    let mut worst: f64 = 0.0;
    for k in 0..20u64 {
        let mut rng = shot_rng(seed, k);
        let a = DensityMatrix::from_pure(&haar_state::<f64, _>(3, &mut rng)?);
        let b = DensityMatrix::from_pure(&haar_state::<f64, _>(3, &mut rng)?);
        let rho = DensityMatrix::mixture(&[(0.7, a), (0.3, b)])?;
        let etas: Vec<f64> = (0..3).map(|_| 0.1 * f64::sample_unit(&mut rng)).collect();
        let alpha = 0.2 + 1.8 * f64::sample_unit(&mut rng);
        let cfg = ParityCheckConfig::new(alpha, flycat::field::LossProfile::new(etas)?, Basis::Z)?;
        let pre = run_check_exact(&rho, &cfg)?;
        let composed = apply_dephasing(&rho, &cfg)?;
        for s in 0..2 {
            let p = sector_projector(s);
            let block = &(&p * composed.matrix()) * &p;
            worst = worst.max(pre.blocks()[s as usize][s as usize].max_abs_diff(&block));
        }
    }
    Ok(Outcome {
        passed: worst < 1e-12,
        metric: worst,
        detail: "20 random inputs; metric is the largest entry difference".into(),
    })
}

fn mc_against_exact(seed: u64) -> flycat::Result<Outcome> {
    let cfg = ParityCheckConfig::uniform(1.0, 0.02, 3, Basis::Z)?;
    let input = even_sector_state(3, Basis::Z, seed).map_err(|e| flycat::Error::InvalidState(e.to_string()))?;
    let cmp = mc_vs_exact(&cfg, &input, SELFCHECK_SHOTS, seed)?;
    Ok(Outcome {
        passed: cmp.within(SELFCHECK_SIGMAS),
        metric: cmp.worst.z,
        detail: format!("{} shots; metric is the worst z ({})", cmp.shots, cmp.worst.quantity),
    })
}

fn teleport_cooperation(seed: u64) -> flycat::Result<Outcome> {
    let mut worst: f64 = 0.0;
    for k in 0..4 {
        let msg = TwoQubitMessage::haar(&mut shot_rng(row_seed(seed, k), 0));
        for l1 in BellLabel::ALL {
            for l2 in BellLabel::ALL {
                for z in 0..2u8 {
                    for plus in [true, false] {
                        let (prob, out) = teleport_branch(&msg, [l1, l2], Some((z, plus)))?;
                        if prob > 1e-12 {
                            worst = worst.max(1.0 - out.fidelity);
                        }
                    }
                }
            }
        }
    }
    Ok(Outcome {
        passed: worst < 1e-9,
        metric: worst,
        detail: "4 messages x 64 branches; metric is the worst infidelity".into(),
    })
}

fn witness_anchors() -> flycat::Result<Outcome> {
    let t = witness_expectation(&DensityMatrix::from_pure(&tetra_target()), WitnessMode::Exact)?;
    let mixed = witness_expectation(&DensityMatrix::maximally_mixed(6)?, WitnessMode::Exact)?;
    let gap = (t.value + 0.5).abs().max((mixed.value - 1.25).abs());
    Ok(Outcome {
        passed: gap < 1e-12,
        metric: gap,
        detail: "target gives -1/2, maximally mixed gives 5/4".into(),
    })
}

/// Branch-averaged GHZ fidelity against its product formula.
fn ghz_formula(seed: u64) -> flycat::Result<Outcome> {
    let (alpha, e12, e23) = (1.2, 0.03, 0.05);
    let (state, pred) = prepare_ghz::<f64, _>(alpha, e12, e23, &mut shot_rng(seed, 0), Mode::Exact)?;
    let f = state.fidelity(&ghz_state())?;
    let formula = (1.0 - pred.q12) * (1.0 - pred.q23) * ((1.0 - pred.p12) * (1.0 - pred.p23) + pred.p12 * pred.p23);
    let gap = (f - formula).abs();
    Ok(Outcome {
        passed: gap < 1e-12,
        metric: gap,
        detail: "exact GHZ fidelity vs closed form".into(),
    })
}

/// Runs every suite with the given decoder table.
pub fn selfcheck_with(cfg: &ScenarioConfig, table: &DecoderTable) -> RunReport {
    let seed = cfg.seed;
    let suites: Vec<(&str, Outcome)> = vec![
        ("decoder-table", decoder_table(table)),
        ("decoder-exhaustion", Outcome::from_result(decoder_exhaustion(table))),
        ("channel-equivalence", Outcome::from_result(channel_equivalence(seed))),
        ("mc-vs-exact", Outcome::from_result(mc_against_exact(seed))),
        ("teleport-cooperation", Outcome::from_result(teleport_cooperation(seed))),
        ("witness-anchors", Outcome::from_result(witness_anchors())),
        ("ghz-formula", Outcome::from_result(ghz_formula(seed))),
    ];
    let mut r = RunReport::new(cfg, &["suite", "passed", "metric", "detail"]);
    for (name, o) in suites {
        r.ok &= o.passed;
        r.push(vec![name.into(), o.passed.into(), o.metric.into(), o.detail.into()]);
    }
    r
}

pub fn selfcheck(seed: u64) -> RunReport {
    let mut cfg = ScenarioConfig::new(Command::Selfcheck);
    cfg.seed = seed;
    selfcheck_with(&cfg, &DecoderTable::standard())
}

/// Names of the failing suites.
pub fn failed_suites(report: &RunReport) -> Vec<String> {
    report
        .rows
        .iter()
        .filter(|r| r[1].as_num() != Some(1.0))
        .filter_map(|r| match &r[0] {
            crate::report::Cell::Text(t) => Some(t.clone()),
            _ => None,
        })
        .collect()
}
