//! Circuit-QED feasibility estimates for the dispersive entangling
//! operation: reflection coefficient, infidelity budget, loss budget and the
//! tetrahedron fidelity ceiling. Rates are angular frequencies throughout.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::quad::integrate;

/// `2 pi x 1e6 x f` for a linear frequency `f` in MHz.
pub fn mhz_to_angular(f: f64) -> f64 {
    2.0 * PI * 1e6 * f
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CqedParams {
    pub omega_c: f64,
    /// Signed dispersive shift.
    pub chi: f64,
    pub kappa0: f64,
    pub kappa_int: f64,
    /// Gaussian pulse width.
    pub tau: f64,
    pub t1: f64,
    pub t2_star: f64,
    pub alpha: f64,
}

impl CqedParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega_c", self.omega_c),
            ("kappa0", self.kappa0),
            ("tau", self.tau),
            ("t1", self.t1),
            ("t2_star", self.t2_star),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(invalid(name, format!("{v} must be positive")));
            }
        }
        if !(self.kappa_int >= 0.0 && self.kappa_int.is_finite()) {
            return Err(invalid("kappa_int", format!("{} must be finite and non-negative", self.kappa_int)));
        }
        if !(self.chi.abs() > 0.0 && self.chi.is_finite()) {
            return Err(invalid("chi", "dispersive formulas need a finite nonzero shift"));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(invalid("alpha", format!("{} must be finite and non-negative", self.alpha)));
        }
        Ok(())
    }

    /// Transmon-cavity values with kappa_int/2pi = 0.22 MHz,
    /// chi/2pi = -1.05 MHz, tau = 500 ns, T2* = 6 us, dephasing limited,
    /// tuned to kappa0 = 2|chi|, alpha = 1.
    pub fn reference() -> Self {
        let chi = mhz_to_angular(-1.05);
        Self {
            omega_c: 2.0 * PI * 7e9,
            chi,
            kappa0: 2.0 * chi.abs(),
            kappa_int: mhz_to_angular(0.22),
            tau: 500e-9,
            t1: f64::INFINITY,
            t2_star: 6e-6,
            alpha: 1.0,
        }
    }

    /// Faster operating point: tau = 100 ns, |chi|/2pi = 10 MHz,
    /// min(T1, T2*) = 10 us, same internal loss.
    pub fn fast() -> Self {
        let chi = mhz_to_angular(-10.0);
        Self {
            chi,
            kappa0: 2.0 * chi.abs(),
            tau: 100e-9,
            t1: 10e-6,
            t2_star: 10e-6,
            ..Self::reference()
        }
    }
}

/// `R_s(omega)` for qubit state `s`.
pub fn reflection_coefficient(omega: f64, s: u8, p: &CqedParams) -> Complex64 {
    let sign = if s == 0 { 1.0 } else { -1.0 };
    let detune = Complex64::new(0.0, 2.0 * (omega - p.omega_c - sign * p.chi));
    (detune + p.kappa0 - p.kappa_int) / (detune - p.kappa0 - p.kappa_int)
}

/// Ideal reflection `sign(chi) (-1)^s i` at the tuned point.
fn target(s: u8, chi: f64) -> Complex64 {
    let sign = if s == 0 { 1.0 } else { -1.0 };
    Complex64::new(0.0, chi.signum() * sign)
}

/// Internal-loss contribution quoted for the reference parameters.
pub const QUOTED_INTERNAL_LOSS_TERM: f64 = 0.004;
/// `tau / min(T1, T2*)` above which the decoherence estimate is flagged.
pub const DECOHERENCE_WARNING_RATIO: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfidelityBudget {
    pub eps_reflect_numeric: f64,
    pub eps_reflect_closed: f64,
    /// `alpha^2 / (2 tau^2 chi^2)`
    pub bandwidth_term: f64,
    /// `alpha^2 kappa_int^2 / (4 chi^2)`
    pub internal_loss_term: f64,
    pub internal_loss_quoted: f64,
    pub eps_qubit: f64,
    /// `eps_qubit + eps_reflect_numeric`
    pub eps_total: f64,
    /// Set when `tau / min(T1, T2*)` exceeds [`DECOHERENCE_WARNING_RATIO`].
    pub decoherence_warning: bool,
}

/// `int dw/2pi |u(w)|^2 |target - R_s(w)|^2` for the Gaussian waveform, in
/// the scaled variable `y = (w - w_c) tau`.
fn gaussian_mismatch(s: u8, p: &CqedParams) -> Result<f64> {
    let t = target(s, p.chi);
    let f = |y: f64| {
        let r = reflection_coefficient(p.omega_c + y / p.tau, s, p);
        (-y * y).exp() * (t - r).norm_sqr()
    };
    let tol = 1e-13;
    let left = integrate(f, -12.0, 0.0, tol)?;
    let right = integrate(f, 0.0, 12.0, tol)?;
    Ok((left.value + right.value) / PI.sqrt())
}

fn eps_from_mismatch(alpha: f64, mismatch: [f64; 2]) -> f64 {
    1.0 - 0.5 * mismatch.iter().map(|m| (-alpha * alpha * m).exp()).sum::<f64>()
}

pub fn infidelity_budget(p: &CqedParams) -> Result<InfidelityBudget> {
    p.validate()?;
    let mismatch = [gaussian_mismatch(0, p)?, gaussian_mismatch(1, p)?];
    let eps_reflect_numeric = eps_from_mismatch(p.alpha, mismatch);
    let a2 = p.alpha * p.alpha;
    let chi2 = p.chi * p.chi;
    let bandwidth_term = a2 / (2.0 * p.tau * p.tau * chi2);
    let internal_loss_term = a2 * p.kappa_int * p.kappa_int / (4.0 * chi2);
    let eps_qubit = p.tau / p.t2_star;
    Ok(InfidelityBudget {
        eps_reflect_numeric,
        eps_reflect_closed: bandwidth_term + internal_loss_term,
        bandwidth_term,
        internal_loss_term,
        internal_loss_quoted: QUOTED_INTERNAL_LOSS_TERM,
        eps_qubit,
        eps_total: eps_qubit + eps_reflect_numeric,
        decoherence_warning: p.tau / p.t1.min(p.t2_star) > DECOHERENCE_WARNING_RATIO,
    })
}

/// Reflection infidelity for an arbitrary sampled spectrum `(omega, |u|^2)`,
/// integrated with the trapezoid rule. Points must be sorted by frequency.
pub fn eps_reflect_from_spectrum(p: &CqedParams, spectrum: &[(f64, f64)]) -> Result<f64> {
    p.validate()?;
    if spectrum.len() < 2 {
        return Err(invalid("spectrum", "need at least two points"));
    }
    if spectrum.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(invalid("spectrum", "frequencies must be strictly increasing"));
    }
    if spectrum.iter().any(|(_, u2)| !(*u2 >= 0.0)) {
        return Err(invalid("spectrum", "|u|^2 must be non-negative"));
    }
    let mut mismatch = [0.0; 2];
    for (s, m) in mismatch.iter_mut().enumerate() {
        let s = s as u8;
        let t = target(s, p.chi);
        let g = |(w, u2): (f64, f64)| u2 * (t - reflection_coefficient(w, s, p)).norm_sqr();
        *m = spectrum
            .windows(2)
            .map(|w| 0.5 * (w[1].0 - w[0].0) * (g(w[0]) + g(w[1])))
            .sum::<f64>()
            / (2.0 * PI);
    }
    Ok(eps_from_mismatch(p.alpha, mismatch))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityBound {
    pub f_max: f64,
    /// Set when `18 eps > 1`; `f_max` is then 0.
    pub saturated: bool,
}

/// Eighteen entangling operations per tetrahedron preparation.
pub const ENTANGLING_OPS_PER_TETRA: f64 = 18.0;

/// `F_max = 1 - 18 eps`.
pub fn tetra_fidelity_bound(eps: f64) -> Result<FidelityBound> {
    if !(eps >= 0.0 && eps <= 1.0) {
        return Err(invalid("eps", format!("{eps} is not a probability")));
    }
    let f = 1.0 - ENTANGLING_OPS_PER_TETRA * eps;
    Ok(FidelityBound {
        f_max: f.max(0.0),
        saturated: f < 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CableMaterial {
    /// 5 dB/km.
    NbTi,
    /// 0.15 dB/km.
    Al,
    Custom { db_per_km: f64 },
}

impl CableMaterial {
    pub fn db_per_km(self) -> f64 {
        match self {
            CableMaterial::NbTi => 5.0,
            CableMaterial::Al => 0.15,
            CableMaterial::Custom { db_per_km } => db_per_km,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cable {
    pub material: CableMaterial,
    pub length_km: f64,
}

/// Circulator insertion loss reported for a recent loophole-free Bell test.
pub const CIRCULATOR_INSERTION_LOSS: f64 = 0.13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBudget {
    pub eta_trans: f64,
    pub eta_circ: f64,
    /// `eta_trans + eta_circ`, not clamped.
    pub eta: f64,
    /// Set when `eta >= 1`.
    pub saturated: bool,
}

pub fn loss_budget(cable: Cable, circulators: u32, per_circulator: f64) -> Result<LossBudget> {
    if !(cable.length_km >= 0.0 && cable.length_km.is_finite()) {
        return Err(invalid("length_km", format!("{} must be non-negative", cable.length_km)));
    }
    let db = cable.material.db_per_km();
    if !(db >= 0.0 && db.is_finite()) {
        return Err(invalid("db_per_km", format!("{db} must be non-negative")));
    }
    if !(0.0..1.0).contains(&per_circulator) {
        return Err(invalid("per_circulator", format!("{per_circulator} outside [0, 1)")));
    }
    let eta_trans = 1.0 - 10f64.powf(-db * cable.length_km / 10.0);
    let eta_circ = per_circulator * f64::from(circulators);
    let eta = eta_trans + eta_circ;
    Ok(LossBudget {
        eta_trans,
        eta_circ,
        eta,
        saturated: eta >= 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lossless(chi_mhz: f64, tau: f64) -> CqedParams {
        let chi = mhz_to_angular(chi_mhz);
        CqedParams {
            chi,
            kappa0: 2.0 * chi.abs(),
            kappa_int: 0.0,
            tau,
            ..CqedParams::reference()
        }
    }

    #[test]
    fn tuned_reflection_is_plus_minus_i() {
        let p = lossless(1.0, 500e-9);
        let r0 = reflection_coefficient(p.omega_c, 0, &p);
        let r1 = reflection_coefficient(p.omega_c, 1, &p);
        assert!((r0 - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((r1 - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        let dphi = (r0.arg() - r1.arg()).rem_euclid(2.0 * PI);
        assert!((dphi - PI).abs() < 1e-12);
        // Negative shift swaps the two phases.
        let q = lossless(-1.0, 500e-9);
        assert!((reflection_coefficient(q.omega_c, 0, &q) - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn far_detuned_reflection_is_unity() {
        let p = CqedParams::reference();
        let r = reflection_coefficient(p.omega_c + 1e4 * p.kappa0, 1, &p);
        assert!((r - Complex64::new(1.0, 0.0)).norm() < 1e-3);
    }

    #[test]
    fn reference_values() {
        let b = infidelity_budget(&CqedParams::reference()).unwrap();
        assert!((b.bandwidth_term - 0.046).abs() < 5e-4, "{}", b.bandwidth_term);
        assert!((b.bandwidth_term - 0.045_951).abs() < 1e-6);
        assert!((b.eps_qubit - 0.0833).abs() < 1e-4);
        // The internal-loss term as printed evaluates to 0.011, not the
        // quoted 0.004.
        assert!((b.internal_loss_term - 0.010_975).abs() < 1e-6);
        assert_eq!(b.internal_loss_quoted, 0.004);
        assert!((b.eps_reflect_closed - 0.056_926).abs() < 1e-5);
        assert!((b.eps_reflect_numeric - 0.051_77).abs() < 1e-4, "{}", b.eps_reflect_numeric);
        assert!((b.eps_total - b.eps_qubit - b.eps_reflect_numeric).abs() < 1e-15);
        assert!(!b.decoherence_warning);
    }

    #[test]
    fn doubled_shift_value() {
        let p = CqedParams {
            chi: mhz_to_angular(-2.10),
            kappa0: mhz_to_angular(4.20),
            ..CqedParams::reference()
        };
        let b = infidelity_budget(&p).unwrap();
        assert!((b.bandwidth_term - 0.011_488).abs() < 1e-6);
    }

    #[test]
    fn fast_operating_point() {
        let b = infidelity_budget(&CqedParams::fast()).unwrap();
        assert!((b.bandwidth_term - 1.0 / (8.0 * PI * PI)).abs() < 1e-12);
        assert!((b.eps_qubit - 0.01).abs() < 1e-12);
        assert!(b.eps_reflect_closed > 0.01);
        assert!((b.eps_reflect_numeric - b.eps_reflect_closed).abs() / b.eps_reflect_closed < 0.05);
    }

    #[test]
    fn closed_form_tracks_numeric_in_validity_region() {
        // Grid over kappa_int/|chi| <= 0.1 and tau |chi| >= 5.
        let chi = mhz_to_angular(-2.0);
        let mut worst: f64 = 0.0;
        for ratio in [0.0, 0.02, 0.05, 0.1] {
            for tc in [5.0, 8.0, 12.0, 20.0, 40.0] {
                for alpha in [0.5, 1.0, 1.5] {
                    let p = CqedParams {
                        chi,
                        kappa0: 2.0 * chi.abs(),
                        kappa_int: ratio * chi.abs(),
                        tau: tc / chi.abs(),
                        alpha,
                        ..CqedParams::reference()
                    };
                    let b = infidelity_budget(&p).unwrap();
                    let rel = (b.eps_reflect_closed - b.eps_reflect_numeric).abs() / b.eps_reflect_numeric;
                    worst = worst.max(rel);
                }
            }
        }
        assert!(worst < 0.2, "worst relative deviation {worst}");
    }

    #[test]
    fn narrow_band_lossless_limit_vanishes() {
        let eps: Vec<f64> = [1e-6, 1e-5, 1e-4, 1e-3]
            .iter()
            .map(|&tau| infidelity_budget(&lossless(-1.05, tau)).unwrap().eps_reflect_numeric)
            .collect();
        assert!(eps.windows(2).all(|w| w[1] < w[0]));
        assert!(eps[3] < 1e-6);
    }

    #[test]
    fn spectrum_grid_matches_gaussian_quadrature() {
        let p = CqedParams::reference();
        let n = 4001;
        let span = 12.0 / p.tau;
        let grid: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let d = -span + 2.0 * span * k as f64 / (n - 1) as f64;
                (p.omega_c + d, 2.0 * PI.sqrt() * p.tau * (-(d * p.tau).powi(2)).exp())
            })
            .collect();
        let grid_eps = eps_reflect_from_spectrum(&p, &grid).unwrap();
        let b = infidelity_budget(&p).unwrap();
        assert!((grid_eps - b.eps_reflect_numeric).abs() < 1e-8);
        assert!(eps_reflect_from_spectrum(&p, &grid[..1]).is_err());
    }

    #[test]
    fn decoherence_warning_threshold() {
        let p = CqedParams {
            t1: 2e-6,
            ..CqedParams::reference()
        };
        assert!(infidelity_budget(&p).unwrap().decoherence_warning);
    }

    #[test]
    fn parameter_validation() {
        let bad = [
            CqedParams { chi: 0.0, ..CqedParams::reference() },
            CqedParams { tau: -1.0, ..CqedParams::reference() },
            CqedParams { kappa_int: -1.0, ..CqedParams::reference() },
            CqedParams { kappa0: 0.0, ..CqedParams::reference() },
        ];
        for p in bad {
            assert!(infidelity_budget(&p).is_err());
        }
    }

    #[test]
    fn fidelity_bound_values() {
        assert!((tetra_fidelity_bound(0.01).unwrap().f_max - 0.82).abs() < 1e-12);
        assert_eq!(tetra_fidelity_bound(0.0).unwrap().f_max, 1.0);
        let s = tetra_fidelity_bound(0.1).unwrap();
        assert!(s.saturated && s.f_max == 0.0);
        // F_max > 1/2 requires eps < 1/36.
        assert!(tetra_fidelity_bound(1.0 / 36.0 - 1e-6).unwrap().f_max > 0.5);
        assert!(tetra_fidelity_bound(1.0 / 36.0 + 1e-6).unwrap().f_max < 0.5);
        assert!(tetra_fidelity_bound(-0.1).is_err());
    }

    #[test]
    fn loss_budget_values() {
        let nbti = loss_budget(Cable { material: CableMaterial::NbTi, length_km: 1.0 }, 0, 0.0).unwrap();
        assert!((nbti.eta_trans - 0.684).abs() < 1e-3);
        let al = loss_budget(Cable { material: CableMaterial::Al, length_km: 1.0 }, 0, 0.0).unwrap();
        assert!((al.eta_trans - 0.034).abs() < 1e-3);
        let circ = loss_budget(Cable { material: CableMaterial::Al, length_km: 0.0 }, 1, CIRCULATOR_INSERTION_LOSS).unwrap();
        assert_eq!(circ.eta_circ, 0.13);
        assert_eq!(circ.eta, 0.13);
        let sat = loss_budget(Cable { material: CableMaterial::NbTi, length_km: 1.0 }, 3, 0.13).unwrap();
        assert!(sat.saturated);
        assert!(loss_budget(Cable { material: CableMaterial::Al, length_km: -1.0 }, 0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn lossless_reflection_is_unitary(d in -50.0f64..50.0, s in 0u8..2) {
            let p = CqedParams { kappa_int: 0.0, ..CqedParams::reference() };
            let r = reflection_coefficient(p.omega_c + d * p.kappa0, s, &p);
            prop_assert!((r.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn reflection_numeric_is_monotone_in_alpha(a in 0.1f64..2.0, k in 1.01f64..2.0) {
            let p = CqedParams { alpha: a, ..CqedParams::reference() };
            let q = CqedParams { alpha: a * k, ..CqedParams::reference() };
            let (bp, bq) = (infidelity_budget(&p).unwrap(), infidelity_budget(&q).unwrap());
            prop_assert!(bq.eps_reflect_numeric > bp.eps_reflect_numeric);
            prop_assert!((bq.eps_reflect_closed / bp.eps_reflect_closed - k * k).abs() < 1e-12);
        }
    }
}
