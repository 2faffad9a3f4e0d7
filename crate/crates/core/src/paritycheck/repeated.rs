use crate::error::{invalid, Result};
use crate::field::{gaussian_amplitude, propagate_losses, CoherentAmplitude, LossProfile};
use crate::paritycheck::Parity;
use crate::rng::fold_shots;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionMode {
    /// Sum of per-shot log-likelihood ratios.
    Soft,
    /// Majority vote over thresholded shots.
    Hard,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepeatedDecision {
    pub error: f64,
    pub std_error: f64,
    pub trials: usize,
}

/// Monte Carlo error rate of inferring an even parity from `n` homodyne
/// shots, each at amplitude `alpha0` through `losses`.
pub fn repeated_decision<T: Real>(
    n: usize,
    alpha0: T,
    losses: &LossProfile<T>,
    mode: DecisionMode,
    trials: usize,
    seed: u64,
) -> Result<RepeatedDecision> {
    if n == 0 {
        return Err(invalid("n", "at least one shot is required"));
    }
    if mode == DecisionMode::Hard && n % 2 == 0 {
        return Err(invalid("n", format!("majority vote needs an odd shot count, got {n}")));
    }
    if trials == 0 {
        return Err(invalid("trials", "must be positive"));
    }
    if !(alpha0 > T::zero() && alpha0.is_finite()) {
        return Err(invalid("alpha0", format!("{alpha0} must be finite and positive")));
    }
    let abar = propagate_losses(CoherentAmplitude::real(alpha0)?, losses).0.value.re;
    let mean = T::SQRT_2() * abar;
    let spread = T::FRAC_1_SQRT_2();
    let errors: u64 = fold_shots(
        seed,
        trials,
        || 0u64,
        |acc, _, rng| {
            let mut llr = T::zero();
            let mut odd_votes = 0;
            for _ in 0..n {
                let x = mean + spread * T::sample_standard_normal(rng);
                match mode {
                    DecisionMode::Soft => {
                        let (ge, go) = (gaussian_amplitude(x, abar), gaussian_amplitude(x, -abar));
                        llr += T::two() * (ge.ln() - go.ln());
                    }
                    DecisionMode::Hard => {
                        if Parity::from_quadrature(x) == Parity::Odd {
                            odd_votes += 1;
                        }
                    }
                }
            }
            let wrong = match mode {
                DecisionMode::Soft => Parity::from_quadrature(llr) == Parity::Odd,
                DecisionMode::Hard => 2 * odd_votes > n,
            };
            *acc += u64::from(wrong);
        },
        |a, b| a + b,
    );
    let p = errors as f64 / trials as f64;
    Ok(RepeatedDecision {
        error: p,
        std_error: (p * (1.0 - p) / trials as f64).sqrt(),
        trials,
    })
}
