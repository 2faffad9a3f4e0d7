use crate::error::{invalid, Error, Result};
use crate::field::{propagate_losses, CoherentAmplitude, LossProfile};
use crate::scalar::Real;

/// Error probabilities of a single check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBudget<T> {
    /// Loss in the first segment (hook error on the tail qubits).
    pub p1: T,
    /// Loss in the second segment; zero for weight-2 checks.
    pub p2: T,
    /// Misread parity, `erfc(sqrt2 abar) / 2`.
    pub p_m: T,
    /// `p_m + p1 + p2`.
    pub p_tot: T,
    /// `1 - (1 - p_m)(1 - p1)(1 - p2)`, keeping the cross terms.
    pub p_any: T,
    /// Large-alpha form as printed: `exp(-2a^2) / (2 a sqrt(2 pi)) + (1/2) sum eta_j a^2`.
    pub p_tot_asymptotic: T,
    /// Same, with the loss term at its leading order `sum eta_j a^2`.
    pub p_tot_asymptotic_leading: T,
}

/// Exact budget at real amplitude `alpha` for a weight-2 or weight-3 check.
pub fn error_budget<T: Real>(alpha: T, losses: &LossProfile<T>) -> Result<ErrorBudget<T>> {
    if !(alpha > T::zero() && alpha.is_finite()) {
        return Err(invalid("alpha", format!("{alpha} must be finite and positive")));
    }
    if !(2..=3).contains(&losses.len()) {
        return Err(invalid("losses", format!("check weight {} not in {{2, 3}}", losses.len())));
    }
    let (abar, leaked) = propagate_losses(CoherentAmplitude::real(alpha)?, losses);
    let p_of = |k: usize| {
        if k + 1 < losses.len() {
            T::half() * (T::one() - (-T::two() * leaked[k].mean_photons()).exp())
        } else {
            T::zero()
        }
    };
    let (p1, p2) = (p_of(0), p_of(1));
    let p_m = T::half() * (T::SQRT_2() * abar.value.re).erfc();
    let a2 = alpha * alpha;
    let eta_sum = losses.etas()[..losses.len() - 1]
        .iter()
        .fold(T::zero(), |acc, e| acc + *e);
    let tail = (-T::two() * a2).exp() / (alpha * (T::two() * T::PI()).sqrt()) * T::half();
    Ok(ErrorBudget {
        p1,
        p2,
        p_m,
        p_tot: p_m + p1 + p2,
        p_any: T::one() - (T::one() - p_m) * (T::one() - p1) * (T::one() - p2),
        p_tot_asymptotic: tail + T::half() * eta_sum * a2,
        p_tot_asymptotic_leading: tail + eta_sum * a2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum<T> {
    pub alpha: T,
    pub p_tot: T,
}

const GRID_POINTS: usize = 400;
const GOLDEN_TOL: f64 = 1e-10;

/// Minimizes the exact `p_tot` over `alpha` in `[lo, hi]`: grid scan for a
/// bracket, then golden-section refinement.
pub fn optimize_alpha<T: Real>(losses: &LossProfile<T>, lo: T, hi: T) -> Result<Optimum<T>> {
    if !(lo > T::zero() && hi > lo && hi.is_finite()) {
        return Err(invalid("window", format!("[{lo}, {hi}] must satisfy 0 < lo < hi")));
    }
    if !(2..=3).contains(&losses.len()) {
        return Err(invalid("losses", format!("check weight {} not in {{2, 3}}", losses.len())));
    }
    if losses.etas()[..losses.len() - 1].iter().all(|e| *e == T::zero()) {
        return Err(Error::Unbounded(
            "no loss before the last interaction; p_tot falls monotonically with alpha".into(),
        ));
    }
    let f = |a: T| error_budget(a, losses).map(|b| b.p_tot);
    let step = (hi - lo) / T::lit((GRID_POINTS - 1) as f64);
    let grid: Vec<T> = (0..GRID_POINTS).map(|i| lo + step * T::lit(i as f64)).collect();
    let values = grid.iter().map(|a| f(*a)).collect::<Result<Vec<_>>>()?;
    let best = (0..GRID_POINTS)
        .min_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(0);
    if best == 0 || best == GRID_POINTS - 1 {
        return Err(Error::NoInteriorMinimum {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }
    let (mut a, mut b) = (grid[best - 1], grid[best + 1]);
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) * T::half();
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    let tol = T::lit(GOLDEN_TOL).max(T::epsilon().sqrt());
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        }
    }
    let alpha = (a + b) * T::half();
    Ok(Optimum {
        alpha,
        p_tot: f(alpha)?,
    })
}
