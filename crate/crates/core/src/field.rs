//! Coherent-state labels: overlaps, beam-splitter loss cascades and
//! homodyne wavefunctions.

use crate::error::{invalid, Result};
use crate::scalar::{c, Complex, Real};

/// Coherent-state amplitude; `|value|^2` is the mean photon number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentAmplitude<T> {
    pub value: Complex<T>,
}

impl<T: Real> CoherentAmplitude<T> {
    pub fn new(value: Complex<T>) -> Result<Self> {
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(invalid("alpha", format!("non-finite amplitude {value}")));
        }
        Ok(Self { value })
    }

    pub fn real(x: T) -> Result<Self> {
        Self::new(c(x, T::zero()))
    }

    pub fn mean_photons(&self) -> T {
        self.value.norm_sqr()
    }

    /// The real part, or an error if the amplitude carries a phase.
    pub fn as_real(&self) -> Result<T> {
        if self.value.im.abs() > T::tolerance() * (T::one() + self.value.re.abs()) {
            return Err(invalid(
                "alpha",
                format!("{} is not real; rotate the phase reference first", self.value),
            ));
        }
        Ok(self.value.re)
    }
}

/// Ordered reflectivities of the loss segments behind each qubit interaction.
#[derive(Debug, Clone, PartialEq)]
pub struct LossProfile<T> {
    etas: Vec<T>,
}

impl<T: Real> LossProfile<T> {
    pub fn new(etas: Vec<T>) -> Result<Self> {
        for &eta in &etas {
            if !(eta >= T::zero() && eta < T::one()) {
                return Err(invalid("eta", format!("{eta} outside [0, 1)")));
            }
        }
        Ok(Self { etas })
    }

    pub fn uniform(eta: T, n: usize) -> Result<Self> {
        Self::new(vec![eta; n])
    }

    pub fn lossless(n: usize) -> Self {
        Self {
            etas: vec![T::zero(); n],
        }
    }

    pub fn etas(&self) -> &[T] {
        &self.etas
    }

    pub fn len(&self) -> usize {
        self.etas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.etas.is_empty()
    }

    pub fn is_lossless(&self) -> bool {
        self.etas.iter().all(|e| *e == T::zero())
    }

    /// Product of the transmissivities `prod (1 - eta_i)`.
    pub fn transmission(&self) -> T {
        self.etas.iter().fold(T::one(), |acc, e| acc * (T::one() - *e))
    }
}

/// `<b|a> = exp(-|a|^2/2 - |b|^2/2 + conj(b) a)`
pub fn coherent_overlap<T: Real>(a: CoherentAmplitude<T>, b: CoherentAmplitude<T>) -> Complex<T> {
    let (a, b) = (a.value, b.value);
    let exponent = b.conj() * a - c((a.norm_sqr() + b.norm_sqr()) * T::half(), T::zero());
    exponent.exp()
}

/// Surviving amplitude after the cascade and the amplitude leaked into each
/// loss mode. Segment `k` sees the field already attenuated by segments `< k`.
pub fn propagate_losses<T: Real>(
    alpha: CoherentAmplitude<T>,
    losses: &LossProfile<T>,
) -> (CoherentAmplitude<T>, Vec<CoherentAmplitude<T>>) {
    let mut running = alpha.value;
    let mut leaked = Vec::with_capacity(losses.len());
    for &eta in losses.etas() {
        leaked.push(CoherentAmplitude {
            value: running * eta.sqrt(),
        });
        running = running * (T::one() - eta).sqrt();
    }
    (CoherentAmplitude { value: running }, leaked)
}

/// Position-quadrature wavefunction `<x|alpha> = pi^(-1/4) exp(-(x - sqrt2 alpha)^2 / 2)`
/// for real `alpha`.
pub fn homodyne_amplitude<T: Real>(x: T, alpha: CoherentAmplitude<T>) -> Result<T> {
    Ok(gaussian_amplitude(x, alpha.as_real()?))
}

/// `|<x|alpha>|^2`
pub fn homodyne_density<T: Real>(x: T, alpha: CoherentAmplitude<T>) -> Result<T> {
    let g = homodyne_amplitude(x, alpha)?;
    Ok(g * g)
}

#[inline]
pub(crate) fn gaussian_amplitude<T: Real>(x: T, alpha: T) -> T {
    let d = x - T::SQRT_2() * alpha;
    T::PI().powf(T::lit(-0.25)) * (-d * d * T::half()).exp()
}
