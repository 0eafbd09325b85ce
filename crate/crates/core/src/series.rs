//! Sampled series shared between the simulators and the fitters.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which detection or emission channel a series belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// Clockwise-propagating cavity mode.
    Cw,
    /// Counter-clockwise-propagating cavity mode.
    Ccw,
    /// sigma+ polarization channel.
    SigmaPlus,
    /// sigma- polarization channel.
    SigmaMinus,
    /// Sum over channels.
    Total,
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Channel::Cw => "cw",
            Channel::Ccw => "ccw",
            Channel::SigmaPlus => "sigma_plus",
            Channel::SigmaMinus => "sigma_minus",
            Channel::Total => "total",
        };
        f.write_str(s)
    }
}

/// A sampled `(abscissa, rate)` series with a channel tag.
///
/// The abscissa is an angular frequency (rad/s, relative to a stated
/// reference) for spectra, or a spacing in nm for Bragg scans; it must be
/// strictly increasing. Rates are non-negative, in arbitrary units.
#[derive(Debug, Clone)]
pub struct SpectrumSeries<R: Real = f64> {
    pub freq: Vec<R>,
    pub rate: Vec<R>,
    pub channel: Channel,
}

impl<R: Real> SpectrumSeries<R> {
    pub fn new(freq: Vec<R>, rate: Vec<R>, channel: Channel) -> Result<Self> {
        if freq.len() != rate.len() {
            return Err(Error::invalid(
                "spectrum series",
                format!("length mismatch: {} freq vs {} rate", freq.len(), rate.len()),
            ));
        }
        if freq.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "spectrum series",
                "abscissa must be strictly increasing",
            ));
        }
        Ok(SpectrumSeries { freq, rate, channel })
    }

    pub fn len(&self) -> usize {
        self.freq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freq.is_empty()
    }
}

/// Uniform grid of `n >= 2` points covering `[lo, hi]`.
pub fn linspace<R: Real>(lo: R, hi: R, n: usize) -> Vec<R> {
    assert!(n >= 2, "linspace needs at least two points");
    let step = (hi - lo) / R::of_usize(n - 1);
    (0..n).map(|i| lo + step * R::of_usize(i)).collect()
}

/// Trapezoid-rule integral of `y(x)` over a sampled grid.
pub fn trapezoid<R: Real>(x: &[R], y: &[R]) -> R {
    assert_eq!(x.len(), y.len());
    let half = R::of(0.5);
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| (xs[1] - xs[0]) * (ys[0] + ys[1]) * half)
        .sum()
}
