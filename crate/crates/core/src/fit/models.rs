//! The three concrete fits: two-mode interference scans (separation and
//! probe angle), six-parameter thermal sideband spectra, and the chiral
//! Lorentzian doublet.

use num_complex::Complex;

use crate::cavity::CavityParams;
use crate::scalar::{rad_to_deg, Real};
use crate::series::SpectrumSeries;
use crate::sidebands::{
    cavity_spectrum, lamb_dicke_from_trap, MotionLabel, SpectrumTruncation, ThermalMode,
};

use super::solver::{least_squares_solve, multi_start_solve, FitOptions, FitResult, Model, Parameter};
use super::{FitError, ValueWithError};

/// `|sum_{n=0}^{N-1} e^{i n theta}|^2` evaluated by direct phasor summation.
fn array_factor_sq<R: Real>(n_atoms: usize, theta: R) -> R {
    let mut acc = Complex::new(R::zero(), R::zero());
    for n in 0..n_atoms {
        acc = acc + Complex::from_polar(R::one(), theta * R::of_usize(n));
    }
    acc.norm_sqr()
}

/// Demeaned spectral power of a sampled scan at one spatial frequency.
fn periodogram_power<R: Real>(x: &[R], y: &[R], mean: R, freq: R) -> R {
    let mut acc = Complex::new(R::zero(), R::zero());
    for (xi, yi) in x.iter().zip(y) {
        let phase = -R::of(2.0) * R::PI() * freq * *xi;
        acc = acc + Complex::from_polar(*yi - mean, phase);
    }
    acc.norm_sqr()
}

/// Two zoom passes of dense local maximization around a coarse peak.
fn refine_peak<R: Real>(x: &[R], y: &[R], mean: R, f0: R, half_width: R) -> R {
    let mut center = f0;
    let mut half = half_width;
    for _ in 0..2 {
        let lo = (center - half).max(half_width * R::of(1e-3));
        let grid = crate::series::linspace(lo, center + half, 201);
        let mut best = (center, R::neg_infinity());
        for &f in &grid {
            let p = periodogram_power(x, y, mean, f);
            if p > best.1 {
                best = (f, p);
            }
        }
        center = best.0;
        half = half / R::of(50.0);
    }
    center
}

/// Candidate oscillation periods of a sampled scan, strongest first: local
/// maxima of a demeaned spectral estimate on a 4x oversampled frequency
/// grid, each refined by dense local maximization. The scans sit many
/// oscillation periods away from `d = 0` where the model phase is anchored,
/// so candidate frequencies must be much more precise than the spacing
/// `1/d` of aliased fit minima; the refined estimate is.
fn top_periods<R: Real>(x: &[R], y: &[R], count: usize) -> Vec<R> {
    let n = x.len();
    if n < 4 {
        return Vec::new();
    }
    let range = x[n - 1] - x[0];
    let mean = y.iter().cloned().sum::<R>() / R::of_usize(n);
    let df = R::one() / (R::of(4.0) * range);
    let n_grid = 2 * (n - 1);
    let power: Vec<(R, R)> = (1..=n_grid)
        .map(|j| {
            let freq = R::of_usize(j) * df;
            (freq, periodogram_power(x, y, mean, freq))
        })
        .collect();
    let mut peaks: Vec<(R, R)> = power
        .windows(3)
        .filter(|w| w[1].1 >= w[0].1 && w[1].1 >= w[2].1)
        .map(|w| w[1])
        .collect();
    peaks.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    peaks
        .into_iter()
        .take(count)
        .map(|(f, _)| R::one() / refine_peak(x, y, mean, f, df))
        .collect()
}

struct SeparationModel<'a, R: Real> {
    d_cw: &'a [R],
    y_cw: &'a [R],
    d_ccw: &'a [R],
    y_ccw: &'a [R],
    n_atoms: usize,
}

impl<R: Real> Model<R> for SeparationModel<'_, R> {
    fn name(&self) -> &str {
        "separation"
    }

    fn residual_count(&self) -> usize {
        self.d_cw.len() + self.d_ccw.len()
    }

    // params: [period_cw, period_ccw, c0_cw, c1_cw, c0_ccw, c1_ccw]
    fn residuals(&self, p: &[R], out: &mut [R]) {
        let two_pi = R::of(2.0) * R::PI();
        let mut idx = 0;
        for (d, y) in self.d_cw.iter().zip(self.y_cw) {
            let g = array_factor_sq(self.n_atoms, two_pi * *d / p[0]);
            out[idx] = p[2] + p[3] * g - *y;
            idx += 1;
        }
        for (d, y) in self.d_ccw.iter().zip(self.y_ccw) {
            let g = array_factor_sq(self.n_atoms, two_pi * *d / p[1]);
            out[idx] = p[4] + p[5] * g - *y;
            idx += 1;
        }
    }
}

/// Closed-form least squares of `y ~ c0 + c1 g` for start seeding.
fn linear_offsets<R: Real>(d: &[R], y: &[R], n_atoms: usize, period: R) -> (R, R) {
    let two_pi = R::of(2.0) * R::PI();
    let n = R::of_usize(d.len());
    let (mut sg, mut sg2, mut sy, mut sgy) = (R::zero(), R::zero(), R::zero(), R::zero());
    for (di, yi) in d.iter().zip(y) {
        let g = array_factor_sq(n_atoms, two_pi * *di / period);
        sg = sg + g;
        sg2 = sg2 + g * g;
        sy = sy + *yi;
        sgy = sgy + g * *yi;
    }
    let det = n * sg2 - sg * sg;
    if det.abs() < R::of(1e-30) {
        return (sy / n, R::zero());
    }
    let c0 = (sy * sg2 - sg * sgy) / det;
    let c1 = (n * sgy - sg * sy) / det;
    (c0, c1)
}

/// Joint fit of the two-mode interference scans.
#[derive(Debug, Clone)]
pub struct SeparationFit<R: Real = f64> {
    pub period_cw: ValueWithError<R>,
    pub period_ccw: ValueWithError<R>,
    /// Probe incidence angle (degrees) recovered from the period ratio.
    pub phi_deg: ValueWithError<R>,
    /// d-axis scale: ratio of true to nominal spacing.
    pub scale: ValueWithError<R>,
    pub c0_cw: ValueWithError<R>,
    pub c1_cw: ValueWithError<R>,
    pub c0_ccw: ValueWithError<R>,
    pub c1_ccw: ValueWithError<R>,
    pub fit: FitResult<R>,
}

/// Fit `S(d) = c0 + c1 |G|^2` jointly to the CW and CCW scans of an N-atom
/// array. The series' abscissas are nominal spacings in nm. Candidate
/// oscillation periods are seeded from a spectral estimate of each channel
/// (the landscape is periodic, so multiple starts are mandatory); distinct
/// minima with residuals within 1% raise [`FitError::Ambiguous`].
pub fn fit_separation<R: Real>(
    scan_cw: &SpectrumSeries<R>,
    scan_ccw: &SpectrumSeries<R>,
    n_atoms: usize,
    wavelength: R,
) -> Result<SeparationFit<R>, FitError> {
    fit_separation_with(scan_cw, scan_ccw, n_atoms, wavelength, &[])
}

/// [`fit_separation`] with user-supplied `(period_cw, period_ccw)` start
/// candidates tried ahead of the spectral-estimate grid.
pub fn fit_separation_with<R: Real>(
    scan_cw: &SpectrumSeries<R>,
    scan_ccw: &SpectrumSeries<R>,
    n_atoms: usize,
    wavelength: R,
    user_periods: &[(R, R)],
) -> Result<SeparationFit<R>, FitError> {
    if n_atoms < 1 {
        return Err(FitError::InvalidProblem("n_atoms must be >= 1".into()));
    }
    if !(wavelength > R::zero()) {
        return Err(FitError::InvalidProblem("wavelength must be > 0".into()));
    }
    if scan_cw.len() < 8 || scan_ccw.len() < 8 {
        return Err(FitError::InvalidProblem(
            "need at least 8 samples per channel".into(),
        ));
    }
    let model = SeparationModel {
        d_cw: &scan_cw.freq,
        y_cw: &scan_cw.rate,
        d_ccw: &scan_ccw.freq,
        y_ccw: &scan_ccw.rate,
        n_atoms,
    };

    let span_cw = scan_cw.freq[scan_cw.len() - 1] - scan_cw.freq[0];
    let span_ccw = scan_ccw.freq[scan_ccw.len() - 1] - scan_ccw.freq[0];
    let step = scan_cw.freq[1] - scan_cw.freq[0];
    let p_lo = step * R::of(0.5);
    let p_hi = span_cw.max(span_ccw) * R::of(100.0);

    let mut pairs: Vec<(R, R)> = user_periods.to_vec();
    let cands_cw = top_periods(&scan_cw.freq, &scan_cw.rate, 3);
    let cands_ccw = top_periods(&scan_ccw.freq, &scan_ccw.rate, 3);
    for &pc in &cands_cw {
        for &pl in &cands_ccw {
            pairs.push((pc, pl));
        }
    }
    // alias grid for the strongest pair: minima of the anchored model repeat
    // at phase slips of one full turn across the window center, so the
    // refined spectral estimate must be surrounded by its neighboring aliases
    if let (Some(&pc), Some(&pl)) = (cands_cw.first(), cands_ccw.first()) {
        let center_cw = (scan_cw.freq[0] + scan_cw.freq[scan_cw.len() - 1]) / R::of(2.0);
        let center_ccw = (scan_ccw.freq[0] + scan_ccw.freq[scan_ccw.len() - 1]) / R::of(2.0);
        let alias = |p: R, d: R, k: f64| R::one() / (R::one() / p + R::of(k) / d);
        for k_cw in -2..=2 {
            for k_ccw in -2..=2 {
                if k_cw == 0 && k_ccw == 0 {
                    continue;
                }
                pairs.push((
                    alias(pc, center_cw, f64::from(k_cw)),
                    alias(pl, center_ccw, f64::from(k_ccw)),
                ));
            }
        }
    }
    if pairs.is_empty() {
        return Err(FitError::InvalidProblem(
            "no candidate periods found in either channel".into(),
        ));
    }

    let template = vec![
        Parameter::bounded("period_cw", pairs[0].0.max(p_lo).min(p_hi), p_lo, p_hi)?,
        Parameter::bounded("period_ccw", pairs[0].1.max(p_lo).min(p_hi), p_lo, p_hi)?,
        Parameter::free("c0_cw", R::zero()),
        Parameter::free("c1_cw", R::one()),
        Parameter::free("c0_ccw", R::zero()),
        Parameter::free("c1_ccw", R::one()),
    ];
    let starts: Vec<Vec<R>> = pairs
        .iter()
        .filter(|(pc, pl)| *pc > p_lo && *pc < p_hi && *pl > p_lo && *pl < p_hi)
        .map(|&(pc, pl)| {
            let (c0c, c1c) = linear_offsets(&scan_cw.freq, &scan_cw.rate, n_atoms, pc);
            let (c0l, c1l) = linear_offsets(&scan_ccw.freq, &scan_ccw.rate, n_atoms, pl);
            vec![pc, pl, c0c, c1c, c0l, c1l]
        })
        .collect();
    if starts.is_empty() {
        return Err(FitError::InvalidProblem(
            "all candidate periods fall outside the plausible range".into(),
        ));
    }

    // conservative initial damping: the residual landscape oscillates in the
    // periods (the model phase is anchored many oscillations away at d = 0),
    // and an early full Gauss-Newton step can hop between alias basins
    let opts = FitOptions {
        lambda_init: R::of(1e2),
        ..FitOptions::default()
    };
    let fit = multi_start_solve(&model, &template, &starts, &opts, R::of(1e-3), R::of(0.01))?;

    let p_cw = fit.params[0];
    let p_ccw = fit.params[1];
    if span_cw < R::of(1.5) * p_cw || span_ccw < R::of(1.5) * p_ccw {
        return Err(FitError::InvalidProblem(format!(
            "scan spans fewer than 1.5 fitted oscillation periods ({:.3} cw, {:.3} ccw)",
            (span_cw / p_cw).to_f64().unwrap_or(f64::NAN),
            (span_ccw / p_ccw).to_f64().unwrap_or(f64::NAN),
        )));
    }

    // angle from the period ratio; the two periods are determined by
    // disjoint data subsets, so their errors combine independently
    let (e_cw, e_ccw) = (fit.errors[0], fit.errors[1]);
    let ratio = p_cw / p_ccw;
    let u = (ratio - R::one()) / (ratio + R::one());
    let phi = rad_to_deg(u.asin());
    let dphi_du = R::one() / (R::one() - u * u).sqrt();
    let du_dratio = R::of(2.0) / ((ratio + R::one()) * (ratio + R::one()));
    let dratio = ((e_cw / p_ccw) * (e_cw / p_ccw)
        + (ratio * e_ccw / p_ccw) * (ratio * e_ccw / p_ccw))
        .sqrt();
    let phi_err = rad_to_deg(dphi_du * du_dratio * dratio);

    let half_wl = wavelength / R::of(2.0);
    let scale = half_wl * (R::one() / p_cw + R::one() / p_ccw);
    let scale_err = (half_wl * half_wl
        * ((e_cw / (p_cw * p_cw)) * (e_cw / (p_cw * p_cw))
            + (e_ccw / (p_ccw * p_ccw)) * (e_ccw / (p_ccw * p_ccw))))
    .sqrt();

    Ok(SeparationFit {
        period_cw: ValueWithError::new(p_cw, e_cw),
        period_ccw: ValueWithError::new(p_ccw, e_ccw),
        phi_deg: ValueWithError::new(phi, phi_err),
        scale: ValueWithError::new(scale, scale_err),
        c0_cw: ValueWithError::new(fit.params[2], fit.errors[2]),
        c1_cw: ValueWithError::new(fit.params[3], fit.errors[3]),
        c0_ccw: ValueWithError::new(fit.params[4], fit.errors[4]),
        c1_ccw: ValueWithError::new(fit.params[5], fit.errors[5]),
        fit,
    })
}

/// Initial guesses for the six spectrum parameters. Frequencies are angular.
#[derive(Debug, Clone, Copy)]
pub struct SidebandInit<R: Real = f64> {
    pub cavity_center: R,
    pub omega_axial: R,
    pub omega_radial: R,
    pub n_axial: R,
    pub n_radial: R,
    pub amplitude: R,
}

/// Configuration for [`fit_sideband_spectrum`].
#[derive(Debug, Clone)]
pub struct SidebandFitConfig<R: Real = f64> {
    pub cavity: CavityParams<R>,
    pub init: SidebandInit<R>,
    pub truncation: SpectrumTruncation,
    /// Drop the radial manifold: its two parameters are pinned instead of
    /// fitted (for data known to contain only axial structure).
    pub pin_radial: bool,
}

struct SidebandModel<'a, R: Real> {
    freq: &'a [R],
    rate: &'a [R],
    cavity: &'a CavityParams<R>,
    truncation: SpectrumTruncation,
    pin_radial: bool,
}

impl<R: Real> Model<R> for SidebandModel<'_, R> {
    fn name(&self) -> &str {
        "sideband-spectrum"
    }

    fn residual_count(&self) -> usize {
        self.freq.len()
    }

    // params: [cavity_center, omega_axial, omega_radial, n_axial, n_radial, amplitude]
    fn residuals(&self, p: &[R], out: &mut [R]) {
        let axial = ThermalMode::new(p[1], p[3], lamb_dicke_from_trap(p[1]), MotionLabel::Axial);
        let spectrum = if self.pin_radial {
            axial.and_then(|a| {
                cavity_spectrum(&[a], self.cavity, p[5], p[0], self.freq, &self.truncation)
            })
        } else {
            let radial =
                ThermalMode::new(p[2], p[4], lamb_dicke_from_trap(p[2]), MotionLabel::Radial);
            axial.and_then(|a| {
                radial.and_then(|r| {
                    cavity_spectrum(&[a, r], self.cavity, p[5], p[0], self.freq, &self.truncation)
                })
            })
        };
        match spectrum {
            Ok(s) => {
                for (o, (m, y)) in out.iter_mut().zip(s.rate.iter().zip(self.rate)) {
                    *o = *m - *y;
                }
            }
            // out-of-domain parameters: poison the step so it is rejected
            Err(_) => out.fill(R::of(1e30)),
        }
    }
}

/// Result of the six-parameter sideband-spectrum fit.
#[derive(Debug, Clone)]
pub struct SidebandFit<R: Real = f64> {
    pub cavity_center: ValueWithError<R>,
    pub omega_axial: ValueWithError<R>,
    pub omega_radial: ValueWithError<R>,
    pub n_axial: ValueWithError<R>,
    pub n_radial: ValueWithError<R>,
    pub amplitude: ValueWithError<R>,
    /// Set when some parameter is undetermined by the data (unbounded or
    /// wildly inflated error), e.g. the radial manifold is absent.
    pub degenerate: bool,
    pub fit: FitResult<R>,
}

/// Fit the thermal-sideband cavity spectrum for the cavity center, the two
/// trap frequencies, both phonon occupations, and the overall rate. The
/// Lamb-Dicke parameters are recomputed from the trap-frequency parameters
/// on every evaluation.
pub fn fit_sideband_spectrum<R: Real>(
    spectrum: &SpectrumSeries<R>,
    config: &SidebandFitConfig<R>,
) -> Result<SidebandFit<R>, FitError> {
    if spectrum.len() < 8 {
        return Err(FitError::InvalidProblem("need at least 8 spectrum samples".into()));
    }
    let model = SidebandModel {
        freq: &spectrum.freq,
        rate: &spectrum.rate,
        cavity: &config.cavity,
        truncation: config.truncation,
        pin_radial: config.pin_radial,
    };
    let init = &config.init;
    let five = R::of(5.0);
    let mut params = vec![
        Parameter::free("cavity_center", init.cavity_center),
        Parameter::bounded("omega_axial", init.omega_axial, init.omega_axial / five, init.omega_axial * five)?,
        Parameter::bounded("omega_radial", init.omega_radial, init.omega_radial / five, init.omega_radial * five)?,
        Parameter::bounded("n_axial", init.n_axial, R::zero(), R::of(1e6))?,
        Parameter::bounded("n_radial", init.n_radial, R::zero(), R::of(1e6))?,
        Parameter::bounded("amplitude", init.amplitude, R::zero(), R::infinity())?,
    ];
    if config.pin_radial {
        params[2] = Parameter::fixed("omega_radial", init.omega_radial);
        params[4] = Parameter::fixed("n_radial", R::zero());
    }
    let fit = least_squares_solve(&model, &params, &FitOptions::default())?;

    let rel_huge = |v: R, e: R| !e.is_finite() || e > R::of(100.0) * (v.abs() + R::one());
    let degenerate = fit
        .params
        .iter()
        .zip(&fit.errors)
        .any(|(&v, &e)| rel_huge(v, e));

    let ve = |i: usize| ValueWithError::new(fit.params[i], fit.errors[i]);
    Ok(SidebandFit {
        cavity_center: ve(0),
        omega_axial: ve(1),
        omega_radial: ve(2),
        n_axial: ve(3),
        n_radial: ve(4),
        amplitude: ve(5),
        degenerate,
        fit,
    })
}

/// Result of the Lorentzian-doublet fit.
#[derive(Debug, Clone)]
pub struct DoubletFit<R: Real = f64> {
    pub center_low: ValueWithError<R>,
    pub center_high: ValueWithError<R>,
    /// Common full width at half maximum.
    pub width: ValueWithError<R>,
    pub amp_low: ValueWithError<R>,
    pub amp_high: ValueWithError<R>,
    pub offset: ValueWithError<R>,
    pub splitting: ValueWithError<R>,
    /// Set when the two centers are closer than one linewidth: the doublet
    /// is unresolved and the splitting is not trustworthy.
    pub degenerate: bool,
    pub fit: FitResult<R>,
}

struct DoubletModel<'a, R: Real> {
    freq: &'a [R],
    rate: &'a [R],
}

impl<R: Real> Model<R> for DoubletModel<'_, R> {
    fn name(&self) -> &str {
        "lorentzian-doublet"
    }

    fn residual_count(&self) -> usize {
        self.freq.len()
    }

    // params: [center_a, center_b, width, amp_a, amp_b, offset]
    fn residuals(&self, p: &[R], out: &mut [R]) {
        let four = R::of(4.0);
        let w2 = p[2] * p[2];
        for (o, (&f, &y)) in out.iter_mut().zip(self.freq.iter().zip(self.rate)) {
            let da = f - p[0];
            let db = f - p[1];
            let la = w2 / (w2 + four * da * da);
            let lb = w2 / (w2 + four * db * db);
            *o = p[5] + p[3] * la + p[4] * lb - y;
        }
    }
}

/// Fit two Lorentzians of common width plus a constant offset. Starts are
/// seeded by peak picking; unresolved doublets are flagged, not rejected.
pub fn fit_lorentzian_doublet<R: Real>(
    spectrum: &SpectrumSeries<R>,
) -> Result<DoubletFit<R>, FitError> {
    let n = spectrum.len();
    if n < 12 {
        return Err(FitError::InvalidProblem("need at least 12 spectrum samples".into()));
    }
    let x = &spectrum.freq;
    let y = &spectrum.rate;
    let range = x[n - 1] - x[0];
    let step = x[1] - x[0];

    let baseline = y.iter().cloned().fold(R::infinity(), R::min);
    let (i_max, &y_max) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
        .expect("non-empty spectrum");
    let height = y_max - baseline;
    if !(height > R::zero()) {
        return Err(FitError::InvalidProblem("spectrum is flat".into()));
    }

    // FWHM estimate around the main peak
    let half = baseline + height / R::of(2.0);
    let mut right = i_max;
    while right + 1 < n && y[right] > half {
        right += 1;
    }
    let mut left = i_max;
    while left > 0 && y[left] > half {
        left -= 1;
    }
    let width0 = (x[right] - x[left]).max(step);

    // second peak: strongest sample away from the main peak
    let exclusion = R::of(3.0) * width0;
    let second = y
        .iter()
        .enumerate()
        .filter(|(i, _)| (x[*i] - x[i_max]).abs() > exclusion)
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal));
    let (c_b, amp_b) = match second {
        Some((i, &v)) if v - baseline > height / R::of(10.0) => (x[i], v - baseline),
        // no resolved partner: seed one linewidth away and let the fit decide
        _ => (x[i_max] + width0, height / R::of(2.0)),
    };

    let pad = range;
    let params = vec![
        Parameter::bounded("center_a", x[i_max], x[0] - pad, x[n - 1] + pad)?,
        Parameter::bounded("center_b", c_b, x[0] - pad, x[n - 1] + pad)?,
        Parameter::bounded("width", width0, step / R::of(4.0), range * R::of(4.0))?,
        Parameter::bounded("amp_a", height, R::zero(), R::infinity())?,
        Parameter::bounded("amp_b", amp_b, R::zero(), R::infinity())?,
        Parameter::free("offset", baseline),
    ];
    let fit = least_squares_solve(&DoubletModel { freq: x, rate: y }, &params, &FitOptions::default())?;

    // order the centers
    let (lo, hi) = if fit.params[0] <= fit.params[1] { (0, 1) } else { (1, 0) };
    let amp_of = |c: usize| if c == 0 { 3 } else { 4 };
    let ve = |i: usize| ValueWithError::new(fit.params[i], fit.errors[i]);
    let splitting = (fit.params[hi] - fit.params[lo]).abs();
    let splitting_err =
        (fit.errors[lo] * fit.errors[lo] + fit.errors[hi] * fit.errors[hi]).sqrt();
    // unresolved: centers closer than one linewidth, or so entangled that
    // the covariance cannot separate them
    let degenerate =
        splitting < fit.params[2] || !fit.errors[lo].is_finite() || !fit.errors[hi].is_finite();

    Ok(DoubletFit {
        center_low: ve(lo),
        center_high: ve(hi),
        width: ve(2),
        amp_low: ve(amp_of(lo)),
        amp_high: ve(amp_of(hi)),
        offset: ve(5),
        splitting: ValueWithError::new(splitting, splitting_err),
        degenerate,
        fit,
    })
}
