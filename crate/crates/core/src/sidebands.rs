//! Thermal motional physics: Boltzmann level weights, sideband scattering
//! fractions, cavity-filtered spectra with one or two vibrational manifolds,
//! phonon extraction from sideband ratios, cooling limits, and a brute-force
//! Franck-Condon oracle.
//!
//! Sideband sign convention: positive order `m` is the sideband probed with
//! the drive red-detuned from the cavity by `m omega_t` (anti-Stokes, the
//! cooling configuration), so `P(m) < P(-m)` for `m > 0` in a thermal state.

use crate::cavity::CavityParams;
use crate::constants;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::series::{Channel, SpectrumSeries};
use crate::special::{bessel_i, laguerre};

/// Which trap axis a vibrational mode belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionLabel {
    Radial,
    Axial,
}

impl std::fmt::Display for MotionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MotionLabel::Radial => "radial",
            MotionLabel::Axial => "axial",
        })
    }
}

/// One vibrational degree of freedom of the trapped atom.
#[derive(Debug, Clone, Copy)]
pub struct ThermalMode<R: Real = f64> {
    trap_freq: R,
    n_phonon: R,
    lamb_dicke: R,
    label: MotionLabel,
}

impl<R: Real> ThermalMode<R> {
    /// `trap_freq` is angular (rad/s); `n_phonon` and `lamb_dicke` are
    /// dimensionless and non-negative.
    pub fn new(trap_freq: R, n_phonon: R, lamb_dicke: R, label: MotionLabel) -> Result<Self> {
        if !(trap_freq > R::zero()) {
            return Err(Error::invalid("thermal mode", "trap frequency must be > 0"));
        }
        if !(n_phonon >= R::zero()) || !n_phonon.is_finite() {
            return Err(Error::invalid("thermal mode", "mean phonon number must be >= 0"));
        }
        if !(lamb_dicke >= R::zero()) {
            return Err(Error::invalid("thermal mode", "Lamb-Dicke parameter must be >= 0"));
        }
        Ok(ThermalMode {
            trap_freq,
            n_phonon,
            lamb_dicke,
            label,
        })
    }

    /// Mode with the Lamb-Dicke parameter derived from the photon recoil,
    /// `eta = sqrt(E_rec / hbar omega_t)`, with the recoil frequency from
    /// the constants table.
    pub fn with_default_lamb_dicke(trap_freq: R, n_phonon: R, label: MotionLabel) -> Result<Self> {
        let eta = lamb_dicke_from_trap(trap_freq);
        Self::new(trap_freq, n_phonon, eta, label)
    }

    pub fn trap_freq(&self) -> R {
        self.trap_freq
    }

    pub fn n_phonon(&self) -> R {
        self.n_phonon
    }

    pub fn lamb_dicke(&self) -> R {
        self.lamb_dicke
    }

    pub fn label(&self) -> MotionLabel {
        self.label
    }

    /// Boltzmann ratio `t = exp(-hbar omega / k_B T) = nbar / (nbar + 1)`.
    fn boltzmann_ratio(&self) -> R {
        self.n_phonon / (self.n_phonon + R::one())
    }
}

/// Recoil-limited Lamb-Dicke parameter `sqrt(E_rec / hbar omega_t)` for an
/// angular trap frequency, using the recoil energy from the constants table.
pub fn lamb_dicke_from_trap<R: Real>(trap_freq: R) -> R {
    (R::of(constants::table().recoil()) / trap_freq).sqrt()
}

/// Thermal occupation of harmonic level `l`:
/// `p_l = t^l (1 - t)` with `t = nbar/(nbar+1)`; sums to one over all `l`.
pub fn boltzmann_weight<R: Real>(mode: &ThermalMode<R>, level: usize) -> R {
    let t = mode.boltzmann_ratio();
    if t == R::zero() {
        return if level == 0 { R::one() } else { R::zero() };
    }
    t.powi(level as i32) * (R::one() - t)
}

/// Thermal scattering fraction of the `m`-th sideband:
/// `P(m) = t^(m/2) exp(-(2 nbar + 1) eta^2) I_m(2 eta^2 sqrt(nbar (nbar+1)))`.
///
/// Positive `m` removes `m` phonons (cooling), so detailed balance reads
/// `P(-m) = t^{-m} P(m)` and the fractions sum to one over all orders. The
/// `nbar = 0` limit is taken analytically: no phonons can be removed, so
/// `P(m > 0) = 0` and `P(m <= 0) = exp(-eta^2) eta^(2|m|) / |m|!`.
pub fn sideband_fraction<R: Real>(mode: &ThermalMode<R>, order: i32) -> R {
    let eta2 = mode.lamb_dicke() * mode.lamb_dicke();
    if eta2 == R::zero() {
        return if order == 0 { R::one() } else { R::zero() };
    }
    let nbar = mode.n_phonon();
    if nbar == R::zero() {
        if order > 0 {
            return R::zero();
        }
        let mut v = (-eta2).exp();
        for j in 1..=order.unsigned_abs() {
            v = v * eta2 / R::of(f64::from(j));
        }
        return v;
    }
    let t = mode.boltzmann_ratio();
    let argument = R::of(2.0) * eta2 * (nbar * (nbar + R::one())).sqrt();
    let prefactor = t.powf(R::of(f64::from(order)) / R::of(2.0))
        * (-(R::of(2.0) * nbar + R::one()) * eta2).exp();
    prefactor * bessel_i(order, argument)
}

/// Sideband fractions over `|m| <= truncation`, with the truncation defect.
#[derive(Debug, Clone)]
pub struct SidebandFractions<R: Real = f64> {
    pub orders: Vec<i32>,
    pub fractions: Vec<R>,
    pub truncation: i32,
}

impl<R: Real> SidebandFractions<R> {
    pub fn compute(mode: &ThermalMode<R>, truncation: i32) -> Self {
        let orders: Vec<i32> = (-truncation..=truncation).collect();
        let fractions = orders.iter().map(|&m| sideband_fraction(mode, m)).collect();
        SidebandFractions {
            orders,
            fractions,
            truncation,
        }
    }

    pub fn sum(&self) -> R {
        self.fractions.iter().cloned().sum()
    }

    /// `1 - sum`, the weight lost to orders beyond the truncation.
    pub fn normalization_defect(&self) -> R {
        R::one() - self.sum()
    }
}

/// Largest retained level for the Franck-Condon oracle: the smallest cutoff
/// whose geometric Boltzmann tail is below `tail_bound`, hard-capped at 5000.
pub fn oracle_level_cutoff<R: Real>(n_phonon: R, tail_bound: f64) -> Result<usize> {
    const LEVEL_CAP: usize = 5000;
    if !(tail_bound > 0.0) {
        return Err(Error::invalid("oracle cutoff", "tail bound must be > 0"));
    }
    if n_phonon == R::zero() {
        return Ok(0);
    }
    let t = (n_phonon / (n_phonon + R::one())).to_f64().unwrap_or(f64::NAN);
    if !(0.0..1.0).contains(&t) {
        return Err(Error::invalid("oracle cutoff", "mean phonon number out of range"));
    }
    // smallest L with t^(L+1) < tail_bound
    let needed = (tail_bound.ln() / t.ln()).ceil() as usize;
    let cutoff = needed.max(1) - 1;
    if cutoff > LEVEL_CAP {
        return Err(Error::accuracy(
            "oracle cutoff",
            format!("requires {cutoff} levels for tail < {tail_bound:.1e}, cap is {LEVEL_CAP}"),
        ));
    }
    Ok(cutoff)
}

/// Squared harmonic-oscillator displacement matrix element
/// `|<n'| exp(i eta (a + a^dag)) |n>|^2` with `n' = n - m` (order `m`
/// removes `m` phonons):
/// `exp(-eta^2) eta^(2|m|) (n_<! / n_>!) [L_{n_<}^{|m|}(eta^2)]^2`.
fn displacement_element_sq<R: Real>(n: usize, m: i32, eta2: R) -> R {
    let n_prime = n as i64 - i64::from(m);
    debug_assert!(n_prime >= 0);
    let n_lo = n.min(n_prime as usize);
    let n_hi = n.max(n_prime as usize);
    // eta^(2|m|) n_<!/n_>! = prod_{j=n_<+1}^{n_>} eta^2 / j
    let mut factor = (-eta2).exp();
    for j in (n_lo + 1)..=n_hi {
        factor = factor * eta2 / R::of_usize(j);
    }
    let l = laguerre(n_lo, n_hi - n_lo, eta2);
    factor * l * l
}

/// Brute-force thermal sideband fraction: the Boltzmann-weighted sum of
/// squared displacement matrix elements,
/// `P(m) = sum_n p_n |<n-m| exp(i eta (a+a^dag)) |n>|^2`.
///
/// This is the independent verification oracle for [`sideband_fraction`];
/// it never touches the Bessel-function closed form. Errors when the
/// requested cutoff leaves a Boltzmann tail above 1e-9.
pub fn franck_condon_oracle<R: Real>(
    mode: &ThermalMode<R>,
    order: i32,
    level_cutoff: usize,
) -> Result<R> {
    const TAIL_BOUND: f64 = 1e-9;
    let required = oracle_level_cutoff(mode.n_phonon(), TAIL_BOUND)?;
    if level_cutoff < required {
        return Err(Error::accuracy(
            "franck-condon oracle",
            format!("cutoff {level_cutoff} leaves Boltzmann tail above {TAIL_BOUND:.0e}; need {required}"),
        ));
    }
    let eta2 = mode.lamb_dicke() * mode.lamb_dicke();
    let t = mode.boltzmann_ratio();
    let n_start = 0.max(order) as usize;
    let mut weight = boltzmann_weight(mode, 0);
    let mut total = R::zero();
    for n in 0..=level_cutoff {
        if n >= n_start && weight > R::zero() {
            total = total + weight * displacement_element_sq(n, order, eta2);
        }
        weight = weight * t;
    }
    Ok(total)
}

/// Thermal expectation of the displacement operator,
/// `<exp(i eta (a + a^dag))> = sum_n p_n e^{-eta^2/2} L_n(eta^2)`,
/// evaluated by direct summation. Its square is the Debye-Waller factor.
pub fn oracle_elastic_coherence<R: Real>(mode: &ThermalMode<R>, level_cutoff: usize) -> Result<R> {
    let required = oracle_level_cutoff(mode.n_phonon(), 1e-9)?;
    if level_cutoff < required {
        return Err(Error::accuracy(
            "elastic coherence oracle",
            format!("cutoff {level_cutoff} below required {required}"),
        ));
    }
    let eta2 = mode.lamb_dicke() * mode.lamb_dicke();
    let damp = (-eta2 / R::of(2.0)).exp();
    let t = mode.boltzmann_ratio();
    let mut weight = boltzmann_weight(mode, 0);
    let mut total = R::zero();
    for n in 0..=level_cutoff {
        total = total + weight * damp * laguerre(n, 0, eta2);
        weight = weight * t;
    }
    Ok(total)
}

/// Sideband-order truncation for the cavity spectrum, per trap axis.
/// Defaults reproduce the published fit model: axial orders to 4, radial to
/// 2, and no mixed axial-radial sidebands.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumTruncation {
    pub axial_max: i32,
    pub radial_max: i32,
    pub include_cross_terms: bool,
}

impl Default for SpectrumTruncation {
    fn default() -> Self {
        SpectrumTruncation {
            axial_max: 4,
            radial_max: 2,
            include_cross_terms: false,
        }
    }
}

impl SpectrumTruncation {
    fn max_order(&self, label: MotionLabel) -> i32 {
        match label {
            MotionLabel::Axial => self.axial_max,
            MotionLabel::Radial => self.radial_max,
        }
    }
}

/// Cavity-filtered scattering spectrum of one or two thermal modes:
/// `rate(w) = base_rate * sum_orders P(orders) *
///            kappa^2 / (kappa^2 + 4 (w + sum_i m_i w_i - cavity_center)^2)`.
///
/// `base_rate` is the free-scaling prefactor (cooperativity times scattering
/// rate); `freq_grid` holds probe frequencies (rad/s) on the same axis as
/// `cavity_center`. With two modes the sideband manifolds multiply, subject
/// to the truncation.
pub fn cavity_spectrum<R: Real>(
    modes: &[ThermalMode<R>],
    cav: &CavityParams<R>,
    base_rate: R,
    cavity_center: R,
    freq_grid: &[R],
    truncation: &SpectrumTruncation,
) -> Result<SpectrumSeries<R>> {
    if modes.is_empty() || modes.len() > 2 {
        return Err(Error::invalid("cavity spectrum", "need one or two thermal modes"));
    }
    if freq_grid.is_empty() {
        return Err(Error::invalid("cavity spectrum", "frequency grid is empty"));
    }

    // precompute (frequency shift, weight) for each retained sideband combo
    let mut components: Vec<(R, R)> = Vec::new();
    match modes {
        [single] => {
            let max = truncation.max_order(single.label());
            for m in -max..=max {
                components.push((
                    R::of(f64::from(m)) * single.trap_freq(),
                    sideband_fraction(single, m),
                ));
            }
        }
        [first, second] => {
            let max_a = truncation.max_order(first.label());
            let max_b = truncation.max_order(second.label());
            for m in -max_a..=max_a {
                for n in -max_b..=max_b {
                    if !truncation.include_cross_terms && m != 0 && n != 0 {
                        continue;
                    }
                    let shift = R::of(f64::from(m)) * first.trap_freq()
                        + R::of(f64::from(n)) * second.trap_freq();
                    components.push((shift, sideband_fraction(first, m) * sideband_fraction(second, n)));
                }
            }
        }
        _ => unreachable!(),
    }

    let kappa2 = cav.kappa() * cav.kappa();
    let four = R::of(4.0);
    let rate = freq_grid
        .iter()
        .map(|&w| {
            let mut total = R::zero();
            for &(shift, weight) in &components {
                let detune = w + shift - cavity_center;
                total = total + weight * kappa2 / (kappa2 + four * detune * detune);
            }
            base_rate * total
        })
        .collect();
    SpectrumSeries::new(freq_grid.to_vec(), rate, Channel::Total)
}

/// Mean phonon number from measured carrier and first-sideband rates:
/// the carrier Lorentzian tail `kappa^2/(kappa^2 + 4 omega_t^2) * carrier`
/// is subtracted from both sideband rates, then
/// `nbar = red / (blue - red)`.
///
/// Errors when the corrected rates are unphysical (negative red, or
/// `blue <= red`), which signals bad data rather than a hot atom.
pub fn phonon_from_sidebands<R: Real>(
    rate_red: R,
    rate_blue: R,
    rate_carrier: R,
    trap_freq: R,
    cav: &CavityParams<R>,
) -> Result<R> {
    let kappa2 = cav.kappa() * cav.kappa();
    let tail = kappa2 / (kappa2 + R::of(4.0) * trap_freq * trap_freq);
    let red = rate_red - tail * rate_carrier;
    let blue = rate_blue - tail * rate_carrier;
    if red < R::zero() {
        return Err(Error::invalid(
            "phonon extraction",
            "carrier tail exceeds the measured red-sideband rate",
        ));
    }
    if !(blue > red) {
        return Err(Error::invalid(
            "phonon extraction",
            "corrected blue rate must exceed corrected red rate",
        ));
    }
    Ok(red / (blue - red))
}

/// Temperature implied by a thermal occupation.
#[derive(Debug, Clone, Copy)]
pub struct TemperatureEstimate<R: Real = f64> {
    pub microkelvin: R,
    /// Set when `nbar = 0`: the mode is in its ground state and the
    /// temperature is reported as zero.
    pub ground_state: bool,
}

/// `T = hbar omega_t / (k_B ln((1 + nbar)/nbar))`, in microkelvin.
pub fn phonon_to_temperature<R: Real>(mode: &ThermalMode<R>) -> TemperatureEstimate<R> {
    if mode.n_phonon() == R::zero() {
        return TemperatureEstimate {
            microkelvin: R::zero(),
            ground_state: true,
        };
    }
    let c = constants::table();
    let beta = ((mode.n_phonon() + R::one()) / mode.n_phonon()).ln();
    let kelvin = R::of(c.hbar) * mode.trap_freq() / (R::of(c.boltzmann) * beta);
    TemperatureEstimate {
        microkelvin: kelvin * R::of(1e6),
        ground_state: false,
    }
}

/// One-dimensional ground-state probability `p_0 = 1 / (1 + nbar)`.
pub fn ground_state_probability<R: Real>(n_phonon: R) -> R {
    R::one() / (R::one() + n_phonon)
}

/// Resolved-sideband cooling limit. The closed form
/// `(u D eta + C) / (D eta (1 - u))` with `u = kappa^2/(kappa^2 + 16 w_t^2)`
/// and its expansion `kappa^2/(16 w_t^2) + (C/(D eta))(1 + kappa^2/(16 w_t^2))`
/// are algebraically identical; both are reported as a cross-check.
#[derive(Debug, Clone, Copy)]
pub struct CoolingLimit<R: Real = f64> {
    /// Expanded form of the limit.
    pub approx: R,
    /// Closed form, prior to expansion.
    pub exact: R,
    /// Linewidth contribution `kappa^2 / (16 omega_t^2)`.
    pub linewidth_term: R,
    /// Recoil contribution `(C / (D eta)) (1 + kappa^2/(16 omega_t^2))`.
    pub recoil_term: R,
}

/// Cooling limit of a trapped mode for effective cooperativity
/// `eta_effective`, recoil-geometry constants `D` and `C`.
pub fn cooling_limit<R: Real>(
    cav: &CavityParams<R>,
    trap_freq: R,
    d_factor: R,
    c_factor: R,
    eta_effective: R,
) -> Result<CoolingLimit<R>> {
    if !(trap_freq > R::zero()) || !(d_factor > R::zero()) || !(c_factor > R::zero())
        || !(eta_effective > R::zero())
    {
        return Err(Error::invalid("cooling limit", "all inputs must be > 0"));
    }
    let kappa2 = cav.kappa() * cav.kappa();
    let w2_16 = R::of(16.0) * trap_freq * trap_freq;
    let linewidth_term = kappa2 / w2_16;
    let recoil_term = c_factor / (d_factor * eta_effective) * (R::one() + linewidth_term);
    let u = kappa2 / (kappa2 + w2_16);
    let exact = (u * d_factor * eta_effective + c_factor)
        / (d_factor * eta_effective * (R::one() - u));
    Ok(CoolingLimit {
        approx: linewidth_term + recoil_term,
        exact,
        linewidth_term,
        recoil_term,
    })
}

/// Effective single-mode cooperativity after multiplicity and polarization
/// reductions: the plain product `eta * multiplicity * polarization`, with
/// both reduction factors restricted to `(0, 1]`.
pub fn effective_cooperativity<R: Real>(
    eta_bare: R,
    multiplicity_factor: R,
    polarization_factor: R,
) -> Result<R> {
    for (name, f) in [
        ("multiplicity factor", multiplicity_factor),
        ("polarization factor", polarization_factor),
    ] {
        if !(f > R::zero() && f <= R::one()) {
            return Err(Error::invalid("effective cooperativity", format!("{name} must be in (0, 1]")));
        }
    }
    if !(eta_bare > R::zero()) {
        return Err(Error::invalid("effective cooperativity", "bare cooperativity must be > 0"));
    }
    Ok(eta_bare * multiplicity_factor * polarization_factor)
}
