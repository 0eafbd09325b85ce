//! Geometric structure factors and collective-scattering scaling for a 1-D
//! atom array probed at an angle.
//!
//! An array of scatterers spaced by `d` along the cavity axis, illuminated at
//! angle `phi` from normal incidence, carries a geometric factor
//! `G = sum_n exp(i k r_n (1 -+ sin phi))` for the two counter-propagating
//! cavity modes; everything in this module derives from that phasor sum.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{deg_to_rad, rad_to_deg, Real};

/// Positions of the scatterers: `r_n = n*d + offset_n`, in nm.
#[derive(Debug, Clone)]
pub struct AtomArray<R: Real = f64> {
    n_atoms: usize,
    spacing: R,
    offsets: Option<Vec<R>>,
}

impl<R: Real> AtomArray<R> {
    /// Regular array of `n_atoms >= 1` with spacing `spacing_nm > 0`.
    pub fn new(n_atoms: usize, spacing_nm: R) -> Result<Self> {
        if n_atoms < 1 {
            return Err(Error::invalid("atom array", "n_atoms must be >= 1"));
        }
        if !(spacing_nm > R::zero()) {
            return Err(Error::invalid("atom array", "spacing must be > 0 nm"));
        }
        Ok(AtomArray {
            n_atoms,
            spacing: spacing_nm,
            offsets: None,
        })
    }

    /// Array with deterministic per-atom displacements (nm), one per atom.
    pub fn with_offsets(n_atoms: usize, spacing_nm: R, offsets: Vec<R>) -> Result<Self> {
        if offsets.len() != n_atoms {
            return Err(Error::invalid(
                "atom array",
                format!("{} offsets for {} atoms", offsets.len(), n_atoms),
            ));
        }
        let mut array = Self::new(n_atoms, spacing_nm)?;
        array.offsets = Some(offsets);
        Ok(array)
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn spacing(&self) -> R {
        self.spacing
    }

    /// Same array geometry with a different spacing.
    pub fn at_spacing(&self, spacing_nm: R) -> Result<Self> {
        let mut a = self.clone();
        if !(spacing_nm > R::zero()) {
            return Err(Error::invalid("atom array", "spacing must be > 0 nm"));
        }
        a.spacing = spacing_nm;
        Ok(a)
    }

    /// Atom positions along the cavity axis (nm).
    pub fn positions(&self) -> Vec<R> {
        (0..self.n_atoms)
            .map(|n| {
                let base = R::of_usize(n) * self.spacing;
                match &self.offsets {
                    Some(offs) => base + offs[n],
                    None => base,
                }
            })
            .collect()
    }
}

/// Side-probe geometry: wavelength (nm) and signed incidence angle
/// (degrees from normal incidence).
#[derive(Debug, Clone, Copy)]
pub struct ProbeGeometry<R: Real = f64> {
    wavelength: R,
    angle_deg: R,
}

impl<R: Real> ProbeGeometry<R> {
    pub fn new(wavelength_nm: R, angle_deg: R) -> Result<Self> {
        if !(wavelength_nm > R::zero()) {
            return Err(Error::invalid("probe geometry", "wavelength must be > 0 nm"));
        }
        if !(angle_deg.abs() < R::of(90.0)) {
            return Err(Error::invalid(
                "probe geometry",
                "|incidence angle| must be < 90 degrees",
            ));
        }
        Ok(ProbeGeometry {
            wavelength: wavelength_nm,
            angle_deg,
        })
    }

    pub fn wavelength(&self) -> R {
        self.wavelength
    }

    pub fn angle_deg(&self) -> R {
        self.angle_deg
    }

    /// Probe wavenumber `k = 2 pi / lambda` (1/nm).
    pub fn wavenumber(&self) -> R {
        R::of(2.0) * R::PI() / self.wavelength
    }

    pub fn sin_angle(&self) -> R {
        deg_to_rad(self.angle_deg).sin()
    }
}

/// One of the two counter-propagating running-wave cavity modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CavityMode {
    Cw,
    Ccw,
}

impl CavityMode {
    /// Sign in the mode's phase factor `(1 -+ sin phi)`: -1 for CW, +1 for CCW.
    fn sign<R: Real>(self) -> R {
        match self {
            CavityMode::Cw => -R::one(),
            CavityMode::Ccw => R::one(),
        }
    }
}

/// Structure factor `G = sum_n exp(i k r_n (1 -+ sin phi))`, minus sign for
/// the CW mode, plus for CCW. `|G|^2 <= N^2`, with equality at Bragg spacings.
pub fn structure_factor<R: Real>(
    array: &AtomArray<R>,
    probe: &ProbeGeometry<R>,
    mode: CavityMode,
) -> Complex<R> {
    let factor = probe.wavenumber() * (R::one() + mode.sign::<R>() * probe.sin_angle());
    array
        .positions()
        .into_iter()
        .map(|r| Complex::new(R::zero(), r * factor).exp())
        .fold(Complex::new(R::zero(), R::zero()), |acc, z| acc + z)
}

/// Cross-mode geometric factor `G_0 = sum_j exp(-2 i k r_j)`.
///
/// Reported for diagnostics only; the steady-state photon numbers neglect
/// the cross-mode coupling in the far-detuned limit.
pub fn cross_mode_factor<R: Real>(array: &AtomArray<R>, probe: &ProbeGeometry<R>) -> Complex<R> {
    let k2 = R::of(2.0) * probe.wavenumber();
    array
        .positions()
        .into_iter()
        .map(|r| Complex::new(R::zero(), -r * k2).exp())
        .fold(Complex::new(R::zero(), R::zero()), |acc, z| acc + z)
}

/// Spatial period of the two-mode interference when scanning the lattice
/// constant: `lambda / (1 -+ sin phi)` (nm); minus for CW, plus for CCW.
pub fn interference_period<R: Real>(probe: &ProbeGeometry<R>, mode: CavityMode) -> R {
    probe.wavelength() / (R::one() + mode.sign::<R>() * probe.sin_angle())
}

/// Recover the incidence angle (degrees) from the two measured interference
/// periods, `sin phi = (R - 1)/(R + 1)` with `R = period_cw / period_ccw`.
///
/// Sign convention: `phi > 0` means the CW period exceeds the CCW period.
/// This inverts [`interference_period`] exactly: feeding the two periods of
/// an angle `phi` back in returns `phi`.
pub fn angle_from_period_ratio<R: Real>(period_cw: R, period_ccw: R) -> Result<R> {
    if !(period_cw > R::zero()) || !(period_ccw > R::zero()) {
        return Err(Error::invalid(
            "period ratio",
            "both interference periods must be > 0",
        ));
    }
    let ratio = period_cw / period_ccw;
    let sin_phi = (ratio - R::one()) / (ratio + R::one());
    Ok(rad_to_deg(sin_phi.asin()))
}

/// `|G|^2` for both modes sampled over a spacing grid (nm).
#[derive(Debug, Clone)]
pub struct BraggScan<R: Real = f64> {
    pub spacing: Vec<R>,
    pub rate_cw: Vec<R>,
    pub rate_ccw: Vec<R>,
}

/// Scan the lattice constant from `d_min` to `d_max` (nm) over `n_points`
/// and evaluate `|G|^2` for both cavity modes.
pub fn bragg_scan<R: Real>(
    array: &AtomArray<R>,
    probe: &ProbeGeometry<R>,
    d_min: R,
    d_max: R,
    n_points: usize,
) -> Result<BraggScan<R>> {
    if !(d_min < d_max) {
        return Err(Error::invalid("bragg scan", "d_min must be < d_max"));
    }
    if n_points < 2 {
        return Err(Error::invalid("bragg scan", "need at least 2 grid points"));
    }
    let grid = crate::series::linspace(d_min, d_max, n_points);
    let mut rate_cw = Vec::with_capacity(n_points);
    let mut rate_ccw = Vec::with_capacity(n_points);
    for &d in &grid {
        let a = array.at_spacing(d)?;
        rate_cw.push(structure_factor(&a, probe, CavityMode::Cw).norm_sqr());
        rate_ccw.push(structure_factor(&a, probe, CavityMode::Ccw).norm_sqr());
    }
    Ok(BraggScan {
        spacing: grid,
        rate_cw,
        rate_ccw,
    })
}

/// Interference condition at the scan point: all phasors aligned, or
/// adjacent atoms in antiphase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interference {
    Constructive,
    Destructive,
}

/// Collective rate for stationary atoms, normalized to the single-atom rate:
/// `N^2` at the Bragg condition; `0` (even N) or `1` (odd N, one uncanceled
/// phasor) at the antiphase condition.
pub fn ideal_scaling<R: Real>(n_max: usize, condition: Interference) -> Vec<(usize, R)> {
    (1..=n_max)
        .map(|n| {
            let rate = match condition {
                Interference::Constructive => R::of_usize(n * n),
                Interference::Destructive => {
                    if n % 2 == 0 {
                        R::zero()
                    } else {
                        R::one()
                    }
                }
            };
            (n, rate)
        })
        .collect()
}

/// Debye-Waller suppression of interatomic coherence for a thermal mode:
/// `W = exp(-eta^2 (2 nbar + 1))`.
pub fn debye_waller<R: Real>(lamb_dicke: R, n_phonon: R) -> R {
    (-lamb_dicke * lamb_dicke * (R::of(2.0) * n_phonon + R::one())).exp()
}

/// Collective scaling with thermal motion: the interatomic cross terms are
/// suppressed by the Debye-Waller factor,
/// `rate(N) = N + (|G_ideal|^2 - N) W`, normalized to the single-atom rate.
/// Reduces to [`ideal_scaling`] at `nbar = 0, eta = 0`.
pub fn thermal_bragg_scaling<R: Real>(
    n_max: usize,
    lamb_dicke: R,
    n_phonon: R,
    condition: Interference,
) -> Vec<(usize, R)> {
    let w = debye_waller(lamb_dicke, n_phonon);
    ideal_scaling::<R>(n_max, condition)
        .into_iter()
        .map(|(n, ideal)| {
            let nr = R::of_usize(n);
            (n, nr + (ideal - nr) * w)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn probe_with_factor(factor_cw_periods: f64, n_atoms: usize) -> (AtomArray, ProbeGeometry) {
        // normal incidence, spacing chosen so k*d = 2*pi*factor
        let lambda = 852.347;
        let probe = ProbeGeometry::new(lambda, 0.0).unwrap();
        let d = factor_cw_periods * lambda;
        (AtomArray::new(n_atoms, d).unwrap(), probe)
    }

    #[test]
    fn two_atoms_in_phase() {
        let (array, probe) = probe_with_factor(17.0, 2);
        let g = structure_factor(&array, &probe, CavityMode::Cw);
        assert_relative_eq!(g.norm_sqr(), 4.0, epsilon = 1e-9);
    }

    #[test]
    fn two_atoms_antiphase() {
        let (array, probe) = probe_with_factor(17.5, 2);
        let g = structure_factor(&array, &probe, CavityMode::Cw);
        assert!(g.norm_sqr() < 1e-9);
    }

    #[test]
    fn three_atoms_at_third_period_cancel() {
        // three phasors at 120 degree spacing sum to zero; oracle below
        // confirms by direct summation
        let (array, probe) = probe_with_factor(17.0 + 1.0 / 3.0, 3);
        let g = structure_factor(&array, &probe, CavityMode::Cw);
        let direct: num_complex::Complex64 = (0..3)
            .map(|n| {
                num_complex::Complex64::from_polar(
                    1.0,
                    2.0 * std::f64::consts::PI * (17.0 + 1.0 / 3.0) * n as f64,
                )
            })
            .sum();
        assert_relative_eq!(g.norm_sqr(), direct.norm_sqr(), epsilon = 1e-9);
        assert!(g.norm_sqr() < 1e-9);
    }

    #[test]
    fn cross_mode_factor_examples() {
        let probe = ProbeGeometry::new(852.347, 0.0).unwrap();
        // N=1 at the origin
        let g0 = cross_mode_factor(&AtomArray::new(1, 1.0).unwrap(), &probe);
        assert_relative_eq!(g0.re, 1.0, epsilon = 1e-12);
        assert_relative_eq!(g0.im, 0.0, epsilon = 1e-12);
        // N=2 with 2kd = 2*pi: both phasors unity
        let d = probe.wavelength() / 2.0;
        let g0 = cross_mode_factor(&AtomArray::new(2, d).unwrap(), &probe);
        assert_relative_eq!(g0.re, 2.0, epsilon = 1e-9);
        // N=2 with 2kd = pi: 1 + e^{-i pi} = 0
        let d = probe.wavelength() / 4.0;
        let g0 = cross_mode_factor(&AtomArray::new(2, d).unwrap(), &probe);
        assert!(g0.norm() < 1e-9);
    }

    #[test]
    fn interference_periods_match_reported_values() {
        let probe = ProbeGeometry::new(852.347, -5.07).unwrap();
        let p_cw: f64 = interference_period(&probe, CavityMode::Cw);
        let p_ccw: f64 = interference_period(&probe, CavityMode::Ccw);
        assert!((p_cw - 783.1).abs() < 0.2, "cw period {p_cw}");
        assert!((p_ccw - 935.0).abs() < 0.2, "ccw period {p_ccw}");
    }

    #[test]
    fn normal_incidence_periods_equal_wavelength() {
        let probe = ProbeGeometry::new(852.35, 0.0).unwrap();
        assert_relative_eq!(interference_period(&probe, CavityMode::Cw), 852.35);
        assert_relative_eq!(interference_period(&probe, CavityMode::Ccw), 852.35);
    }

    #[test]
    fn interference_periods_at_large_angle() {
        // lambda/(1 -+ sin 19.73deg) evaluated directly
        let probe = ProbeGeometry::new(852.35, 19.73).unwrap();
        let s = (19.73_f64).to_radians().sin();
        assert_relative_eq!(
            interference_period(&probe, CavityMode::Cw),
            852.35 / (1.0 - s),
            epsilon = 1e-9
        );
        assert!((interference_period(&probe, CavityMode::Cw) - 1286.7).abs() < 0.2);
        assert!((interference_period(&probe, CavityMode::Ccw) - 637.2).abs() < 0.2);
    }

    #[test]
    fn angle_recovery() {
        // paper-like periods; the reported angle magnitude is 5.07 degrees
        let phi: f64 = angle_from_period_ratio(783.1, 935.0).unwrap();
        assert!((phi.abs() - 5.07).abs() < 0.01, "phi {phi}");
        // cw period below ccw period means phi < 0 under the sign convention
        assert!(phi < 0.0);
        // equal periods: normal incidence
        assert_relative_eq!(angle_from_period_ratio(700.0_f64, 700.0).unwrap(), 0.0);
        // derived from inverting the period formula
        let phi: f64 = angle_from_period_ratio(637.2, 1286.7).unwrap();
        assert!((phi + 19.73).abs() < 0.01, "phi {phi}");
    }

    #[test]
    fn angle_errors_on_nonpositive_period() {
        assert!(angle_from_period_ratio(-1.0_f64, 700.0).is_err());
        assert!(angle_from_period_ratio(700.0_f64, 0.0).is_err());
    }

    #[test]
    fn angle_period_round_trip_is_identity() {
        for &phi in &[-80.0, -19.73, -5.07, 0.0, 3.3, 45.0, 88.9] {
            let probe = ProbeGeometry::new(852.347, phi).unwrap();
            let p_cw = interference_period(&probe, CavityMode::Cw);
            let p_ccw = interference_period(&probe, CavityMode::Ccw);
            let back: f64 = angle_from_period_ratio(p_cw, p_ccw).unwrap();
            assert!((back - phi).abs() < 1e-9, "phi {phi} -> {back}");
        }
    }

    #[test]
    fn bragg_scan_two_atom_sinusoid() {
        let probe = ProbeGeometry::new(852.347, 0.0).unwrap();
        let array = AtomArray::new(2, 852.347).unwrap();
        let period = interference_period(&probe, CavityMode::Cw);
        let scan = bragg_scan(&array, &probe, 17.0 * period, 18.0 * period, 801).unwrap();
        let max = scan.rate_cw.iter().cloned().fold(f64::MIN, f64::max);
        let min = scan.rate_cw.iter().cloned().fold(f64::MAX, f64::min);
        assert!((max - 4.0).abs() < 1e-4);
        assert!(min < 1e-4);
    }

    #[test]
    fn bragg_scan_single_atom_constant() {
        let probe = ProbeGeometry::new(852.347, 0.0).unwrap();
        let array = AtomArray::new(1, 852.347).unwrap();
        let scan = bragg_scan(&array, &probe, 100.0, 2000.0, 64).unwrap();
        for &r in &scan.rate_cw {
            assert_relative_eq!(r, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn bragg_scan_four_atom_peak_and_width() {
        let probe = ProbeGeometry::new(852.347, 0.0).unwrap();
        let period = interference_period(&probe, CavityMode::Cw);
        let scan4 = bragg_scan(
            &AtomArray::new(4, period).unwrap(),
            &probe,
            16.6 * period,
            17.4 * period,
            4001,
        )
        .unwrap();
        let peak4 = scan4.rate_cw.iter().cloned().fold(f64::MIN, f64::max);
        assert!((peak4 - 16.0).abs() < 1e-3);
        assert!(half_width(&scan4) < half_width(&bragg_scan(
            &AtomArray::new(2, period).unwrap(),
            &probe,
            16.6 * period,
            17.4 * period,
            4001,
        )
        .unwrap()));
    }

    /// Full width at half maximum of the central Bragg peak, in grid units.
    fn half_width(scan: &BraggScan) -> usize {
        let peak = scan.rate_cw.iter().cloned().fold(f64::MIN, f64::max);
        scan.rate_cw.iter().filter(|&&r| r > peak / 2.0).count()
    }

    #[test]
    fn ideal_scaling_values() {
        let cons: Vec<(usize, f64)> = ideal_scaling(4, Interference::Constructive);
        assert_eq!(cons[3], (4, 16.0));
        let dest: Vec<(usize, f64)> = ideal_scaling(4, Interference::Destructive);
        assert_eq!(dest[1], (2, 0.0));
        assert_eq!(dest[2], (3, 1.0));
    }

    #[test]
    fn thermal_scaling_reduces_to_ideal_when_cold() {
        let ideal: Vec<(usize, f64)> = ideal_scaling(6, Interference::Constructive);
        let thermal = thermal_bragg_scaling(6, 0.0, 0.0, Interference::Constructive);
        assert_eq!(ideal, thermal);
        let thermal = thermal_bragg_scaling(6, 0.17, 0.0, Interference::Constructive);
        // eta > 0 with nbar = 0 still suppresses cross terms via W = e^{-eta^2}
        assert!(thermal[3].1 < 16.0);
    }

    #[test]
    fn thermal_scaling_paper_conditions() {
        let w: f64 = debye_waller(0.17, 40.0);
        assert!((w - 0.0963).abs() < 2e-4, "W {w}");
        let rates = thermal_bragg_scaling(4, 0.17, 40.0, Interference::Constructive);
        let n4 = rates[3].1;
        assert!((n4 - (4.0 + 12.0 * w)).abs() < 1e-12);
        assert!((n4 - 5.16).abs() < 0.01, "N=4 thermal rate {n4}");
    }

    #[test]
    fn offsets_shift_positions() {
        let array = AtomArray::with_offsets(2, 100.0, vec![0.0, 25.0]).unwrap();
        assert_eq!(array.positions(), vec![0.0, 125.0]);
        assert!(AtomArray::with_offsets(2, 100.0, vec![0.0]).is_err());
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(AtomArray::<f64>::new(0, 1.0).is_err());
        assert!(AtomArray::<f64>::new(2, 0.0).is_err());
        assert!(ProbeGeometry::<f64>::new(852.0, 90.0).is_err());
        assert!(ProbeGeometry::<f64>::new(-1.0, 0.0).is_err());
        let probe = ProbeGeometry::new(852.0, 0.0).unwrap();
        let array = AtomArray::new(2, 100.0).unwrap();
        assert!(bragg_scan(&array, &probe, 5.0, 4.0, 10).is_err());
        assert!(bragg_scan(&array, &probe, 4.0, 5.0, 1).is_err());
    }
}
