//! Zeeman-structure physics: dipole Clebsch-Gordan couplings across the
//! cesium D2 manifold, per-sublevel Rayleigh amplitudes, the interference
//! contrast of mixed-state collective scattering, and multi-level N-scaling
//! at the Bragg condition.

pub mod wigner;

use num_complex::Complex;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub use wigner::{clebsch_gordan, ExactCg};

/// Photon polarization in the spherical basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Helicity {
    SigmaPlus,
    SigmaMinus,
}

impl Helicity {
    pub fn q(self) -> i32 {
        match self {
            Helicity::SigmaPlus => 1,
            Helicity::SigmaMinus => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Helicity::SigmaPlus => Helicity::SigmaMinus,
            Helicity::SigmaMinus => Helicity::SigmaPlus,
        }
    }
}

/// Dipole coupling `<F' m+q | F m; 1 q>` as an exact coefficient.
///
/// Selection-rule failures return an exact zero; quantum numbers with
/// `|m| > F` are rejected.
pub fn dipole_cg(f: u32, m: i32, q: i32, f_prime: u32) -> Result<ExactCg> {
    if q.abs() > 1 {
        return Err(Error::invalid("dipole coupling", "polarization q must be -1, 0, or 1"));
    }
    wigner::clebsch_gordan(f, m, 1, q, f_prime, m + q)
}

/// Population distribution over the ground Zeeman sublevels of an `F`
/// manifold: `c_m >= 0`, normalized to one.
#[derive(Debug, Clone)]
pub struct ZeemanDistribution {
    f: u32,
    populations: Vec<f64>, // index m + f
}

impl ZeemanDistribution {
    pub fn new(f: u32, populations: Vec<f64>) -> Result<Self> {
        let dim = 2 * f as usize + 1;
        if populations.len() != dim {
            return Err(Error::invalid(
                "zeeman distribution",
                format!("expected {dim} populations for F={f}, got {}", populations.len()),
            ));
        }
        if populations.iter().any(|&c| c < 0.0 || !c.is_finite()) {
            return Err(Error::invalid("zeeman distribution", "populations must be >= 0"));
        }
        let total: f64 = populations.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(
                "zeeman distribution",
                format!("populations sum to {total}, expected 1 within 1e-12"),
            ));
        }
        Ok(ZeemanDistribution { f, populations })
    }

    /// Build from `(m, c_m)` pairs; unlisted sublevels get zero weight.
    pub fn from_pairs(f: u32, pairs: &[(i32, f64)]) -> Result<Self> {
        let dim = 2 * f as usize + 1;
        let mut populations = vec![0.0; dim];
        for &(m, c) in pairs {
            if m.unsigned_abs() > f {
                return Err(Error::invalid(
                    "zeeman distribution",
                    format!("sublevel m={m} outside |m| <= {f}"),
                ));
            }
            populations[(m + f as i32) as usize] += c;
        }
        Self::new(f, populations)
    }

    /// All population in the stretched state `m = +F`.
    pub fn stretched(f: u32) -> Self {
        let mut populations = vec![0.0; 2 * f as usize + 1];
        *populations.last_mut().expect("non-empty") = 1.0;
        ZeemanDistribution { f, populations }
    }

    /// Equal population in every sublevel.
    pub fn uniform(f: u32) -> Self {
        let dim = 2 * f as usize + 1;
        ZeemanDistribution {
            f,
            populations: vec![1.0 / dim as f64; dim],
        }
    }

    /// Imperfectly pumped stretched state: weight `purity` in `m = +F`, the
    /// remainder spread evenly over the other sublevels.
    pub fn stretched_with_purity(f: u32, purity: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&purity) {
            return Err(Error::invalid("zeeman distribution", "purity must be in [0, 1]"));
        }
        let dim = 2 * f as usize + 1;
        let rest = (1.0 - purity) / (dim - 1) as f64;
        let mut populations = vec![rest; dim];
        populations[dim - 1] = purity;
        Ok(ZeemanDistribution { f, populations })
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn population(&self, m: i32) -> f64 {
        self.populations[(m + self.f as i32) as usize]
    }

    /// Iterate `(m, c_m)` over the manifold.
    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        let f = self.f as i32;
        self.populations.iter().enumerate().map(move |(i, &c)| (i as i32 - f, c))
    }
}

/// Excited hyperfine levels addressed by the probe: `(F', angular offset
/// relative to F'=5)` plus the atomic linewidth, all in rad/s.
#[derive(Debug, Clone)]
pub struct LevelData<R: Real = f64> {
    levels: Vec<(u32, R)>,
    gamma: R,
}

impl<R: Real> LevelData<R> {
    pub fn new(mut levels: Vec<(u32, R)>, gamma: R) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::invalid("level data", "need at least one excited level"));
        }
        if !(gamma > R::zero()) {
            return Err(Error::invalid("level data", "Gamma must be > 0"));
        }
        levels.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(LevelData { levels, gamma })
    }

    /// The cesium D2 `F=4 -> F' in {3,4,5}` manifold from the constants table.
    pub fn cesium_d2(constants: &PhysicalConstants) -> Self {
        let levels = constants
            .fprime_offsets_2pi_hz
            .iter()
            .map(|&(f, off)| (f, R::of(2.0 * std::f64::consts::PI * off)))
            .collect();
        LevelData::new(levels, R::of(constants.gamma())).expect("constants table is valid")
    }

    /// Only the F'=5 level, for near-cycling-transition models.
    pub fn cesium_d2_fprime5(constants: &PhysicalConstants) -> Self {
        LevelData::new(vec![(5, R::zero())], R::of(constants.gamma()))
            .expect("constants table is valid")
    }

    pub fn levels(&self) -> &[(u32, R)] {
        &self.levels
    }

    pub fn gamma(&self) -> R {
        self.gamma
    }
}

/// Rayleigh scattering amplitude for sublevel `m` and helicity channel `q`:
/// `alpha_m^(q) = sum_F' cg(F, m, q, F')^2 / (Delta_F' + i Gamma/2)`
/// with `Delta_F' = delta_ca - offset_F'` the detuning from each excited
/// level. `delta_ca` is the angular detuning from the `F -> F'=5` line.
///
/// The scattering channel absorbs and emits the same helicity (population
/// distribution preserved), so each channel carries one squared coupling per
/// excited level. Arbitrary units.
pub fn rayleigh_amplitude<R: Real>(
    f: u32,
    m: i32,
    q: Helicity,
    levels: &LevelData<R>,
    delta_ca: R,
) -> Result<Complex<R>> {
    let half_gamma = levels.gamma() / R::of(2.0);
    let mut total = Complex::new(R::zero(), R::zero());
    for &(f_prime, offset) in levels.levels() {
        let cg2 = R::of(dipole_cg(f, m, q.q(), f_prime)?.square().to_f64_lossy());
        if cg2 == R::zero() {
            continue;
        }
        let denom = Complex::new(delta_ca - offset, half_gamma);
        total = total + Complex::new(cg2, R::zero()) / denom;
    }
    Ok(total)
}

trait ToF64Lossy {
    fn to_f64_lossy(&self) -> f64;
}

impl ToF64Lossy for num_rational::BigRational {
    fn to_f64_lossy(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.to_f64().expect("cg square fits in f64")
    }
}

/// All per-sublevel amplitudes of a manifold at a fixed detuning.
#[derive(Debug, Clone)]
pub struct RayleighAmplitudes<R: Real = f64> {
    f: u32,
    /// index `m + f`, one entry per helicity
    plus: Vec<Complex<R>>,
    minus: Vec<Complex<R>>,
    detuning_reference: R,
}

impl<R: Real> RayleighAmplitudes<R> {
    /// Evaluate `rayleigh_amplitude` across the whole manifold.
    pub fn compute(f: u32, levels: &LevelData<R>, delta_ca: R) -> Result<Self> {
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for m in -(f as i32)..=(f as i32) {
            plus.push(rayleigh_amplitude(f, m, Helicity::SigmaPlus, levels, delta_ca)?);
            minus.push(rayleigh_amplitude(f, m, Helicity::SigmaMinus, levels, delta_ca)?);
        }
        Ok(RayleighAmplitudes {
            f,
            plus,
            minus,
            detuning_reference: delta_ca,
        })
    }

    /// Override table for synthetic amplitude sets (tests, what-if studies).
    pub fn from_raw(f: u32, plus: Vec<Complex<R>>, minus: Vec<Complex<R>>) -> Result<Self> {
        let dim = 2 * f as usize + 1;
        if plus.len() != dim || minus.len() != dim {
            return Err(Error::invalid(
                "rayleigh amplitudes",
                format!("expected {dim} amplitudes per helicity for F={f}"),
            ));
        }
        Ok(RayleighAmplitudes {
            f,
            plus,
            minus,
            detuning_reference: R::zero(),
        })
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn detuning_reference(&self) -> R {
        self.detuning_reference
    }

    pub fn amplitude(&self, m: i32, q: Helicity) -> Complex<R> {
        let idx = (m + self.f as i32) as usize;
        match q {
            Helicity::SigmaPlus => self.plus[idx],
            Helicity::SigmaMinus => self.minus[idx],
        }
    }
}

/// Interference contrast of collective scattering from a mixed state:
/// `C = |sum_m c_m alpha_m|^2 / sum_m c_m |alpha_m|^2`, in `[0, 1]` by
/// Cauchy-Schwarz, with equality iff every populated amplitude is equal.
pub fn interference_contrast<R: Real>(
    zeeman: &ZeemanDistribution,
    amplitudes: &RayleighAmplitudes<R>,
    q: Helicity,
) -> Result<R> {
    if zeeman.f() != amplitudes.f() {
        return Err(Error::invalid(
            "interference contrast",
            "distribution and amplitudes refer to different F manifolds",
        ));
    }
    let mut coherent = Complex::new(R::zero(), R::zero());
    let mut incoherent = R::zero();
    for (m, c) in zeeman.iter() {
        if c == 0.0 {
            continue;
        }
        let c = R::of(c);
        let alpha = amplitudes.amplitude(m, q);
        coherent = coherent + alpha.scale(c);
        incoherent = incoherent + c * alpha.norm_sqr();
    }
    if incoherent == R::zero() {
        return Err(Error::invalid(
            "interference contrast",
            "all populated amplitudes are zero",
        ));
    }
    Ok(coherent.norm_sqr() / incoherent)
}

/// Mean collective photon number at the Bragg condition versus atom number,
/// normalized to the single-atom rate: `rate(N) = N + (N^2 - N) C` with `C`
/// the interference contrast. Exactly `N^2` when `C = 1`.
pub fn multilevel_scaling<R: Real>(
    zeeman: &ZeemanDistribution,
    amplitudes: &RayleighAmplitudes<R>,
    q: Helicity,
    n_max: usize,
) -> Result<Vec<(usize, R)>> {
    let contrast = interference_contrast(zeeman, amplitudes, q)?;
    Ok((1..=n_max)
        .map(|n| {
            let nr = R::of_usize(n);
            (n, nr + (nr * nr - nr) * contrast)
        })
        .collect())
}

/// Near-resonant chiral coupling weight of a mixed state into one helicity
/// channel: `w_q = sum_m c_m cg(F, m, q, F+1)^2`, the F'=F+1 coupling
/// strength averaged over the population. For the stretched state the
/// sigma+/sigma- weights differ by the exact Clebsch-Gordan factor (45 for
/// cesium F=4).
pub fn chiral_channel_weight(zeeman: &ZeemanDistribution, q: Helicity) -> Result<f64> {
    use num_traits::ToPrimitive;
    let f = zeeman.f();
    let mut weight = 0.0;
    for (m, c) in zeeman.iter() {
        if c == 0.0 {
            continue;
        }
        let cg2 = dipole_cg(f, m, q.q(), f + 1)?
            .square()
            .to_f64()
            .expect("cg square fits in f64");
        weight += c * cg2;
    }
    Ok(weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

    #[test]
    fn stretched_single_level_amplitude() {
        // m = +4, q = +1: only F'=5 couples, alpha = 1/(Delta + i Gamma/2)
        let c = constants::table();
        let levels: LevelData = LevelData::cesium_d2(c);
        let delta = TWO_PI * 100.0e6;
        let alpha = rayleigh_amplitude(4, 4, Helicity::SigmaPlus, &levels, delta).unwrap();
        let expected = Complex64::new(1.0, 0.0) / Complex64::new(delta, c.gamma() / 2.0);
        assert_relative_eq!(alpha.re, expected.re, max_relative = 1e-12);
        assert_relative_eq!(alpha.im, expected.im, max_relative = 1e-12);
    }

    #[test]
    fn stretched_ratio_tends_to_45_with_single_level() {
        let c = constants::table();
        let levels: LevelData = LevelData::cesium_d2_fprime5(c);
        let delta = TWO_PI * 50.0e9;
        let plus = rayleigh_amplitude(4, 4, Helicity::SigmaPlus, &levels, delta).unwrap();
        let minus = rayleigh_amplitude(4, 4, Helicity::SigmaMinus, &levels, delta).unwrap();
        assert_relative_eq!(plus.norm_sqr() / minus.norm_sqr(), 45.0 * 45.0, max_relative = 1e-9);
        // the coupling-strength (cg^2) ratio itself is exactly 45
        let w_plus = chiral_channel_weight(&ZeemanDistribution::stretched(4), Helicity::SigmaPlus).unwrap();
        let w_minus = chiral_channel_weight(&ZeemanDistribution::stretched(4), Helicity::SigmaMinus).unwrap();
        assert_relative_eq!(w_plus / w_minus, 45.0, max_relative = 1e-12);
    }

    #[test]
    fn contrast_single_sublevel_is_one() {
        let c = constants::table();
        let levels: LevelData = LevelData::cesium_d2(c);
        let amps = RayleighAmplitudes::compute(4, &levels, TWO_PI * 100.0e6).unwrap();
        let z = ZeemanDistribution::stretched(4);
        let contrast = interference_contrast(&z, &amps, Helicity::SigmaPlus).unwrap();
        assert_relative_eq!(contrast, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn contrast_direct_formula_check() {
        // c_{+4} = c_{-4} = 1/2 with amplitudes (1, 0) gives C = 0.5
        let mut plus = vec![Complex64::new(0.0, 0.0); 9];
        plus[8] = Complex64::new(1.0, 0.0);
        let amps = RayleighAmplitudes::from_raw(4, plus.clone(), plus).unwrap();
        let z = ZeemanDistribution::from_pairs(4, &[(-4, 0.5), (4, 0.5)]).unwrap();
        let contrast = interference_contrast(&z, &amps, Helicity::SigmaPlus).unwrap();
        assert_relative_eq!(contrast, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn contrast_grows_with_detuning() {
        let c = constants::table();
        let levels: LevelData = LevelData::cesium_d2(c);
        let z = ZeemanDistribution::uniform(4);
        let mut last = 0.0;
        for &f_hz in &[100.0e6, 200.0e6, 400.0e6, 800.0e6, 1.521e9] {
            let amps = RayleighAmplitudes::compute(4, &levels, TWO_PI * f_hz).unwrap();
            let contrast = interference_contrast(&z, &amps, Helicity::SigmaPlus).unwrap();
            assert!(contrast < 1.0);
            assert!(contrast > last, "contrast not monotone at {f_hz}");
            last = contrast;
        }
    }

    #[test]
    fn scaling_is_n_squared_at_full_contrast() {
        let mut plus = vec![Complex64::new(1.0, 0.0); 9];
        plus[0] = Complex64::new(1.0, 0.0);
        let amps = RayleighAmplitudes::from_raw(4, plus.clone(), plus).unwrap();
        let z = ZeemanDistribution::uniform(4);
        let scaling = multilevel_scaling(&z, &amps, Helicity::SigmaPlus, 4).unwrap();
        for (n, rate) in scaling {
            assert_relative_eq!(rate, (n * n) as f64, max_relative = 1e-12);
        }
    }

    #[test]
    fn two_atom_scaling_matches_expanded_expectation() {
        // N(S2 - |S1|^2) + N^2 |S1|^2 at N=2 equals 2*S2 + 2*|S1|^2 with
        // S1 = sum c alpha, S2 = sum c |alpha|^2 (constructive phase)
        let c = constants::table();
        let levels: LevelData = LevelData::cesium_d2(c);
        let amps = RayleighAmplitudes::compute(4, &levels, TWO_PI * 100.0e6).unwrap();
        let z = ZeemanDistribution::uniform(4);
        let scaling = multilevel_scaling(&z, &amps, Helicity::SigmaPlus, 2).unwrap();
        let mut s1 = Complex64::new(0.0, 0.0);
        let mut s2 = 0.0;
        for (m, cm) in z.iter() {
            let a = amps.amplitude(m, Helicity::SigmaPlus);
            s1 += a.scale(cm);
            s2 += cm * a.norm_sqr();
        }
        let expected = (2.0 * s2 + 2.0 * s1.norm_sqr()) / s2;
        assert_relative_eq!(scaling[1].1, expected, max_relative = 1e-12);
    }

    #[test]
    fn stretched_like_pumping_beats_uniform() {
        let c = constants::table();
        let levels: LevelData = LevelData::cesium_d2(c);
        let amps = RayleighAmplitudes::compute(4, &levels, TWO_PI * 100.0e6).unwrap();
        let near_stretched =
            ZeemanDistribution::from_pairs(4, &[(2, 1.0 / 3.0), (3, 1.0 / 3.0), (4, 1.0 / 3.0)])
                .unwrap();
        let uniform = ZeemanDistribution::uniform(4);
        let hi = multilevel_scaling(&near_stretched, &amps, Helicity::SigmaPlus, 4).unwrap();
        let lo = multilevel_scaling(&uniform, &amps, Helicity::SigmaPlus, 4).unwrap();
        for ((n, high), (_, low)) in hi.iter().zip(lo.iter()) {
            if *n == 1 {
                continue;
            }
            assert!(high > low, "N={n}");
            assert!(*high < (n * n) as f64, "N={n}");
        }
    }

    #[test]
    fn distribution_validation() {
        assert!(ZeemanDistribution::new(4, vec![0.5; 9]).is_err());
        assert!(ZeemanDistribution::new(4, vec![1.0; 1]).is_err());
        assert!(ZeemanDistribution::from_pairs(4, &[(5, 1.0)]).is_err());
        let z = ZeemanDistribution::from_pairs(4, &[(4, 1.0)]).unwrap();
        assert_eq!(z.population(4), 1.0);
        assert_eq!(z.population(0), 0.0);
    }
}
