//! Collective light scattering by an atom array coupled to a two-mode ring
//! cavity: Bragg structure factors, steady-state photon numbers, thermal
//! resolved-sideband spectra, cooling limits, multi-level interference
//! contrast, chiral scattering, and the nonlinear least-squares fits that
//! invert those models.
//!
//! Numerical kernels are generic over the scalar type through
//! [`scalar::Real`] (`f32` or `f64`); domain structs default their scalar
//! parameter to `f64`, so `AtomArray` is the double-precision array and
//! `AtomArray<f32>` the single-precision one. Exact quantities
//! (Clebsch-Gordan coefficients) use rational arithmetic internally.
//!
//! Conventions, used everywhere without further note:
//! - frequencies are angular (rad/s); configuration files state `omega/2pi`
//!   in Hz under keys suffixed `_2pi_hz`;
//! - lengths are nm; rates are arbitrary units;
//! - sideband order `m > 0` is the cooling (anti-Stokes) configuration,
//!   probed with the drive red-detuned from the cavity by `m omega_t`;
//! - `phi > 0` means the CW interference period exceeds the CCW period.

pub mod cavity;
pub mod constants;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod multilevel;
pub mod noise;
pub mod scalar;
pub mod scenario;
pub mod series;
pub mod sidebands;
pub mod special;
pub mod table;

pub use cavity::{
    chiral_scattering_spectrum, effective_params, empty_cavity_spectrum, mode_photon_numbers,
    CavityParams, ChiralSpectra, DriveParams, EffectiveParams, EmptyCavitySpectrum, PhotonNumbers,
};
pub use error::{Error, Result};
pub use geometry::{
    angle_from_period_ratio, bragg_scan, cross_mode_factor, debye_waller, ideal_scaling,
    interference_period, structure_factor, thermal_bragg_scaling, AtomArray, BraggScan,
    CavityMode, Interference, ProbeGeometry,
};
pub use multilevel::{
    chiral_channel_weight, dipole_cg, interference_contrast, multilevel_scaling,
    rayleigh_amplitude, Helicity, LevelData, RayleighAmplitudes, ZeemanDistribution,
};
pub use scalar::Real;
pub use scenario::{parse_scenario, Scenario};
pub use series::{Channel, SpectrumSeries};
pub use sidebands::{
    boltzmann_weight, cavity_spectrum, cooling_limit, effective_cooperativity,
    franck_condon_oracle, ground_state_probability, phonon_from_sidebands, phonon_to_temperature,
    sideband_fraction, CoolingLimit, MotionLabel, SidebandFractions, SpectrumTruncation,
    TemperatureEstimate, ThermalMode,
};
pub use table::{read_table, write_table, Column, DataTable};
