//! Physical-constants table.
//!
//! The constants ship as a versioned, human-readable `key = value` file
//! embedded in the binary (`src/data/constants.txt`). Everything that is
//! atom- or apparatus-independent lives here; cavity and drive parameters
//! belong in a scenario file instead.

use std::collections::BTreeMap;

use once_cell::sync::Lazy;

use crate::error::{Error, Result};

/// Raw text of the shipped constants table.
pub const CONSTANTS_TEXT: &str = include_str!("data/constants.txt");

/// Parsed physical constants. All frequencies are stored as `omega/(2*pi)`
/// in Hz, exactly as written in the table; use the accessors for angular
/// quantities.
#[derive(Debug, Clone)]
pub struct PhysicalConstants {
    pub version: u32,
    /// Cesium D2 wavelength (nm).
    pub wavelength_nm: f64,
    /// Cesium D2 natural linewidth, Gamma/(2*pi) in Hz.
    pub gamma_2pi_hz: f64,
    /// Photon recoil energy as a frequency, E_rec/(hbar*2*pi) in Hz.
    pub recoil_2pi_hz: f64,
    /// Excited hyperfine offsets relative to F'=5, in Hz (omega/2pi).
    pub fprime_offsets_2pi_hz: [(u32, f64); 3],
    /// Reduced Planck constant (J s).
    pub hbar: f64,
    /// Boltzmann constant (J/K).
    pub boltzmann: f64,
}

impl PhysicalConstants {
    /// Angular natural linewidth Gamma (rad/s).
    pub fn gamma(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.gamma_2pi_hz
    }

    /// Angular recoil frequency E_rec/hbar (rad/s).
    pub fn recoil(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.recoil_2pi_hz
    }

    /// Angular hyperfine offset of a given F' relative to F'=5 (rad/s).
    pub fn fprime_offset(&self, f_prime: u32) -> Option<f64> {
        self.fprime_offsets_2pi_hz
            .iter()
            .find(|(f, _)| *f == f_prime)
            .map(|(_, v)| 2.0 * std::f64::consts::PI * v)
    }

    /// Parse a constants table in the shipped `key = value` format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::invalid("constants table", format!("line {}: missing '='", lineno + 1))
            })?;
            let key = key.trim().to_string();
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::invalid(
                    "constants table",
                    format!("line {}: unparseable value for `{key}`", lineno + 1),
                )
            })?;
            if map.insert(key.clone(), value).is_some() {
                return Err(Error::invalid(
                    "constants table",
                    format!("duplicate key `{key}`"),
                ));
            }
        }
        let get = |key: &str| -> Result<f64> {
            map.get(key)
                .copied()
                .ok_or_else(|| Error::invalid("constants table", format!("missing key `{key}`")))
        };
        Ok(PhysicalConstants {
            version: get("version")? as u32,
            wavelength_nm: get("cesium_d2_wavelength_nm")?,
            gamma_2pi_hz: get("cesium_d2_gamma_2pi_hz")?,
            recoil_2pi_hz: get("cesium_d2_recoil_2pi_hz")?,
            fprime_offsets_2pi_hz: [
                (5, get("cesium_d2_fprime5_offset_2pi_hz")?),
                (4, get("cesium_d2_fprime4_offset_2pi_hz")?),
                (3, get("cesium_d2_fprime3_offset_2pi_hz")?),
            ],
            hbar: get("hbar_j_s")?,
            boltzmann: get("boltzmann_j_per_k")?,
        })
    }
}

static TABLE: Lazy<PhysicalConstants> = Lazy::new(|| {
    PhysicalConstants::parse(CONSTANTS_TEXT).expect("shipped constants table is valid")
});

/// The shipped constants table.
pub fn table() -> &'static PhysicalConstants {
    &TABLE
}
