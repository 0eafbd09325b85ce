//! Scenario configuration: a line-oriented `[section]` / `key = value`
//! format mirroring the module inputs, with strict key validation and
//! precise diagnostics.
//!
//! Frequencies in scenario files are ordinary Hz under keys suffixed
//! `_2pi_hz` (the value is `omega/2pi`); the accessors return angular
//! quantities. Lists use repeated keys; repeated `[thermal]` sections
//! describe up to two vibrational modes.

use std::fmt::Write as _;

use thiserror::Error;

use crate::cavity::{CavityParams, DriveParams};
use crate::constants;
use crate::error::Result;
use crate::geometry::{AtomArray, ProbeGeometry};
use crate::multilevel::ZeemanDistribution;
use crate::sidebands::{MotionLabel, ThermalMode};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Scenario parse/validation failures; every class carries the source name
/// and line so the CLI can point at the offending text.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{source_name}:{line}: expected `key = value`, got `{text}`")]
    Syntax {
        source_name: String,
        line: usize,
        text: String,
    },

    #[error("{source_name}:{line}: unknown section `[{section}]`")]
    UnknownSection {
        source_name: String,
        line: usize,
        section: String,
    },

    #[error("{source_name}:{line}: unknown key `{key}` in section `[{section}]`")]
    UnknownKey {
        source_name: String,
        line: usize,
        section: String,
        key: String,
    },

    #[error("{source_name}:{line}: key `{key}` has the wrong unit suffix; use `{expected}`")]
    UnitSuffixMismatch {
        source_name: String,
        line: usize,
        key: String,
        expected: String,
    },

    #[error("{source_name}:{line}: duplicate key `{key}` in section `[{section}]`")]
    DuplicateKey {
        source_name: String,
        line: usize,
        section: String,
        key: String,
    },

    #[error("{source_name}:{line}: key `{key}`: cannot parse `{value}`")]
    BadValue {
        source_name: String,
        line: usize,
        key: String,
        value: String,
    },

    #[error("{source_name}: key `{key}`: {message}")]
    Invariant {
        source_name: String,
        key: String,
        message: String,
    },

    #[error("{source_name}:{line}: key `{key}` appears before any section header")]
    KeyOutsideSection {
        source_name: String,
        line: usize,
        key: String,
    },
}

/// Atom-array section.
#[derive(Debug, Clone, PartialEq)]
pub struct ArraySection {
    pub n_atoms: usize,
    pub spacing_nm: f64,
    pub offsets_nm: Vec<f64>,
}

/// Probe section: geometry plus drive.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSection {
    pub wavelength_nm: f64,
    pub angle_deg: f64,
    pub rabi_2pi_hz: f64,
    pub detuning_atom_2pi_hz: f64,
    pub detuning_cavity_2pi_hz: f64,
}

/// Cavity section.
#[derive(Debug, Clone, PartialEq)]
pub struct CavitySection {
    pub kappa_2pi_hz: f64,
    pub cooperativity: f64,
    pub gamma_2pi_hz: f64,
    pub chiral_split_2pi_hz: f64,
}

/// One vibrational mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalSection {
    pub label: MotionLabel,
    pub trap_2pi_hz: f64,
    pub n_phonon: f64,
    /// Explicit override; when absent the recoil-limited value is used.
    pub lamb_dicke: Option<f64>,
}

/// Zeeman section.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeemanSection {
    pub f: u32,
    pub populations: Vec<(i32, f64)>,
}

/// A fully validated simulation scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub array: ArraySection,
    pub probe: ProbeSection,
    pub cavity: CavitySection,
    pub thermal: Vec<ThermalSection>,
    pub zeeman: ZeemanSection,
}

impl Default for Scenario {
    /// Paper-like defaults: cesium constants, the measured cavity, a two-atom
    /// array at the 17th CW Bragg order for a -5.07 degree probe, the cooled
    /// radial and axial modes, and a stretched-state atom.
    fn default() -> Self {
        let c = constants::table();
        let angle_deg = -5.07;
        let period_cw = c.wavelength_nm / (1.0 - (angle_deg * std::f64::consts::PI / 180.0).sin());
        Scenario {
            array: ArraySection {
                n_atoms: 2,
                spacing_nm: 17.0 * period_cw,
                offsets_nm: Vec::new(),
            },
            probe: ProbeSection {
                wavelength_nm: c.wavelength_nm,
                angle_deg,
                rabi_2pi_hz: 1.0e5,
                detuning_atom_2pi_hz: 1.521e9,
                detuning_cavity_2pi_hz: 0.0,
            },
            cavity: CavitySection {
                kappa_2pi_hz: 36.7e3,
                cooperativity: 21.0,
                gamma_2pi_hz: c.gamma_2pi_hz,
                chiral_split_2pi_hz: 8.417e6,
            },
            thermal: vec![
                ThermalSection {
                    label: MotionLabel::Radial,
                    trap_2pi_hz: 89.0e3,
                    n_phonon: 0.17,
                    lamb_dicke: None,
                },
                ThermalSection {
                    label: MotionLabel::Axial,
                    trap_2pi_hz: 20.0e3,
                    n_phonon: 3.4,
                    lamb_dicke: None,
                },
            ],
            zeeman: ZeemanSection {
                f: 4,
                populations: vec![(4, 1.0)],
            },
        }
    }
}

impl Scenario {
    pub fn atom_array(&self) -> Result<AtomArray> {
        if self.array.offsets_nm.is_empty() {
            AtomArray::new(self.array.n_atoms, self.array.spacing_nm)
        } else {
            AtomArray::with_offsets(
                self.array.n_atoms,
                self.array.spacing_nm,
                self.array.offsets_nm.clone(),
            )
        }
    }

    pub fn probe_geometry(&self) -> Result<ProbeGeometry> {
        ProbeGeometry::new(self.probe.wavelength_nm, self.probe.angle_deg)
    }

    pub fn cavity_params(&self) -> Result<CavityParams> {
        CavityParams::new(
            TWO_PI * self.cavity.kappa_2pi_hz,
            self.cavity.cooperativity,
            TWO_PI * self.cavity.gamma_2pi_hz,
            TWO_PI * self.cavity.chiral_split_2pi_hz,
        )
    }

    pub fn drive_params(&self) -> DriveParams {
        DriveParams::new(
            TWO_PI * self.probe.rabi_2pi_hz,
            TWO_PI * self.probe.detuning_atom_2pi_hz,
            TWO_PI * self.probe.detuning_cavity_2pi_hz,
        )
    }

    pub fn thermal_modes(&self) -> Result<Vec<ThermalMode>> {
        self.thermal
            .iter()
            .map(|t| match t.lamb_dicke {
                Some(eta) => ThermalMode::new(TWO_PI * t.trap_2pi_hz, t.n_phonon, eta, t.label),
                None => ThermalMode::with_default_lamb_dicke(
                    TWO_PI * t.trap_2pi_hz,
                    t.n_phonon,
                    t.label,
                ),
            })
            .collect()
    }

    /// The mode carrying a given label, if present.
    pub fn thermal_mode(&self, label: MotionLabel) -> Result<Option<ThermalMode>> {
        Ok(self
            .thermal_modes()?
            .into_iter()
            .find(|m| m.label() == label))
    }

    pub fn zeeman_distribution(&self) -> Result<ZeemanDistribution> {
        ZeemanDistribution::from_pairs(self.zeeman.f, &self.zeeman.populations)
    }

    /// Normalized text form; parsing it reproduces this scenario exactly.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "[array]");
        let _ = writeln!(out, "n_atoms = {}", self.array.n_atoms);
        let _ = writeln!(out, "spacing_nm = {}", self.array.spacing_nm);
        for o in &self.array.offsets_nm {
            let _ = writeln!(out, "offsets_nm = {o}");
        }
        let _ = writeln!(out, "\n[probe]");
        let _ = writeln!(out, "wavelength_nm = {}", self.probe.wavelength_nm);
        let _ = writeln!(out, "angle_deg = {}", self.probe.angle_deg);
        let _ = writeln!(out, "rabi_2pi_hz = {}", self.probe.rabi_2pi_hz);
        let _ = writeln!(out, "detuning_atom_2pi_hz = {}", self.probe.detuning_atom_2pi_hz);
        let _ = writeln!(out, "detuning_cavity_2pi_hz = {}", self.probe.detuning_cavity_2pi_hz);
        let _ = writeln!(out, "\n[cavity]");
        let _ = writeln!(out, "kappa_2pi_hz = {}", self.cavity.kappa_2pi_hz);
        let _ = writeln!(out, "cooperativity = {}", self.cavity.cooperativity);
        let _ = writeln!(out, "gamma_2pi_hz = {}", self.cavity.gamma_2pi_hz);
        let _ = writeln!(out, "chiral_split_2pi_hz = {}", self.cavity.chiral_split_2pi_hz);
        for t in &self.thermal {
            let _ = writeln!(out, "\n[thermal]");
            let _ = writeln!(out, "label = {}", t.label);
            let _ = writeln!(out, "trap_2pi_hz = {}", t.trap_2pi_hz);
            let _ = writeln!(out, "n_phonon = {}", t.n_phonon);
            if let Some(eta) = t.lamb_dicke {
                let _ = writeln!(out, "lamb_dicke = {eta}");
            }
        }
        let _ = writeln!(out, "\n[zeeman]");
        let _ = writeln!(out, "f = {}", self.zeeman.f);
        for (m, c) in &self.zeeman.populations {
            let _ = writeln!(out, "population = {m} {c}");
        }
        out
    }
}

const SECTIONS: [&str; 5] = ["array", "probe", "cavity", "thermal", "zeeman"];

fn known_keys(section: &str) -> &'static [&'static str] {
    match section {
        "array" => &["n_atoms", "spacing_nm", "offsets_nm"],
        "probe" => &[
            "wavelength_nm",
            "angle_deg",
            "rabi_2pi_hz",
            "detuning_atom_2pi_hz",
            "detuning_cavity_2pi_hz",
        ],
        "cavity" => &[
            "kappa_2pi_hz",
            "cooperativity",
            "gamma_2pi_hz",
            "chiral_split_2pi_hz",
        ],
        "thermal" => &["label", "trap_2pi_hz", "n_phonon", "lamb_dicke"],
        "zeeman" => &["f", "population"],
        _ => &[],
    }
}

/// Unit-bearing keys: `(base, full name)`. A key matching a base with a
/// different suffix is a unit mismatch, not merely unknown.
fn unit_bases(section: &str) -> &'static [(&'static str, &'static str)] {
    match section {
        "array" => &[("spacing", "spacing_nm"), ("offsets", "offsets_nm")],
        "probe" => &[
            ("wavelength", "wavelength_nm"),
            ("angle", "angle_deg"),
            ("rabi", "rabi_2pi_hz"),
            ("detuning_atom", "detuning_atom_2pi_hz"),
            ("detuning_cavity", "detuning_cavity_2pi_hz"),
        ],
        "cavity" => &[
            ("kappa", "kappa_2pi_hz"),
            ("gamma", "gamma_2pi_hz"),
            ("chiral_split", "chiral_split_2pi_hz"),
        ],
        "thermal" => &[("trap", "trap_2pi_hz")],
        _ => &[],
    }
}

#[derive(Default)]
struct RawSection {
    entries: Vec<(usize, String, String)>, // line, key, value
}

/// Parse and validate a scenario. Missing sections and keys take the
/// defaults of [`Scenario::default`]; unknown keys, duplicates, unit-suffix
/// mismatches, and invariant violations are distinct errors.
pub fn parse_scenario(text: &str, source_name: &str) -> std::result::Result<Scenario, ScenarioError> {
    let src = || source_name.to_string();

    // split into raw sections
    let mut sections: Vec<(String, usize, RawSection)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| ScenarioError::Syntax {
                source_name: src(),
                line: line_no,
                text: line.to_string(),
            })?;
            let name = name.trim().to_string();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(ScenarioError::UnknownSection {
                    source_name: src(),
                    line: line_no,
                    section: name,
                });
            }
            sections.push((name, line_no, RawSection::default()));
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ScenarioError::Syntax {
            source_name: src(),
            line: line_no,
            text: line.to_string(),
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        match sections.last_mut() {
            Some((section, _, raw)) => {
                let known = known_keys(section);
                if !known.contains(&key.as_str()) {
                    // a known base with the wrong unit suffix gets its own error
                    for &(base, full) in unit_bases(section) {
                        if key != full && (key == base || key.starts_with(&format!("{base}_"))) {
                            return Err(ScenarioError::UnitSuffixMismatch {
                                source_name: src(),
                                line: line_no,
                                key,
                                expected: full.to_string(),
                            });
                        }
                    }
                    return Err(ScenarioError::UnknownKey {
                        source_name: src(),
                        line: line_no,
                        section: section.clone(),
                        key,
                    });
                }
                let repeatable = key == "offsets_nm" || key == "population";
                if !repeatable && raw.entries.iter().any(|(_, k, _)| *k == key) {
                    return Err(ScenarioError::DuplicateKey {
                        source_name: src(),
                        line: line_no,
                        section: section.clone(),
                        key,
                    });
                }
                raw.entries.push((line_no, key, value));
            }
            None => {
                return Err(ScenarioError::KeyOutsideSection {
                    source_name: src(),
                    line: line_no,
                    key,
                });
            }
        }
    }

    // repeated non-thermal sections are duplicates
    for name in SECTIONS {
        if name == "thermal" {
            continue;
        }
        let repeats: Vec<_> = sections.iter().filter(|(s, _, _)| s == name).collect();
        if repeats.len() > 1 {
            return Err(ScenarioError::DuplicateKey {
                source_name: src(),
                line: repeats[1].1,
                section: name.to_string(),
                key: format!("[{name}]"),
            });
        }
    }

    let mut scenario = Scenario::default();

    let parse_f64 = |line: usize, key: &str, value: &str| -> std::result::Result<f64, ScenarioError> {
        value.parse().map_err(|_| ScenarioError::BadValue {
            source_name: src(),
            line,
            key: key.to_string(),
            value: value.to_string(),
        })
    };
    let parse_usize = |line: usize, key: &str, value: &str| -> std::result::Result<usize, ScenarioError> {
        value.parse().map_err(|_| ScenarioError::BadValue {
            source_name: src(),
            line,
            key: key.to_string(),
            value: value.to_string(),
        })
    };

    let mut thermal_given = Vec::new();
    for (name, _line, raw) in &sections {
        match name.as_str() {
            "array" => {
                let mut offsets = Vec::new();
                for (line, key, value) in &raw.entries {
                    match key.as_str() {
                        "n_atoms" => scenario.array.n_atoms = parse_usize(*line, key, value)?,
                        "spacing_nm" => scenario.array.spacing_nm = parse_f64(*line, key, value)?,
                        "offsets_nm" => offsets.push(parse_f64(*line, key, value)?),
                        _ => unreachable!("validated above"),
                    }
                }
                if !offsets.is_empty() {
                    scenario.array.offsets_nm = offsets;
                }
            }
            "probe" => {
                for (line, key, value) in &raw.entries {
                    let v = parse_f64(*line, key, value)?;
                    match key.as_str() {
                        "wavelength_nm" => scenario.probe.wavelength_nm = v,
                        "angle_deg" => scenario.probe.angle_deg = v,
                        "rabi_2pi_hz" => scenario.probe.rabi_2pi_hz = v,
                        "detuning_atom_2pi_hz" => scenario.probe.detuning_atom_2pi_hz = v,
                        "detuning_cavity_2pi_hz" => scenario.probe.detuning_cavity_2pi_hz = v,
                        _ => unreachable!("validated above"),
                    }
                }
            }
            "cavity" => {
                for (line, key, value) in &raw.entries {
                    let v = parse_f64(*line, key, value)?;
                    match key.as_str() {
                        "kappa_2pi_hz" => scenario.cavity.kappa_2pi_hz = v,
                        "cooperativity" => scenario.cavity.cooperativity = v,
                        "gamma_2pi_hz" => scenario.cavity.gamma_2pi_hz = v,
                        "chiral_split_2pi_hz" => scenario.cavity.chiral_split_2pi_hz = v,
                        _ => unreachable!("validated above"),
                    }
                }
            }
            "thermal" => {
                let mut section = ThermalSection {
                    label: MotionLabel::Radial,
                    trap_2pi_hz: 0.0,
                    n_phonon: 0.0,
                    lamb_dicke: None,
                };
                for (line, key, value) in &raw.entries {
                    match key.as_str() {
                        "label" => {
                            section.label = match value.as_str() {
                                "radial" => MotionLabel::Radial,
                                "axial" => MotionLabel::Axial,
                                other => {
                                    return Err(ScenarioError::BadValue {
                                        source_name: src(),
                                        line: *line,
                                        key: key.clone(),
                                        value: other.to_string(),
                                    })
                                }
                            }
                        }
                        "trap_2pi_hz" => section.trap_2pi_hz = parse_f64(*line, key, value)?,
                        "n_phonon" => section.n_phonon = parse_f64(*line, key, value)?,
                        "lamb_dicke" => section.lamb_dicke = Some(parse_f64(*line, key, value)?),
                        _ => unreachable!("validated above"),
                    }
                }
                thermal_given.push(section);
            }
            "zeeman" => {
                let mut populations = Vec::new();
                for (line, key, value) in &raw.entries {
                    match key.as_str() {
                        "f" => {
                            scenario.zeeman.f = parse_usize(*line, key, value)? as u32;
                        }
                        "population" => {
                            let bad = || ScenarioError::BadValue {
                                source_name: src(),
                                line: *line,
                                key: key.clone(),
                                value: value.clone(),
                            };
                            let mut parts = value.split_whitespace();
                            let (m_tok, c_tok) = match (parts.next(), parts.next(), parts.next()) {
                                (Some(m), Some(c), None) => (m, c),
                                _ => return Err(bad()),
                            };
                            let m: i32 = m_tok.parse().map_err(|_| bad())?;
                            let c: f64 = c_tok.parse().map_err(|_| bad())?;
                            populations.push((m, c));
                        }
                        _ => unreachable!("validated above"),
                    }
                }
                if !populations.is_empty() {
                    scenario.zeeman.populations = populations;
                }
            }
            _ => unreachable!("validated above"),
        }
    }
    if !thermal_given.is_empty() {
        scenario.thermal = thermal_given;
    }

    validate(&scenario, source_name)?;
    Ok(scenario)
}

/// Re-run every module invariant against the resolved values, naming the
/// offending key.
fn validate(scenario: &Scenario, source_name: &str) -> std::result::Result<(), ScenarioError> {
    let named = |key: &str, message: String| ScenarioError::Invariant {
        source_name: source_name.to_string(),
        key: key.to_string(),
        message,
    };
    scenario
        .atom_array()
        .map_err(|e| named("array.spacing_nm/n_atoms/offsets_nm", e.to_string()))?;
    scenario
        .probe_geometry()
        .map_err(|e| named("probe.wavelength_nm/angle_deg", e.to_string()))?;
    scenario
        .cavity_params()
        .map_err(|e| named("cavity.kappa_2pi_hz/cooperativity/gamma_2pi_hz", e.to_string()))?;
    scenario
        .thermal_modes()
        .map_err(|e| named("thermal.trap_2pi_hz/n_phonon/lamb_dicke", e.to_string()))?;
    if scenario.thermal.len() > 2 {
        return Err(named(
            "thermal",
            format!("at most two vibrational modes are supported, got {}", scenario.thermal.len()),
        ));
    }
    scenario
        .zeeman_distribution()
        .map_err(|e| named("zeeman.population", e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let s = Scenario::default();
        assert!(s.atom_array().is_ok());
        assert!(s.cavity_params().is_ok());
        assert_eq!(s.thermal.len(), 2);
        assert!(s.zeeman_distribution().is_ok());
    }

    #[test]
    fn minimal_scenario_gets_defaults() {
        let s = parse_scenario("", "inline").unwrap();
        assert_eq!(s, Scenario::default());
    }

    #[test]
    fn parses_figure_one_conditions() {
        let text = "\
[array]
n_atoms = 3
spacing_nm = 13313.4

[probe]
wavelength_nm = 852.347
angle_deg = -5.07
";
        let s = parse_scenario(text, "inline").unwrap();
        assert_eq!(s.array.n_atoms, 3);
        assert_eq!(s.probe.angle_deg, -5.07);
        // untouched sections keep defaults
        assert_eq!(s.cavity.cooperativity, 21.0);
    }

    #[test]
    fn echo_round_trip_idempotent() {
        let text = "\
[array]
n_atoms = 4
spacing_nm = 14000

[thermal]
label = axial
trap_2pi_hz = 2e4
n_phonon = 40
lamb_dicke = 0.17

[zeeman]
f = 4
population = 4 0.5
population = -4 0.5
";
        let s1 = parse_scenario(text, "inline").unwrap();
        let s2 = parse_scenario(&s1.echo(), "echo").unwrap();
        assert_eq!(s1, s2);
        assert_eq!(s1.echo(), s2.echo());
        assert_eq!(s1.thermal.len(), 1);
        assert_eq!(s1.thermal[0].lamb_dicke, Some(0.17));
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse_scenario("[array]\nn_atom = 2\n", "inline").unwrap_err();
        assert!(matches!(err, ScenarioError::UnknownKey { .. }), "{err}");
    }

    #[test]
    fn unit_suffix_mismatch_distinct() {
        let err = parse_scenario("[array]\nspacing_um = 2.0\n", "inline").unwrap_err();
        match err {
            ScenarioError::UnitSuffixMismatch { key, expected, .. } => {
                assert_eq!(key, "spacing_um");
                assert_eq!(expected, "spacing_nm");
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_scenario("[cavity]\nkappa_hz = 1.0\n", "inline").unwrap_err();
        assert!(matches!(err, ScenarioError::UnitSuffixMismatch { .. }));
    }

    #[test]
    fn duplicate_key_rejected() {
        let err = parse_scenario("[array]\nn_atoms = 2\nn_atoms = 3\n", "inline").unwrap_err();
        match err {
            ScenarioError::DuplicateKey { key, line, .. } => {
                assert_eq!(key, "n_atoms");
                assert_eq!(line, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_kappa_names_key() {
        let err = parse_scenario("[cavity]\nkappa_2pi_hz = -5.0\n", "inline").unwrap_err();
        match err {
            ScenarioError::Invariant { key, .. } => assert!(key.contains("kappa"), "{key}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_section_rejected() {
        let err = parse_scenario("[laser]\npower = 2\n", "inline").unwrap_err();
        assert!(matches!(err, ScenarioError::UnknownSection { .. }));
    }

    #[test]
    fn bad_population_value() {
        let err = parse_scenario("[zeeman]\npopulation = 4\n", "inline").unwrap_err();
        assert!(matches!(err, ScenarioError::BadValue { .. }));
    }

    #[test]
    fn conversions_produce_angular_frequencies() {
        let s = Scenario::default();
        let cav = s.cavity_params().unwrap();
        assert!((cav.kappa() - TWO_PI * 36.7e3).abs() < 1e-6);
        let drive = s.drive_params();
        assert!((drive.delta_a - TWO_PI * 1.521e9).abs() < 1.0);
    }
}
