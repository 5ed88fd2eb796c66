//! Physical constants of the Yb ¹S₀→¹P₁ line and the per-isotope table.
//!
//! Frequencies in [`IsotopeSpec`] are kept in MHz (cycles) relative to the
//! ¹⁷⁴Yb resonance; accessors return angular offsets in rad/s.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::units::mhz_to_rad;

/// Speed of light in vacuum (m/s).
pub const C: f64 = 299_792_458.0;
/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge (C).
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Fine-structure constant.
pub const ALPHA_F: f64 = 7.297_352_569_3e-3;
/// Atomic mass unit (kg).
pub const AMU: f64 = 1.660_539_066_60e-27;
/// Bohr magneton over Planck's constant (Hz/T). With g_J = 1 for ¹P₁ this is
/// the m_J′ = ±1 Zeeman shift per tesla, about 14.0 GHz/T.
pub const BOHR_MAGNETON_HZ_PER_T: f64 = 13.996_244_936e9;
/// Gyromagnetic ratio of the ¹⁷¹Yb ground state (Hz/T).
pub const GYROMAGNETIC_171_HZ_PER_T: f64 = 7.50e6;

const YB_LINE_THZ: f64 = 751.5;
const YB_LINEWIDTH_MHZ: f64 = 29.0;

/// Zeeman shift of the ¹P₁ m_J′ = ±1 sublevels for a field `b` (T), in rad/s.
pub fn zeeman_split_for_field(b: f64) -> f64 {
    2.0 * PI * BOHR_MAGNETON_HZ_PER_T * b
}

/// Constants of a closed two-level optical transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionConstants {
    /// Resonance angular frequency (rad/s).
    pub omega0: f64,
    /// Natural full linewidth (rad/s).
    pub gamma: f64,
    /// Resonant photon-absorption cross section (m²).
    pub sigma0: f64,
    /// Saturation intensity (W/m²).
    pub i_sat: f64,
}

impl TransitionConstants {
    /// Builds the constants of a line from its frequency and width; σ₀ and
    /// I_s follow from σ₀ = 6π(c/ω₀)² and I_s = ħω₀Γ/(2σ₀).
    pub fn from_line(omega0: f64, gamma: f64) -> Self {
        let sigma0 = 6.0 * PI * (C / omega0).powi(2);
        let i_sat = HBAR * omega0 * gamma / (2.0 * sigma0);
        TransitionConstants {
            omega0,
            gamma,
            sigma0,
            i_sat,
        }
    }

    /// Probe wavelength (m).
    pub fn wavelength(&self) -> f64 {
        2.0 * PI * C / self.omega0
    }
}

/// The Yb ¹S₀→¹P₁ constants: ω₀ = 2π×751.5 THz, Γ = 2π×29 MHz.
pub fn transition_constants() -> TransitionConstants {
    TransitionConstants::from_line(2.0 * PI * YB_LINE_THZ * 1e12, mhz_to_rad(YB_LINEWIDTH_MHZ))
}

/// Squared electric dipole moment e²σ₀Γ/(8π·α_f·ω₀) in C²·m².
pub fn electric_dipole_sq(constants: &TransitionConstants) -> f64 {
    E_CHARGE * E_CHARGE * constants.sigma0 * constants.gamma
        / (8.0 * PI * ALPHA_F * constants.omega0)
}

/// Refractive-index prefactor 2πα_f·c·μ_e²/e², which reduces to cσ₀Γ/(4ω₀).
/// Multiplying by a density (1/m³) and a dispersive function (s/rad) gives
/// the dimensionless index excess n − 1.
pub fn refractive_prefactor(constants: &TransitionConstants) -> f64 {
    C * constants.sigma0 * constants.gamma / (4.0 * constants.omega0)
}

/// One isotope of the table.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotopeSpec {
    pub mass_number: u32,
    pub abundance: f64,
    pub nuclear_spin: HalfInt,
    /// Reference position of the isotope's lines relative to ¹⁷⁴Yb (MHz).
    pub isotope_shift_mhz: f64,
    /// Offset of each excited hyperfine level F′ from the reference (MHz).
    pub hyperfine_offsets_mhz: BTreeMap<HalfInt, f64>,
}

impl IsotopeSpec {
    /// A spin-0 isotope with a single F′ = 1 line.
    pub fn spin_zero(mass_number: u32, abundance: f64, isotope_shift_mhz: f64) -> Self {
        IsotopeSpec {
            mass_number,
            abundance,
            nuclear_spin: HalfInt::ZERO,
            isotope_shift_mhz,
            hyperfine_offsets_mhz: BTreeMap::from([(HalfInt::ONE, 0.0)]),
        }
    }

    /// Allowed excited-state levels F′ = |1 − I| … 1 + I.
    pub fn allowed_levels(spin: HalfInt) -> Vec<HalfInt> {
        let lo = (HalfInt::ONE - spin).abs();
        let hi = HalfInt::ONE + spin;
        (lo.twice()..=hi.twice())
            .step_by(2)
            .map(HalfInt::from_twice)
            .collect()
    }

    /// Excited hyperfine levels present in this record, ascending.
    pub fn levels(&self) -> impl Iterator<Item = HalfInt> + '_ {
        self.hyperfine_offsets_mhz.keys().copied()
    }

    /// Highest level F′ = I + 1. Probe detunings in the experiments refer to it.
    pub fn top_level(&self) -> HalfInt {
        HalfInt::ONE + self.nuclear_spin
    }

    /// Line position of level F′ in MHz relative to ¹⁷⁴Yb.
    pub fn line_mhz(&self, level: HalfInt) -> Option<f64> {
        self.hyperfine_offsets_mhz
            .get(&level)
            .map(|off| self.isotope_shift_mhz + off)
    }

    /// Angular offset ω^(F′) − ω₀ of level F′ in rad/s.
    pub fn line_center(&self, level: HalfInt) -> Result<f64> {
        self.line_mhz(level).map(mhz_to_rad).ok_or_else(|| {
            Error::domain(format!(
                "isotope {} has no excited level F'={}",
                self.mass_number, level
            ))
        })
    }

    /// Same isotope with every hyperfine level moved onto the reference.
    pub fn with_degenerate_levels(&self) -> Self {
        let mut out = self.clone();
        for off in out.hyperfine_offsets_mhz.values_mut() {
            *off = 0.0;
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let name = format!("isotope {}", self.mass_number);
        if self.nuclear_spin.twice() < 0 {
            return Err(Error::validation(format!("{name}: negative nuclear spin")));
        }
        if !(0.0..=1.0).contains(&self.abundance) || !self.abundance.is_finite() {
            return Err(Error::validation(format!(
                "{name}: abundance {} outside [0, 1]",
                self.abundance
            )));
        }
        let expected = Self::allowed_levels(self.nuclear_spin);
        let present: Vec<HalfInt> = self.levels().collect();
        if present != expected {
            let fmt = |v: &[HalfInt]| {
                v.iter()
                    .map(|f| f.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            return Err(Error::validation(format!(
                "{name}: spin {} requires F' = {{{}}}, found {{{}}}",
                self.nuclear_spin,
                fmt(&expected),
                fmt(&present)
            )));
        }
        if !self.isotope_shift_mhz.is_finite()
            || self.hyperfine_offsets_mhz.values().any(|v| !v.is_finite())
        {
            return Err(Error::validation(format!("{name}: non-finite frequency")));
        }
        Ok(())
    }
}

/// The isotope records as they appear on disk.
#[derive(Debug, Serialize, Deserialize)]
struct IsotopeRecord {
    mass: u32,
    abundance: f64,
    spin: HalfInt,
    shift_mhz: f64,
    /// Keyed by 2F′ written as a string, e.g. `"3"` for F′ = 3/2.
    hyperfine_offsets_mhz: BTreeMap<String, f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TableFile<T> {
    isotope: Vec<T>,
}

/// Validated, immutable isotope table.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotopeTable {
    isotopes: Vec<IsotopeSpec>,
}

const BUNDLED_TABLE: &str = include_str!("../data/isotopes.toml");

/// Tolerance on the total abundance of the table.
pub const ABUNDANCE_SUM_TOLERANCE: f64 = 0.01;

impl IsotopeTable {
    /// The table shipped with the crate.
    pub fn bundled() -> Self {
        load_isotope_table(BUNDLED_TABLE).expect("bundled isotope table is valid")
    }

    pub fn new(isotopes: Vec<IsotopeSpec>) -> Result<Self> {
        for iso in &isotopes {
            iso.validate()?;
        }
        for (i, a) in isotopes.iter().enumerate() {
            if isotopes[..i].iter().any(|b| b.mass_number == a.mass_number) {
                return Err(Error::validation(format!(
                    "isotope {} listed twice",
                    a.mass_number
                )));
            }
        }
        let total: f64 = isotopes.iter().map(|i| i.abundance).sum();
        if (total - 1.0).abs() > ABUNDANCE_SUM_TOLERANCE {
            return Err(Error::validation(format!(
                "abundances sum to {total:.4}, expected 1 within {ABUNDANCE_SUM_TOLERANCE}"
            )));
        }
        Ok(IsotopeTable { isotopes })
    }

    pub fn get(&self, mass_number: u32) -> Result<&IsotopeSpec> {
        self.isotopes
            .iter()
            .find(|i| i.mass_number == mass_number)
            .ok_or_else(|| Error::domain(format!("no isotope with mass number {mass_number}")))
    }

    /// First isotope (in table order) with the given nuclear spin.
    pub fn by_spin(&self, spin: HalfInt) -> Option<&IsotopeSpec> {
        self.isotopes.iter().find(|i| i.nuclear_spin == spin)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, IsotopeSpec> {
        self.isotopes.iter()
    }

    pub fn len(&self) -> usize {
        self.isotopes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.isotopes.is_empty()
    }

    /// Serializes back to the on-disk format.
    pub fn to_toml_string(&self) -> String {
        let file = TableFile {
            isotope: self
                .isotopes
                .iter()
                .map(|i| IsotopeRecord {
                    mass: i.mass_number,
                    abundance: i.abundance,
                    spin: i.nuclear_spin,
                    shift_mhz: i.isotope_shift_mhz,
                    hyperfine_offsets_mhz: i
                        .hyperfine_offsets_mhz
                        .iter()
                        .map(|(f, v)| (f.twice().to_string(), *v))
                        .collect(),
                })
                .collect(),
        };
        toml::to_string(&file).expect("isotope table serializes")
    }
}

impl<'a> IntoIterator for &'a IsotopeTable {
    type Item = &'a IsotopeSpec;
    type IntoIter = std::slice::Iter<'a, IsotopeSpec>;
    fn into_iter(self) -> Self::IntoIter {
        self.isotopes.iter()
    }
}

/// Parses and validates an isotope table in TOML form.
pub fn load_isotope_table(source: &str) -> Result<IsotopeTable> {
    let raw: TableFile<toml::Value> = toml::from_str(source).map_err(|e| Error::Parse {
        record: "isotope table".into(),
        message: e.to_string(),
    })?;
    let mut isotopes = Vec::with_capacity(raw.isotope.len());
    for (idx, value) in raw.isotope.into_iter().enumerate() {
        let label = match value.get("mass").and_then(toml::Value::as_integer) {
            Some(m) => format!("isotope record #{} (mass {m})", idx + 1),
            None => format!("isotope record #{}", idx + 1),
        };
        let rec: IsotopeRecord = value
            .try_into()
            .map_err(|e: toml::de::Error| Error::Parse {
                record: label.clone(),
                message: e.message().to_string(),
            })?;
        let mut offsets = BTreeMap::new();
        for (key, v) in rec.hyperfine_offsets_mhz {
            let twice: i32 = key.trim().parse().map_err(|_| Error::Parse {
                record: label.clone(),
                message: format!("hyperfine key {key:?} is not an integer 2F'"),
            })?;
            offsets.insert(HalfInt::from_twice(twice), v);
        }
        isotopes.push(IsotopeSpec {
            mass_number: rec.mass,
            abundance: rec.abundance,
            nuclear_spin: rec.spin,
            isotope_shift_mhz: rec.shift_mhz,
            hyperfine_offsets_mhz: offsets,
        });
    }
    IsotopeTable::new(isotopes)
}

/// Constants plus isotope table; everything the experiment models consume.
#[derive(Debug, Clone, PartialEq)]
pub struct YbData {
    pub constants: TransitionConstants,
    pub isotopes: IsotopeTable,
}

impl YbData {
    pub fn bundled() -> Self {
        YbData {
            constants: transition_constants(),
            isotopes: IsotopeTable::bundled(),
        }
    }
}
