//! Scenario files and the conversion from the human units used on the
//! command line (MHz, mW/mm², µW/mm², mm, µm, ms, µs, µT) to SI and rad/s.
//! Every unit conversion of the front end happens in this module.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use yb_faraday::angular::Polarization;
use yb_faraday::atomdata::IsotopeTable;
use yb_faraday::experiments::{BeamScenario, FortScenario, MotReleaseScenario, PumpTarget};
use yb_faraday::units::{mhz_to_rad, microtesla, mm, ms, mw_per_mm2, um, us, uw_per_mm2};
use yb_faraday::HalfInt;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpFile {
    pub mass: u32,
    pub level: HalfInt,
    pub polarization: Polarization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridFile {
    pub from_mhz: f64,
    pub to_mhz: f64,
    pub step_mhz: f64,
}

impl Default for GridFile {
    fn default() -> Self {
        GridFile {
            from_mhz: -1000.0,
            to_mhz: 2200.0,
            step_mhz: 2.0,
        }
    }
}

/// Inclusive grid from `from` to `to` with spacing `step`.
pub fn linear_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || !(to >= from) {
        return Err(CliError::Validation(format!(
            "grid needs step > 0 and to >= from (got from {from}, to {to}, step {step})"
        )));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    if n > 10_000_000 {
        return Err(CliError::Validation(format!(
            "grid of {n} points is too large"
        )));
    }
    Ok((0..=n).map(|i| from + step * i as f64).collect())
}

/// Atomic-beam scenario. Isotopes not listed in `columns` get
/// `spin_zero_scale`·abundance; the default scale puts them on the same
/// footing as the ¹⁷¹Yb column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeamFile {
    pub doppler_width_mhz: f64,
    pub probe_intensity_mw_per_mm2: f64,
    pub probe_waist_mm: f64,
    pub velocity_m_per_s: f64,
    pub columns: BTreeMap<u32, f64>,
    pub scale: Option<f64>,
    pub pump: Option<PumpFile>,
    pub zeeman_split_mhz: f64,
    pub probe_depolarization: bool,
    pub estimate_detuning_mhz: Option<f64>,
    pub grid: GridFile,
}

impl Default for BeamFile {
    fn default() -> Self {
        BeamFile {
            doppler_width_mhz: 57.0,
            probe_intensity_mw_per_mm2: 0.55,
            probe_waist_mm: 0.14,
            velocity_m_per_s: 300.0,
            columns: BTreeMap::from([(171, 0.18), (173, 0.21)]),
            scale: None,
            pump: Some(PumpFile {
                mass: 171,
                level: HalfInt::HALF,
                polarization: Polarization::SigmaPlus,
            }),
            zeeman_split_mhz: 0.0,
            probe_depolarization: false,
            estimate_detuning_mhz: None,
            grid: GridFile::default(),
        }
    }
}

impl BeamFile {
    pub fn to_scenario(&self, table: &IsotopeTable) -> Result<BeamScenario, CliError> {
        let scale = match (self.scale, self.columns.get(&171)) {
            (Some(s), _) => s,
            (None, Some(c)) => c / table.get(171)?.abundance,
            (None, None) => 1.0,
        };
        let mut scn = BeamScenario::natural(table, scale, mhz_to_rad(self.doppler_width_mhz));
        for (mass, col) in &self.columns {
            scn.set_column(*mass, *col)?;
        }
        scn.probe_intensity = mw_per_mm2(self.probe_intensity_mw_per_mm2);
        scn.probe_waist = mm(self.probe_waist_mm);
        scn.velocity = self.velocity_m_per_s;
        scn.estimate_detuning = self.estimate_detuning_mhz.map(mhz_to_rad);
        scn.pump = self.pump.as_ref().map(|p| PumpTarget {
            mass_number: p.mass,
            level: p.level,
            polarization: p.polarization,
        });
        scn.zeeman_split = mhz_to_rad(self.zeeman_split_mhz);
        scn.probe_depolarization = self.probe_depolarization;
        Ok(scn)
    }
}

/// Ballistic release from the MOT. The probe detuning is measured from the
/// ¹⁷¹Yb F′ = 3/2 line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MotFile {
    pub initial_od: f64,
    pub decay_time_ms: f64,
    pub probe_waist_mm: f64,
    pub probe_detuning_mhz: f64,
    pub probe_intensity_uw_per_mm2: f64,
}

impl Default for MotFile {
    fn default() -> Self {
        MotFile {
            initial_od: 0.05,
            decay_time_ms: 2.2,
            probe_waist_mm: 0.5,
            probe_detuning_mhz: 160.0,
            probe_intensity_uw_per_mm2: 0.3,
        }
    }
}

impl MotFile {
    pub fn to_scenario(&self) -> MotReleaseScenario {
        MotReleaseScenario {
            initial_od: self.initial_od,
            decay_time: ms(self.decay_time_ms),
            probe_waist: mm(self.probe_waist_mm),
            probe_detuning: mhz_to_rad(self.probe_detuning_mhz),
            probe_intensity: uw_per_mm2(self.probe_intensity_uw_per_mm2),
        }
    }
}

/// Optical dipole trap with Larmor precession. The probe detuning is
/// measured from the ¹⁷¹Yb F′ = 3/2 line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FortFile {
    pub atoms: f64,
    pub trap_length_mm: f64,
    pub probe_waist_um: f64,
    pub probe_detuning_mhz: f64,
    pub probe_intensity_mw_per_mm2: f64,
    pub field_ut: f64,
    pub gyromagnetic_hz_per_t: f64,
}

impl Default for FortFile {
    fn default() -> Self {
        FortFile {
            atoms: 8e6,
            trap_length_mm: 1.0,
            probe_waist_um: 30.0,
            probe_detuning_mhz: 1600.0,
            probe_intensity_mw_per_mm2: 0.70,
            field_ut: 350.0,
            gyromagnetic_hz_per_t: 7.50e6,
        }
    }
}

impl FortFile {
    pub fn to_scenario(&self) -> FortScenario {
        FortScenario {
            atoms: self.atoms,
            trap_length: mm(self.trap_length_mm),
            probe_waist: um(self.probe_waist_um),
            probe_detuning: mhz_to_rad(self.probe_detuning_mhz),
            probe_intensity: mw_per_mm2(self.probe_intensity_mw_per_mm2),
            field: microtesla(self.field_ut),
            gyromagnetic: self.gyromagnetic_hz_per_t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScenarioFile {
    Beam(BeamFile),
    Mot(MotFile),
    Fort(FortFile),
}

/// Parses a scenario document whose `kind` is one of beam, mot or fort.
pub fn parse_scenario(text: &str) -> Result<ScenarioFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Validation(format!("scenario file: {e}")))
}

/// Parses a beam scenario; a `kind` field, if present, must be "beam".
pub fn parse_beam(text: &str) -> Result<BeamFile, CliError> {
    let mut value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| CliError::Validation(format!("scenario file: {e}")))?;
    if let Some(obj) = value.as_object_mut() {
        match obj.remove("kind") {
            None => {}
            Some(serde_json::Value::String(k)) if k == "beam" => {}
            Some(other) => {
                return Err(CliError::Validation(format!(
                    "spectrum needs a beam scenario, found kind {other}"
                )))
            }
        }
    }
    serde_json::from_value(value).map_err(|e| CliError::Validation(format!("scenario file: {e}")))
}

pub fn pump_intensity(mw_per_mm2_value: f64) -> f64 {
    mw_per_mm2(mw_per_mm2_value)
}

pub fn microseconds(x: f64) -> f64 {
    us(x)
}

pub fn milliseconds(x: f64) -> f64 {
    ms(x)
}

pub fn field_from_ut(x: f64) -> f64 {
    microtesla(x)
}

pub fn mhz(x: f64) -> f64 {
    mhz_to_rad(x)
}
