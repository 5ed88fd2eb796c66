//! The three sample preparations: thermal atomic beam, ballistic release
//! from a MOT, and a far-off-resonant trap with Larmor precession.
//!
//! Probe detunings in the MOT and FORT scenarios are ω − ω^(3/2) of ¹⁷¹Yb.

use std::f64::consts::PI;

use crate::angular::{pi_line_strengths, to_f64, Polarization};
use crate::atomdata::{IsotopeSpec, IsotopeTable, TransitionConstants, YbData, AMU, C, HBAR};
use crate::error::{Error, Result};
use crate::faraday::{rotation_general, rotation_spin_half, EnsembleGeometry, GroundPopulations};
use crate::halfint::HalfInt;
use crate::lineshape::{lorentzian_absorption, scattering_rate};
use crate::pumping::{probe_depolarization, pumped_steady_state};
use crate::units::{mhz_to_rad, mm, ms, mw_per_mm2, um, uw_per_mm2};

/// One isotope of the beam with its column N·σ₀·L.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamComponent {
    pub isotope: IsotopeSpec,
    pub column: f64,
}

/// Isotope-selective optical pumping of one beam component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PumpTarget {
    pub mass_number: u32,
    /// Pumped excited level; the pumping model drives F′ = I.
    pub level: HalfInt,
    pub polarization: Polarization,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamScenario {
    pub components: Vec<BeamComponent>,
    /// Γ* (rad/s).
    pub doppler_width: f64,
    /// W/m².
    pub probe_intensity: f64,
    /// m.
    pub probe_waist: f64,
    /// Mean longitudinal velocity (m/s).
    pub velocity: f64,
    /// Detuning used for the scattering estimate; `None` means Γ*/2.
    pub estimate_detuning: Option<f64>,
    pub pump: Option<PumpTarget>,
    /// Zeeman shift of the spin-0 excited sublevels (rad/s).
    pub zeeman_split: f64,
    /// Apply probe depolarization over the transit time to the pumped isotope.
    pub probe_depolarization: bool,
}

impl BeamScenario {
    /// Every isotope of `table` with column `scale`·abundance.
    pub fn natural(table: &IsotopeTable, scale: f64, doppler_width: f64) -> Self {
        BeamScenario {
            components: table
                .iter()
                .map(|iso| BeamComponent {
                    isotope: iso.clone(),
                    column: scale * iso.abundance,
                })
                .collect(),
            doppler_width,
            probe_intensity: mw_per_mm2(0.55),
            probe_waist: mm(0.14),
            velocity: 300.0,
            estimate_detuning: None,
            pump: None,
            zeeman_split: 0.0,
            probe_depolarization: false,
        }
    }

    /// Beam of the atomic-beam measurement: Γ* = 2π×57 MHz, columns 0.18
    /// (¹⁷¹Yb) and 0.21 (¹⁷³Yb), spin-0 isotopes on the ¹⁷¹Yb abundance scale,
    /// σ₊ pumping of ¹⁷¹Yb on F′ = 1/2.
    pub fn reference(table: &IsotopeTable) -> Result<Self> {
        let scale = 0.18 / table.get(171)?.abundance;
        let mut scn = Self::natural(table, scale, mhz_to_rad(57.0));
        scn.set_column(171, 0.18)?;
        scn.set_column(173, 0.21)?;
        scn.pump = Some(PumpTarget {
            mass_number: 171,
            level: HalfInt::HALF,
            polarization: Polarization::SigmaPlus,
        });
        Ok(scn)
    }

    pub fn set_column(&mut self, mass_number: u32, column: f64) -> Result<()> {
        let c = self
            .components
            .iter_mut()
            .find(|c| c.isotope.mass_number == mass_number)
            .ok_or_else(|| Error::domain(format!("isotope {mass_number} is not in the beam")))?;
        c.column = column;
        Ok(())
    }

    pub fn column(&self, mass_number: u32) -> Option<f64> {
        self.components
            .iter()
            .find(|c| c.isotope.mass_number == mass_number)
            .map(|c| c.column)
    }

    fn validate(&self) -> Result<()> {
        if self.components.iter().any(|c| !(c.column >= 0.0)) {
            return Err(Error::validation("beam columns must be nonnegative"));
        }
        if !(self.velocity > 0.0) {
            return Err(Error::validation("beam velocity must be positive"));
        }
        if !(self.doppler_width > 0.0) {
            return Err(Error::validation("linewidth must be positive"));
        }
        if let Some(p) = &self.pump {
            let iso = &self
                .components
                .iter()
                .find(|c| c.isotope.mass_number == p.mass_number)
                .ok_or_else(|| {
                    Error::validation(format!("pumped isotope {} not in beam", p.mass_number))
                })?
                .isotope;
            if iso.nuclear_spin.twice() == 0 {
                return Err(Error::validation("cannot pump a spin-0 isotope"));
            }
            if p.level != iso.nuclear_spin {
                return Err(Error::validation(format!(
                    "pumping is modelled on F'=I={}, not F'={}",
                    iso.nuclear_spin, p.level
                )));
            }
        }
        Ok(())
    }
}

/// One π-probe absorption line with its relative strength and center (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorptionLine {
    pub mass_number: u32,
    pub level: HalfInt,
    pub factor: f64,
    pub center: f64,
}

/// All π-probe lines of the given isotopes, grouped by isotope in input order.
pub fn absorption_lines<'a, I>(isotopes: I) -> Result<Vec<AbsorptionLine>>
where
    I: IntoIterator<Item = &'a IsotopeSpec>,
{
    let mut lines = Vec::new();
    for iso in isotopes {
        for (level, factor) in pi_line_strengths(iso.nuclear_spin)? {
            lines.push(AbsorptionLine {
                mass_number: iso.mass_number,
                level,
                factor: to_f64(&factor),
                center: iso.line_center(level)?,
            });
        }
    }
    Ok(lines)
}

/// π-probe optical depth Σ_i column_i·Σ_F′ strength(F′)·L(ω − offset; ω_i^(F′), width).
pub fn absorption_od(
    components: &[BeamComponent],
    omega: f64,
    width: f64,
    offset: f64,
) -> Result<f64> {
    let lines = absorption_lines(components.iter().map(|c| &c.isotope))?;
    let mut od = 0.0;
    for line in &lines {
        let column = components
            .iter()
            .find(|c| c.isotope.mass_number == line.mass_number)
            .map_or(0.0, |c| c.column);
        od += column * line.factor * lorentzian_absorption(line.center, omega - offset, width);
    }
    Ok(od)
}

/// Absorption and rotation across a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSpectra {
    /// Probe offsets from ω₀ (rad/s).
    pub omega: Vec<f64>,
    pub od: Vec<f64>,
    pub phi: Vec<f64>,
}

pub fn beam_spectra(
    scn: &BeamScenario,
    omega_grid: &[f64],
    constants: &TransitionConstants,
) -> Result<BeamSpectra> {
    if omega_grid.is_empty() {
        return Err(Error::domain("frequency grid is empty"));
    }
    scn.validate()?;
    let transit = 2.0 * scn.probe_waist / scn.velocity;
    let pumped: Option<(&BeamComponent, GroundPopulations)> = match &scn.pump {
        Some(target) => {
            let comp = scn
                .components
                .iter()
                .find(|c| c.isotope.mass_number == target.mass_number)
                .expect("validated");
            Some((
                comp,
                pumped_steady_state(target.polarization, &comp.isotope, constants)?,
            ))
        }
        None => None,
    };

    let lines = absorption_lines(scn.components.iter().map(|c| &c.isotope))?;
    let columns: Vec<f64> = lines
        .iter()
        .map(|l| scn.column(l.mass_number).unwrap_or(0.0))
        .collect();
    let mut od = Vec::with_capacity(omega_grid.len());
    let mut phi = Vec::with_capacity(omega_grid.len());
    for &omega in omega_grid {
        od.push(
            lines
                .iter()
                .zip(&columns)
                .map(|(l, c)| {
                    c * l.factor * lorentzian_absorption(l.center, omega, scn.doppler_width)
                })
                .sum(),
        );
        let mut rot = 0.0;
        if let Some((comp, pops)) = &pumped {
            let pops = if scn.probe_depolarization {
                let reference = comp.isotope.line_center(comp.isotope.nuclear_spin)?;
                probe_depolarization(
                    pops,
                    scn.probe_intensity,
                    omega - reference,
                    transit,
                    &comp.isotope,
                    constants,
                )?
                .populations
            } else {
                pops.clone()
            };
            let geom = EnsembleGeometry::from_column(comp.column, 0.0, scn.probe_waist)?;
            rot += rotation_general(
                constants,
                &pops,
                &geom,
                omega,
                &comp.isotope,
                scn.doppler_width,
            )?;
        }
        if scn.zeeman_split != 0.0 {
            let pops = GroundPopulations::spin_zero(scn.zeeman_split);
            for comp in scn
                .components
                .iter()
                .filter(|c| c.isotope.nuclear_spin.twice() == 0)
            {
                let geom = EnsembleGeometry::from_column(comp.column, 0.0, scn.probe_waist)?;
                rot += rotation_general(
                    constants,
                    &pops,
                    &geom,
                    omega,
                    &comp.isotope,
                    scn.doppler_width,
                )?;
            }
        }
        phi.push(rot);
    }
    Ok(BeamSpectra {
        omega: omega_grid.to_vec(),
        od,
        phi,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamEstimates {
    /// T = 2w/v (s).
    pub transit_time: f64,
    /// r at the estimate detuning (1/s).
    pub scattering_rate: f64,
    /// r·T.
    pub scattering_count: f64,
}

pub fn beam_estimates(
    scn: &BeamScenario,
    constants: &TransitionConstants,
) -> Result<BeamEstimates> {
    if !(scn.velocity > 0.0) {
        return Err(Error::domain("beam velocity must be positive"));
    }
    let transit_time = 2.0 * scn.probe_waist / scn.velocity;
    let detuning = scn.estimate_detuning.unwrap_or(0.5 * scn.doppler_width);
    let r = scattering_rate(scn.probe_intensity, detuning, constants)?;
    Ok(BeamEstimates {
        transit_time,
        scattering_rate: r,
        scattering_count: r * transit_time,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotReleaseScenario {
    /// Optical depth at release, probed at ω^(3/2).
    pub initial_od: f64,
    /// s.
    pub decay_time: f64,
    /// m.
    pub probe_waist: f64,
    /// ω − ω^(3/2) of the rotation probe (rad/s).
    pub probe_detuning: f64,
    /// W/m².
    pub probe_intensity: f64,
}

impl MotReleaseScenario {
    /// d = 0.05 (N·σ₀·L = 7.5×10⁻²), τ = 2.2 ms, w = 0.5 mm, probe at
    /// +2π×0.16 GHz with 0.3 µW/mm².
    pub fn reference() -> Self {
        MotReleaseScenario {
            initial_od: 0.05,
            decay_time: ms(2.2),
            probe_waist: mm(0.5),
            probe_detuning: mhz_to_rad(160.0),
            probe_intensity: uw_per_mm2(0.3),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.initial_od >= 0.0) {
            return Err(Error::validation(
                "initial optical depth must be nonnegative",
            ));
        }
        if !(self.decay_time > 0.0) {
            return Err(Error::validation("decay time must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotTrace {
    pub times: Vec<f64>,
    pub od: Vec<f64>,
    pub phi: Vec<f64>,
    pub nsigma: Vec<f64>,
    /// v = w/τ (m/s).
    pub expansion_velocity: f64,
}

/// Optical-depth line factor of ¹⁷¹Yb at ω^(3/2).
fn spin_half_top_factor() -> Result<f64> {
    Ok(to_f64(
        &pi_line_strengths(HalfInt::HALF)?[&HalfInt::from_twice(3)],
    ))
}

pub fn mot_release_trace(
    scn: &MotReleaseScenario,
    times: &[f64],
    data: &YbData,
) -> Result<MotTrace> {
    scn.validate()?;
    if times.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::domain("times must be nonnegative"));
    }
    let y171 = data.isotopes.get(171)?;
    let omega = y171.line_center(HalfInt::from_twice(3))? + scn.probe_detuning;
    let per_column =
        rotation_spin_half(&data.constants, 1.0, 1.0, omega, y171, data.constants.gamma)?;
    let factor = spin_half_top_factor()?;
    let od: Vec<f64> = times
        .iter()
        .map(|t| scn.initial_od * (-t / scn.decay_time).exp())
        .collect();
    let nsigma: Vec<f64> = od.iter().map(|d| d / factor).collect();
    let phi = nsigma.iter().map(|n| per_column * n).collect();
    Ok(MotTrace {
        times: times.to_vec(),
        od,
        phi,
        nsigma,
        expansion_velocity: scn.probe_waist / scn.decay_time,
    })
}

/// 2S = (N·σ₀·L/σ₀)·π·w².
pub fn probed_atom_number(nsigma: f64, waist: f64, sigma0: f64) -> Result<f64> {
    if !(nsigma >= 0.0) || !(waist > 0.0) || !(sigma0 > 0.0) {
        return Err(Error::domain(
            "column must be nonnegative and waist, σ₀ positive",
        ));
    }
    Ok(nsigma / sigma0 * PI * waist * waist)
}

/// Effective N·σ₀·L = 2S·σ₀/(π·w²) for an atom cloud narrower than the probe.
pub fn fort_column(atoms: f64, waist: f64, sigma0: f64) -> Result<f64> {
    if !(atoms >= 0.0) || !(waist > 0.0) || !(sigma0 > 0.0) {
        return Err(Error::domain(
            "atom number must be nonnegative and waist, σ₀ positive",
        ));
    }
    Ok(atoms * sigma0 / (PI * waist * waist))
}

/// ω_B = 2π·γ·B (rad/s).
pub fn larmor_frequency(field: f64, gyromagnetic: f64) -> f64 {
    2.0 * PI * gyromagnetic * field
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FortScenario {
    /// Probed spin count 2S.
    pub atoms: f64,
    /// m.
    pub trap_length: f64,
    /// m.
    pub probe_waist: f64,
    /// ω − ω^(3/2) (rad/s).
    pub probe_detuning: f64,
    /// W/m².
    pub probe_intensity: f64,
    /// T.
    pub field: f64,
    /// Hz/T.
    pub gyromagnetic: f64,
}

impl FortScenario {
    /// 2S = 8×10⁶, L = 1 mm, w = 30 µm, probe +2π×1.6 GHz at 0.70 mW/mm²,
    /// B = 3.5×10⁻⁴ T, γ = 7.50×10⁶ Hz/T.
    pub fn reference() -> Self {
        FortScenario {
            atoms: 8e6,
            trap_length: mm(1.0),
            probe_waist: um(30.0),
            probe_detuning: mhz_to_rad(1600.0),
            probe_intensity: mw_per_mm2(0.70),
            field: 3.5e-4,
            gyromagnetic: crate::atomdata::GYROMAGNETIC_171_HZ_PER_T,
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            self.atoms,
            self.trap_length,
            self.probe_waist,
            self.probe_intensity,
            self.gyromagnetic,
        ];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::validation(
                "FORT scenario quantities must be positive",
            ));
        }
        Ok(())
    }

    pub fn larmor(&self) -> f64 {
        larmor_frequency(self.field, self.gyromagnetic)
    }

    pub fn column(&self, sigma0: f64) -> Result<f64> {
        fort_column(self.atoms, self.probe_waist, sigma0)
    }

    /// Φ for perfect polarization: (φ/pNσ₀L at the probe detuning)·Nσ₀L.
    pub fn perfect_polarization_amplitude(&self, data: &YbData) -> Result<f64> {
        self.validate()?;
        let y171 = data.isotopes.get(171)?;
        let omega = y171.line_center(HalfInt::from_twice(3))? + self.probe_detuning;
        let per_column =
            rotation_spin_half(&data.constants, 1.0, 1.0, omega, y171, data.constants.gamma)?;
        Ok(per_column * self.column(data.constants.sigma0)?)
    }
}

/// φ(T) = Φ·exp(−T/τ)·sin(ω_B·T + θ).
pub fn fort_precession_trace(
    scn: &FortScenario,
    amplitude: f64,
    decay: f64,
    phase: f64,
    times: &[f64],
) -> Result<Vec<f64>> {
    if !(decay > 0.0) {
        return Err(Error::domain("decay time must be positive"));
    }
    let omega_b = scn.larmor();
    Ok(times
        .iter()
        .map(|t| amplitude * (-t / decay).exp() * (omega_b * t + phase).sin())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonPressure {
    /// Scattering rate (1/s).
    pub rate: f64,
    /// a = ħω·r/(M₁₇₁·c) (m/s²).
    pub acceleration: f64,
    /// √(2L/a) (s).
    pub hold_time: f64,
}

pub fn photon_pressure_estimates(
    scn: &FortScenario,
    constants: &TransitionConstants,
) -> Result<PhotonPressure> {
    scn.validate()?;
    let rate = scattering_rate(scn.probe_intensity, scn.probe_detuning, constants)?;
    let mass = 171.0 * AMU;
    let acceleration = HBAR * constants.omega0 * rate / (mass * C);
    Ok(PhotonPressure {
        rate,
        acceleration,
        hold_time: (2.0 * scn.trap_length / acceleration).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomdata::transition_constants;

    #[test]
    fn transit_time() {
        let t = IsotopeTable::bundled();
        let k = transition_constants();
        let scn = BeamScenario::reference(&t).unwrap();
        let e = beam_estimates(&scn, &k).unwrap();
        assert!((e.transit_time - 0.933e-6).abs() < 1e-9);
        assert!(e.scattering_count > 10.0 && e.scattering_count < 100.0);
        let fast = BeamScenario {
            velocity: 1e12,
            ..scn
        };
        assert!(beam_estimates(&fast, &k).unwrap().transit_time < 1e-15);
    }

    #[test]
    fn mot_numbers() {
        let data = YbData::bundled();
        let scn = MotReleaseScenario::reference();
        let tr = mot_release_trace(&scn, &[0.0, 1e-3, 5e-3], &data).unwrap();
        assert_eq!(tr.od[0], scn.initial_od);
        assert!((tr.nsigma[0] - 7.5e-2).abs() < 1e-15);
        assert!((tr.phi[0].abs() - 2.3e-3).abs() < 0.05 * 2.3e-3);
        assert!((tr.expansion_velocity - 0.227).abs() < 1e-3);
        for i in 0..3 {
            assert!((tr.phi[i] / tr.phi[0] - tr.od[i] / tr.od[0]).abs() < 1e-15);
        }
    }

    #[test]
    fn geometry_helpers() {
        let k = transition_constants();
        let n = probed_atom_number(7.5e-2, mm(0.5), k.sigma0).unwrap();
        assert!(n > 7.7e5 && n < 7.8e5);
        assert_eq!(probed_atom_number(0.0, mm(0.5), k.sigma0).unwrap(), 0.0);
        let n4 = probed_atom_number(7.5e-2, mm(2.0), k.sigma0).unwrap();
        assert!((n4 / n - 16.0).abs() < 1e-12);

        let c = fort_column(8e6, um(30.0), k.sigma0).unwrap();
        assert!((c - 215.0).abs() < 1.0);
        assert_eq!(fort_column(0.0, um(30.0), k.sigma0).unwrap(), 0.0);
        let back = probed_atom_number(c, um(30.0), k.sigma0).unwrap();
        assert!((back / 8e6 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn larmor() {
        let w = larmor_frequency(3.5e-4, 7.50e6);
        assert!((w / (2.0 * PI * 2.6e3) - 1.0).abs() < 0.02);
        assert_eq!(larmor_frequency(0.0, 7.5e6), 0.0);
        assert!((larmor_frequency(7e-4, 7.5e6) - 2.0 * w).abs() < 1e-9);
    }

    #[test]
    fn precession_trace() {
        let scn = FortScenario::reference();
        let tr = fort_precession_trace(&scn, 0.07, 6e-3, 0.4, &[0.0, 1e-4, 1e-3]).unwrap();
        assert!((tr[0] - 0.07 * 0.4f64.sin()).abs() < 1e-16);
        for (&t, v) in [0.0, 1e-4, 1e-3].iter().zip(&tr) {
            assert!(v.abs() <= 0.07 * (-t / 6e-3f64).exp() + 1e-16);
        }
        assert!(fort_precession_trace(&scn, 0.07, 0.0, 0.0, &[0.0]).is_err());
    }

    #[test]
    fn amplitude_for_column_200() {
        let data = YbData::bundled();
        let scn = FortScenario::reference();
        let per_col = scn.perfect_polarization_amplitude(&data).unwrap()
            / scn.column(data.constants.sigma0).unwrap();
        assert!((per_col * 200.0 - 7.6e-2).abs() < 0.03 * 7.6e-2);
    }

    #[test]
    fn photon_pressure() {
        let k = transition_constants();
        let p = photon_pressure_estimates(&FortScenario::reference(), &k).unwrap();
        assert!((p.rate / 8.7e3 - 1.0).abs() < 0.05);
        assert!((p.acceleration / 51.0 - 1.0).abs() < 0.05);
        assert!((p.hold_time / 6e-3 - 1.0).abs() < 0.1);
    }

    #[test]
    fn unpumped_beam_does_not_rotate() {
        let t = IsotopeTable::bundled();
        let k = transition_constants();
        let mut scn = BeamScenario::reference(&t).unwrap();
        scn.pump = None;
        let grid: Vec<f64> = (0..200)
            .map(|i| mhz_to_rad(-1000.0 + 15.0 * i as f64))
            .collect();
        let s = beam_spectra(&scn, &grid, &k).unwrap();
        assert!(s.phi.iter().all(|p| *p == 0.0));
        assert!(s.od.iter().all(|d| *d > 0.0));
        assert!(beam_spectra(&scn, &[], &k).is_err());
    }

    #[test]
    fn pumped_beam_matches_closed_form() {
        let t = IsotopeTable::bundled();
        let k = transition_constants();
        let scn = BeamScenario::reference(&t).unwrap();
        let y = t.get(171).unwrap();
        let grid: Vec<f64> = (0..100)
            .map(|i| mhz_to_rad(-500.0 + 30.0 * i as f64))
            .collect();
        let s = beam_spectra(&scn, &grid, &k).unwrap();
        for (w, p) in grid.iter().zip(&s.phi) {
            let c = rotation_spin_half(&k, 1.0, 0.18, *w, y, scn.doppler_width).unwrap();
            assert!((p - c).abs() <= 1e-9 * c.abs().max(1e-12));
        }
    }

    #[test]
    fn peak_heights_follow_line_factors() {
        let t = IsotopeTable::bundled();
        let scn = BeamScenario::natural(&t, 1.0, mhz_to_rad(0.01));
        let y171 = t.get(171).unwrap();
        let y173 = t.get(173).unwrap();
        let at = |iso: &IsotopeSpec, tf: i32| {
            absorption_od(
                &scn.components,
                iso.line_center(HalfInt::from_twice(tf)).unwrap(),
                scn.doppler_width,
                0.0,
            )
            .unwrap()
        };
        // 0.143·2/3 against 0.162·4/9
        let ratio = at(y171, 3) / at(y173, 7);
        assert!((ratio - (0.143 * 2.0 / 3.0) / (0.162 * 4.0 / 9.0)).abs() < 1e-6);
    }

    #[test]
    fn zeeman_split_rotates_spin_zero() {
        let t = IsotopeTable::bundled();
        let k = transition_constants();
        let mut scn = BeamScenario::reference(&t).unwrap();
        scn.pump = None;
        scn.zeeman_split = mhz_to_rad(1.0);
        let s = beam_spectra(&scn, &[mhz_to_rad(20.0)], &k).unwrap();
        assert!(s.phi[0] != 0.0);
    }

    #[test]
    fn pump_level_must_be_f_eq_i() {
        let t = IsotopeTable::bundled();
        let k = transition_constants();
        let mut scn = BeamScenario::reference(&t).unwrap();
        scn.pump = Some(PumpTarget {
            mass_number: 171,
            level: HalfInt::from_twice(3),
            polarization: Polarization::SigmaPlus,
        });
        assert!(beam_spectra(&scn, &[0.0], &k).is_err());
    }
}
