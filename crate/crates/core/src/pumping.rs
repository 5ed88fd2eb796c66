//! Optical pumping and probe depolarization of the ground sublevels.
//!
//! Excited states are adiabatically eliminated: each ground sublevel m is
//! excited on a line F′ at rate r(I, Δ_F′)·strength_q(m, F′), and the excited
//! sublevel |F′, m + q⟩ decays back to the ground sublevels with the squared
//! Clebsch–Gordan branching ratios. The resulting linear system
//! dN/dt = A·N is integrated with fixed-step RK4.

use nalgebra::{DMatrix, DVector};

use crate::angular::{absorption_strength, decay_branching, to_f64, Polarization};
use crate::atomdata::{IsotopeSpec, TransitionConstants};
use crate::error::{Error, Result};
use crate::faraday::GroundPopulations;
use crate::halfint::HalfInt;
use crate::lineshape::scattering_rate;

/// Default number of steps per shortest excitation time 1/max(R_m).
pub const STEPS_PER_RATE_TIME: f64 = 100.0;

/// Largest negative excursion tolerated before clamping is reported.
pub const NEGATIVE_TOLERANCE: f64 = 1e-12;

/// Configuration of a pumping pulse on the F′ = I line.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpConfig {
    pub polarization: Polarization,
    /// W/m².
    pub intensity: f64,
    /// ω − ω^(F′=I) in rad/s.
    pub detuning_from_f_eq_i: f64,
    /// s.
    pub duration: f64,
    /// Fixed integrator step (s); `None` uses 0.01/max(R_m).
    pub time_step: Option<f64>,
    /// Number of evenly spaced output samples, endpoints included.
    pub output_samples: usize,
}

impl PumpConfig {
    pub fn new(polarization: Polarization, intensity: f64, detuning: f64, duration: f64) -> Self {
        PumpConfig {
            polarization,
            intensity,
            detuning_from_f_eq_i: detuning,
            duration,
            time_step: None,
            output_samples: 1001,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.polarization == Polarization::Pi {
            return Err(Error::domain("optical pumping needs circular polarization"));
        }
        if !(self.intensity >= 0.0) {
            return Err(Error::domain("pump intensity must be nonnegative"));
        }
        if !(self.duration >= 0.0) {
            return Err(Error::domain("pump duration must be nonnegative"));
        }
        if let Some(dt) = self.time_step {
            if !(dt > 0.0) {
                return Err(Error::domain(format!(
                    "time step must be positive, got {dt}"
                )));
            }
            if self.duration > 0.0 && dt > self.duration {
                return Err(Error::domain("time step exceeds the duration"));
            }
        }
        Ok(())
    }
}

/// One light field acting on the ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct Drive {
    pub polarization: Polarization,
    pub intensity: f64,
    /// (F′, ω − ω^(F′)) for every line the field addresses.
    pub lines: Vec<(HalfInt, f64)>,
}

/// Rate matrix `A[(to, from)]` over the ground sublevels (m ascending) and the
/// total excitation rate out of each sublevel.
#[derive(Debug, Clone)]
pub struct RateMatrix {
    pub spin: HalfInt,
    pub matrix: DMatrix<f64>,
    pub excitation: Vec<f64>,
}

impl RateMatrix {
    pub fn build(
        isotope: &IsotopeSpec,
        drives: &[Drive],
        constants: &TransitionConstants,
    ) -> Result<Self> {
        let spin = isotope.nuclear_spin;
        let n = spin.multiplicity();
        let ms: Vec<HalfInt> = spin.projections().collect();
        let index = |m: HalfInt| ((m.twice() + spin.twice()) / 2) as usize;
        let mut matrix = DMatrix::zeros(n, n);
        let mut excitation = vec![0.0; n];
        for drive in drives {
            let q = HalfInt::from_int(drive.polarization.q());
            for &(level, detuning) in &drive.lines {
                isotope.line_center(level)?;
                let r = scattering_rate(drive.intensity, detuning, constants)?;
                if r == 0.0 {
                    continue;
                }
                for &m in &ms {
                    let s = to_f64(&absorption_strength(spin, m, drive.polarization, level)?);
                    if s == 0.0 {
                        continue;
                    }
                    let rate = r * s;
                    let from = index(m);
                    excitation[from] += rate;
                    matrix[(from, from)] -= rate;
                    for (m_g, b) in decay_branching(spin, level, m + q)? {
                        matrix[(index(m_g), from)] += rate * to_f64(&b);
                    }
                }
            }
        }
        Ok(RateMatrix {
            spin,
            matrix,
            excitation,
        })
    }

    pub fn max_rate(&self) -> f64 {
        self.excitation.iter().copied().fold(0.0, f64::max)
    }

    /// Stationary populations: A·x = 0 with Σx = 1, solved by replacing one
    /// balance equation with the normalization.
    pub fn steady_state(&self) -> Result<Vec<f64>> {
        let n = self.matrix.nrows();
        let mut a = self.matrix.clone();
        for j in 0..n {
            a[(n - 1, j)] = 1.0;
        }
        let mut b = DVector::zeros(n);
        b[n - 1] = 1.0;
        a.lu()
            .solve(&b)
            .map(|x| x.iter().copied().collect())
            .ok_or_else(|| Error::domain("rate matrix has no unique steady state"))
    }
}

/// Populations sampled along an integration.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub spin: HalfInt,
    pub times: Vec<f64>,
    /// One row per sample, m ascending.
    pub fractions: Vec<Vec<f64>>,
    /// Step actually used (s).
    pub time_step: f64,
    /// Most negative raw fraction produced by the integrator.
    pub min_raw_fraction: f64,
    /// Number of samples in which a negative fraction was clamped to zero.
    pub clamped_samples: usize,
}

impl Trajectory {
    pub fn final_populations(&self) -> GroundPopulations {
        GroundPopulations::from_integrated(
            self.spin,
            self.fractions.last().cloned().unwrap_or_default(),
        )
    }

    pub fn polarization(&self, sample: usize) -> f64 {
        GroundPopulations::from_integrated(self.spin, self.fractions[sample].clone()).polarization()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn rk4_step(a: &DMatrix<f64>, x: &DVector<f64>, dt: f64) -> DVector<f64> {
    let k1 = a * x;
    let k2 = a * (x + &k1 * (0.5 * dt));
    let k3 = a * (x + &k2 * (0.5 * dt));
    let k4 = a * (x + &k3 * dt);
    x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

/// Integrates dN/dt = A·N from `initial` over `duration`.
fn integrate(
    rates: &RateMatrix,
    initial: &GroundPopulations,
    duration: f64,
    time_step: Option<f64>,
    samples: usize,
) -> Trajectory {
    let spin = rates.spin;
    let nominal = match time_step {
        Some(dt) => dt,
        None if rates.max_rate() > 0.0 => 1.0 / (STEPS_PER_RATE_TIME * rates.max_rate()),
        None => duration.max(f64::MIN_POSITIVE),
    };
    let steps = if duration > 0.0 {
        (duration / nominal).ceil().max(1.0) as usize
    } else {
        0
    };
    let dt = if steps > 0 {
        duration / steps as f64
    } else {
        nominal
    };
    let samples = samples.max(2).min(steps + 1);
    // sample k is recorded at step round(k·steps/(samples−1))
    let sample_step = |k: usize| -> usize {
        if samples <= 1 {
            0
        } else {
            ((k as f64) * steps as f64 / (samples - 1) as f64).round() as usize
        }
    };

    let mut x = DVector::from_column_slice(initial.fractions());
    let mut times = Vec::with_capacity(samples);
    let mut fractions = Vec::with_capacity(samples);
    let mut min_raw: f64 = x.min();
    let mut clamped = 0;
    let mut next = 0;
    let mut record = |step: usize, x: &DVector<f64>, next: &mut usize| {
        while *next < samples && sample_step(*next) == step {
            let mut row: Vec<f64> = x.iter().copied().collect();
            if row.iter().any(|f| *f < 0.0) {
                clamped += 1;
                row.iter_mut().for_each(|f| *f = f.max(0.0));
            }
            times.push(step as f64 * dt);
            fractions.push(row);
            *next += 1;
        }
    };
    record(0, &x, &mut next);
    for step in 1..=steps {
        x = rk4_step(&rates.matrix, &x, dt);
        min_raw = min_raw.min(x.min());
        record(step, &x, &mut next);
    }
    Trajectory {
        spin,
        times,
        fractions,
        time_step: dt,
        min_raw_fraction: min_raw,
        clamped_samples: clamped,
    }
}

/// Detuning of each excited level given the probe offset from the F′ = I line.
fn lines_from_f_eq_i(isotope: &IsotopeSpec, detuning: f64) -> Result<Vec<(HalfInt, f64)>> {
    let reference = isotope.line_center(isotope.nuclear_spin)?;
    isotope
        .levels()
        .map(|f| Ok((f, detuning + reference - isotope.line_center(f)?)))
        .collect()
}

/// Rate matrix of a pump on the F′ = I line only.
pub fn pump_rate_matrix(
    config: &PumpConfig,
    isotope: &IsotopeSpec,
    constants: &TransitionConstants,
) -> Result<RateMatrix> {
    if isotope.nuclear_spin.twice() == 0 {
        return Err(Error::domain(
            "nothing to pump: spin-0 isotopes have a single ground sublevel",
        ));
    }
    config.validate()?;
    let drive = Drive {
        polarization: config.polarization,
        intensity: config.intensity,
        lines: vec![(isotope.nuclear_spin, config.detuning_from_f_eq_i)],
    };
    RateMatrix::build(isotope, &[drive], constants)
}

/// Integrates a pumping pulse and returns the sampled trajectory.
pub fn simulate_pumping(
    initial: &GroundPopulations,
    config: &PumpConfig,
    isotope: &IsotopeSpec,
    constants: &TransitionConstants,
) -> Result<Trajectory> {
    let rates = pump_rate_matrix(config, isotope, constants)?;
    if initial.nuclear_spin() != isotope.nuclear_spin {
        return Err(Error::domain(
            "initial populations do not match the isotope spin",
        ));
    }
    Ok(integrate(
        &rates,
        initial,
        config.duration,
        config.time_step,
        config.output_samples,
    ))
}

/// Steady state of a continuous pump.
pub fn pumped_steady_state(
    polarization: Polarization,
    isotope: &IsotopeSpec,
    constants: &TransitionConstants,
) -> Result<GroundPopulations> {
    let config = PumpConfig::new(polarization, constants.i_sat * 0.1, 0.0, 1.0);
    let x = pump_rate_matrix(&config, isotope, constants)?.steady_state()?;
    Ok(GroundPopulations::from_integrated(isotope.nuclear_spin, x))
}

/// Outcome of a probe exposure.
#[derive(Debug, Clone)]
pub struct Depolarization {
    pub populations: GroundPopulations,
    /// Two-level scattering count r·T at the stated detuning.
    pub scattering_count: f64,
    pub trajectory: Option<Trajectory>,
}

/// Rate matrix of a linearly polarized probe, modelled as incoherent σ₊ and
/// σ₋ components of half the intensity each, addressing every excited level.
/// `probe_detuning` is ω − ω^(F′=I).
pub fn probe_rate_matrix(
    probe_intensity: f64,
    probe_detuning: f64,
    isotope: &IsotopeSpec,
    constants: &TransitionConstants,
) -> Result<RateMatrix> {
    let lines = lines_from_f_eq_i(isotope, probe_detuning)?;
    let drives: Vec<Drive> = [Polarization::SigmaPlus, Polarization::SigmaMinus]
        .into_iter()
        .map(|polarization| Drive {
            polarization,
            intensity: 0.5 * probe_intensity,
            lines: lines.clone(),
        })
        .collect();
    RateMatrix::build(isotope, &drives, constants)
}

/// Populations after `exposure` seconds of probe light.
pub fn probe_depolarization(
    initial: &GroundPopulations,
    probe_intensity: f64,
    probe_detuning: f64,
    exposure: f64,
    isotope: &IsotopeSpec,
    constants: &TransitionConstants,
) -> Result<Depolarization> {
    if !(exposure >= 0.0) {
        return Err(Error::domain("exposure must be nonnegative"));
    }
    if initial.nuclear_spin() != isotope.nuclear_spin {
        return Err(Error::domain(
            "initial populations do not match the isotope spin",
        ));
    }
    let scattering_count = scattering_rate(probe_intensity, probe_detuning, constants)? * exposure;
    if exposure == 0.0 || isotope.nuclear_spin.twice() == 0 {
        return Ok(Depolarization {
            populations: initial.clone(),
            scattering_count,
            trajectory: None,
        });
    }
    let rates = probe_rate_matrix(probe_intensity, probe_detuning, isotope, constants)?;
    let traj = integrate(&rates, initial, exposure, None, 2);
    Ok(Depolarization {
        populations: traj.final_populations(),
        scattering_count,
        trajectory: Some(traj),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomdata::{transition_constants, IsotopeTable};
    use crate::units::{mhz_to_rad, mw_per_mm2, us, uw_per_mm2};

    #[test]
    fn spin_zero_cannot_be_pumped() {
        let k = transition_constants();
        let t = IsotopeTable::bundled();
        let cfg = PumpConfig::new(Polarization::SigmaPlus, 1.0, 0.0, 1e-6);
        let err = simulate_pumping(
            &GroundPopulations::spin_zero(0.0),
            &cfg,
            t.get(174).unwrap(),
            &k,
        );
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn bad_time_step() {
        let k = transition_constants();
        let t = IsotopeTable::bundled();
        let y = t.get(171).unwrap();
        let mut cfg = PumpConfig::new(Polarization::SigmaPlus, 1.0, 0.0, 1e-6);
        cfg.time_step = Some(0.0);
        let start = GroundPopulations::unpolarized(HalfInt::HALF);
        assert!(simulate_pumping(&start, &cfg, y, &k).is_err());
        cfg.time_step = Some(-1e-9);
        assert!(simulate_pumping(&start, &cfg, y, &k).is_err());
    }

    #[test]
    fn spin_half_pumps_to_dark_state() {
        let k = transition_constants();
        let t = IsotopeTable::bundled();
        let y = t.get(171).unwrap();
        let cfg = PumpConfig::new(Polarization::SigmaPlus, 0.1 * k.i_sat, 0.0, 0.0);
        let r = pump_rate_matrix(&cfg, y, &k).unwrap().max_rate();
        let cfg = PumpConfig {
            duration: 200.0 / r,
            ..cfg
        };
        let traj =
            simulate_pumping(&GroundPopulations::unpolarized(HalfInt::HALF), &cfg, y, &k).unwrap();
        assert!(traj.final_populations().polarization() > 0.99);
        for row in &traj.fractions {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sigma_minus_pumps_the_other_way() {
        let k = transition_constants();
        let t = IsotopeTable::bundled();
        let y = t.get(173).unwrap();
        let ss = pumped_steady_state(Polarization::SigmaMinus, y, &k).unwrap();
        assert!((ss.fraction(HalfInt::from_twice(-5)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_exposure_is_identity() {
        let k = transition_constants();
        let t = IsotopeTable::bundled();
        let y = t.get(171).unwrap();
        let p = GroundPopulations::spin_half(0.7).unwrap();
        let d = probe_depolarization(&p, 100.0, 0.0, 0.0, y, &k).unwrap();
        assert_eq!(d.populations, p);
        assert_eq!(d.scattering_count, 0.0);
    }

    #[test]
    fn beam_probe_depolarizes() {
        let k = transition_constants();
        let t = IsotopeTable::bundled();
        let y = t.get(171).unwrap();
        let d = probe_depolarization(
            &GroundPopulations::spin_half(1.0).unwrap(),
            mw_per_mm2(0.55),
            0.5 * mhz_to_rad(57.0),
            us(0.9),
            y,
            &k,
        )
        .unwrap();
        assert!(d.scattering_count > 5.0 && d.scattering_count < 100.0);
        assert!(d.populations.polarization().abs() < 0.5);
    }

    #[test]
    fn far_detuned_probe_barely_depolarizes() {
        let k = transition_constants();
        let t = IsotopeTable::bundled();
        let y = t.get(171).unwrap();
        let d = probe_depolarization(
            &GroundPopulations::spin_half(1.0).unwrap(),
            uw_per_mm2(0.3),
            mhz_to_rad(1600.0),
            5e-3,
            y,
            &k,
        )
        .unwrap();
        assert!(d.scattering_count < 0.05);
        assert!(1.0 - d.populations.polarization() < 0.01);
    }
}
