//! Subcommand implementations.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde_json::{json, Value};
use yb_faraday::angular::{pi_line_strengths, sigma_strength_table, Polarization};
use yb_faraday::atomdata::{refractive_prefactor, IsotopeSpec, YbData};
use yb_faraday::experiments::{
    beam_estimates, beam_spectra, fort_precession_trace, mot_release_trace,
    photon_pressure_estimates, probed_atom_number, FortScenario,
};
use yb_faraday::faraday::{
    rotation_general, rotation_spin_52_stretched, CoefficientSource, EnsembleGeometry,
    GroundPopulations, Spin52Discrepancy,
};
use yb_faraday::fitting::{
    fit_absorption_spectrum, fit_damped_sinusoid, fit_exponential, AbsorptionInitial,
    ExponentialInitial, FitResult, FrequencyMode, LmOptions,
};
use yb_faraday::io::{
    mot_table, precession_table, read_mot_trace, read_precession, read_spectrum, trajectory_table,
    Table, SPECTRUM_HEADER,
};
use yb_faraday::pumping::{simulate_pumping, PumpConfig};
use yb_faraday::units::{rad_to_mhz, to_mw_per_mm2};
use yb_faraday::HalfInt;

use crate::output::{write_json, write_meta, write_table};
use crate::scenario::{
    self, linear_grid, parse_beam, parse_scenario, FortFile, MotFile, ScenarioFile,
};
use crate::{CliError, FitKind};

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<fs::File, CliError> {
    fs::File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Adds N(0, σ²) to every element; σ = 0 leaves the series untouched.
fn add_noise(values: &mut [f64], sigma: f64, rng: &mut ChaCha8Rng) -> Result<(), CliError> {
    if sigma == 0.0 {
        return Ok(());
    }
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| CliError::Validation(format!("noise level {sigma}: {e}")))?;
    values.iter_mut().for_each(|v| *v += normal.sample(rng));
    Ok(())
}

pub fn constants() -> Result<(), CliError> {
    let data = YbData::bundled();
    let c = &data.constants;
    let mut out = std::io::stdout().lock();
    let mut line = |s: String| writeln!(out, "{s}").map_err(|e| CliError::Io(e.to_string()));
    line(format!("omega0 {:.6e} rad/s", c.omega0))?;
    line(format!("wavelength {:.4} nm", c.wavelength() * 1e9))?;
    line(format!(
        "gamma {:.6e} rad/s (2pi x {:.2} MHz)",
        c.gamma,
        rad_to_mhz(c.gamma)
    ))?;
    line(format!("sigma0 {:.3e} m^2", c.sigma0))?;
    line(format!(
        "i_sat {:.4e} W/m^2 ({:.4} mW/mm^2)",
        c.i_sat,
        to_mw_per_mm2(c.i_sat)
    ))?;
    line(format!(
        "refractive_prefactor {:.4e} m^3/s",
        refractive_prefactor(c)
    ))?;
    line(String::new())?;
    line("mass\tabundance\tspin\tshift_MHz\tlines_MHz".into())?;
    for iso in &data.isotopes {
        let lines: Vec<String> = iso
            .levels()
            .map(|f| format!("F'={f}:{}", iso.line_mhz(f).unwrap_or(f64::NAN)))
            .collect();
        line(format!(
            "{}\t{}\t{}\t{}\t{}",
            iso.mass_number,
            iso.abundance,
            iso.nuclear_spin,
            iso.isotope_shift_mhz,
            lines.join(" ")
        ))?;
    }
    Ok(())
}

pub fn strengths(spin: HalfInt, pol: Polarization) -> Result<(), CliError> {
    let table = sigma_strength_table(spin, pol)?;
    print!("{table}");
    let pi: Vec<String> = pi_line_strengths(spin)?
        .iter()
        .map(|(f, s)| format!("F'={f}: {s}"))
        .collect();
    println!("pi line factors: {}", pi.join(", "));
    if spin == HalfInt::from_twice(5) {
        let data = YbData::bundled();
        if let Some(iso) = data.isotopes.by_spin(spin) {
            println!();
            print!("{}", Spin52Discrepancy::new(&data.constants, iso)?);
        }
    }
    Ok(())
}

pub struct SpectrumArgs {
    pub scenario: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub noise_od: f64,
    pub noise_phi: f64,
    pub seed: u64,
}

pub fn spectrum(args: &SpectrumArgs) -> Result<(), CliError> {
    let file = match &args.scenario {
        Some(p) => parse_beam(&read_text(p)?)?,
        None => Default::default(),
    };
    let data = YbData::bundled();
    let scn = file.to_scenario(&data.isotopes)?;
    let grid_mhz = linear_grid(file.grid.from_mhz, file.grid.to_mhz, file.grid.step_mhz)?;
    let grid: Vec<f64> = grid_mhz.iter().copied().map(scenario::mhz).collect();
    let mut spectra = beam_spectra(&scn, &grid, &data.constants)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    add_noise(&mut spectra.od, args.noise_od, &mut rng)?;
    add_noise(&mut spectra.phi, args.noise_phi, &mut rng)?;
    let mut table = Table::new(&SPECTRUM_HEADER);
    for (i, d) in grid_mhz.iter().enumerate() {
        table.push(vec![*d, spectra.od[i], spectra.phi[i]])?;
    }
    write_table(&table, args.out.as_deref())?;
    write_meta(
        args.out.as_deref(),
        "spectrum",
        json!({
            "scenario": file,
            "noise_od": args.noise_od,
            "noise_phi_rad": args.noise_phi,
            "seed": args.seed,
            "detuning_reference": "174Yb resonance",
        }),
    )
}

pub struct RotationArgs {
    pub isotope: u32,
    pub p: f64,
    pub nsigma: f64,
    pub from: f64,
    pub to: f64,
    pub step: f64,
    pub width: Option<f64>,
    pub zeeman: f64,
    pub printed_coefficients: bool,
    pub out: Option<PathBuf>,
}

fn rotation_at(
    args: &RotationArgs,
    iso: &IsotopeSpec,
    data: &YbData,
    omega: f64,
    width: f64,
) -> Result<f64, CliError> {
    let c = &data.constants;
    if args.printed_coefficients {
        let per = rotation_spin_52_stretched(
            c,
            args.nsigma,
            omega,
            iso,
            width,
            CoefficientSource::Printed,
        )?;
        return Ok(args.p * per);
    }
    let pops = if iso.nuclear_spin.twice() == 0 {
        GroundPopulations::spin_zero(scenario::mhz(args.zeeman))
    } else {
        GroundPopulations::stretched_mixture(iso.nuclear_spin, args.p)?
    };
    let geom = EnsembleGeometry::from_column(args.nsigma, 0.0, 1.0)?;
    Ok(rotation_general(c, &pops, &geom, omega, iso, width)?)
}

pub fn rotation(args: &RotationArgs) -> Result<(), CliError> {
    let data = YbData::bundled();
    let iso = data.isotopes.get(args.isotope)?;
    if args.printed_coefficients && iso.nuclear_spin != HalfInt::from_twice(5) {
        return Err(CliError::Validation(
            "--printed-coefficients applies to the spin-5/2 isotope only".into(),
        ));
    }
    if !(-1.0..=1.0).contains(&args.p) {
        return Err(CliError::Validation(format!(
            "polarization {} outside [-1, 1]",
            args.p
        )));
    }
    let width = args
        .width
        .map(scenario::mhz)
        .unwrap_or(data.constants.gamma);
    let top = iso.line_center(iso.top_level())?;
    let mut table = Table::new(&["detuning_MHz", "phi_rad"]);
    for d in linear_grid(args.from, args.to, args.step)? {
        let phi = rotation_at(args, iso, &data, top + scenario::mhz(d), width)?;
        table.push(vec![d, phi])?;
    }
    write_table(&table, args.out.as_deref())?;
    write_meta(
        args.out.as_deref(),
        "rotation",
        json!({
            "isotope": args.isotope,
            "p": args.p,
            "nsigma0L": args.nsigma,
            "from_mhz": args.from,
            "to_mhz": args.to,
            "step_mhz": args.step,
            "width_mhz": rad_to_mhz(width),
            "zeeman_mhz": args.zeeman,
            "coefficients": if args.printed_coefficients { "printed" } else { "derived" },
            "detuning_reference": format!("{}Yb F'={}", iso.mass_number, iso.top_level()),
        }),
    )
}

pub struct PumpArgs {
    pub isotope: Option<u32>,
    pub spin: Option<HalfInt>,
    pub pol: Polarization,
    pub intensity: f64,
    pub detuning: f64,
    pub duration: f64,
    pub samples: usize,
    pub step_ns: Option<f64>,
    pub out: Option<PathBuf>,
}

pub fn pump(args: &PumpArgs) -> Result<(), CliError> {
    let data = YbData::bundled();
    let iso = match (args.isotope, args.spin) {
        (Some(m), None) => data.isotopes.get(m)?,
        (None, Some(s)) => data
            .isotopes
            .by_spin(s)
            .ok_or_else(|| CliError::Validation(format!("no bundled isotope has spin {s}")))?,
        (None, None) => data.isotopes.get(171)?,
        (Some(_), Some(_)) => {
            return Err(CliError::Validation(
                "give either --isotope or --spin".into(),
            ))
        }
    };
    let mut config = PumpConfig::new(
        args.pol,
        scenario::pump_intensity(args.intensity),
        scenario::mhz(args.detuning),
        scenario::microseconds(args.duration),
    );
    config.output_samples = args.samples;
    config.time_step = args.step_ns.map(|ns| ns * 1e-9);
    let initial = GroundPopulations::unpolarized(iso.nuclear_spin);
    let tr = simulate_pumping(&initial, &config, iso, &data.constants)?;
    write_table(&trajectory_table(&tr), args.out.as_deref())?;
    write_meta(
        args.out.as_deref(),
        "pump",
        json!({
            "isotope": iso.mass_number,
            "spin": iso.nuclear_spin,
            "polarization": args.pol,
            "intensity_mw_per_mm2": args.intensity,
            "detuning_mhz": args.detuning,
            "detuning_reference": format!("F'={}", iso.nuclear_spin),
            "duration_us": args.duration,
            "time_step_s": tr.time_step,
            "min_raw_fraction": tr.min_raw_fraction,
            "clamped_samples": tr.clamped_samples,
            "final_polarization": tr.polarization(tr.len() - 1),
        }),
    )
}

pub struct PrecessArgs {
    pub field_ut: f64,
    pub amplitude: Option<f64>,
    pub tau_ms: f64,
    pub phase: f64,
    pub duration_ms: f64,
    pub step_us: f64,
    pub noise: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

pub fn precess(args: &PrecessArgs) -> Result<(), CliError> {
    let data = YbData::bundled();
    let scn = FortScenario {
        field: scenario::field_from_ut(args.field_ut),
        ..FortFile::default().to_scenario()
    };
    let amplitude = match args.amplitude {
        Some(a) => a,
        None => scn.perfect_polarization_amplitude(&data)?,
    };
    let times: Vec<f64> = linear_grid(0.0, args.duration_ms, args.step_us * 1e-3)?
        .into_iter()
        .map(scenario::milliseconds)
        .collect();
    let mut phi = fort_precession_trace(
        &scn,
        amplitude,
        scenario::milliseconds(args.tau_ms),
        args.phase,
        &times,
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    add_noise(&mut phi, args.noise, &mut rng)?;
    write_table(&precession_table(&times, &phi)?, args.out.as_deref())?;
    write_meta(
        args.out.as_deref(),
        "precess",
        json!({
            "field_ut": args.field_ut,
            "larmor_rad_per_s": scn.larmor(),
            "amplitude_rad": amplitude,
            "decay_ms": args.tau_ms,
            "phase_rad": args.phase,
            "duration_ms": args.duration_ms,
            "step_us": args.step_us,
            "noise_rad": args.noise,
            "seed": args.seed,
        }),
    )
}

pub struct ReleaseArgs {
    pub scenario: MotFile,
    pub duration_ms: f64,
    pub step_ms: f64,
    pub noise: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

pub fn release(args: &ReleaseArgs) -> Result<(), CliError> {
    let data = YbData::bundled();
    let scn = args.scenario.to_scenario();
    let times: Vec<f64> = linear_grid(0.0, args.duration_ms, args.step_ms)?
        .into_iter()
        .map(scenario::milliseconds)
        .collect();
    let mut tr = mot_release_trace(&scn, &times, &data)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    add_noise(&mut tr.od, args.noise * scn.initial_od, &mut rng)?;
    let peak_phi = tr.phi.first().copied().unwrap_or(0.0).abs();
    add_noise(&mut tr.phi, args.noise * peak_phi, &mut rng)?;
    write_table(&mot_table(&tr), args.out.as_deref())?;
    write_meta(
        args.out.as_deref(),
        "release",
        json!({
            "scenario": args.scenario,
            "duration_ms": args.duration_ms,
            "step_ms": args.step_ms,
            "relative_noise": args.noise,
            "seed": args.seed,
            "expansion_velocity_m_per_s": tr.expansion_velocity,
        }),
    )
}

fn scenario_estimates(file: &ScenarioFile, data: &YbData) -> Result<Value, CliError> {
    let c = &data.constants;
    Ok(match file {
        ScenarioFile::Beam(b) => {
            let e = beam_estimates(&b.to_scenario(&data.isotopes)?, c)?;
            json!({
                "kind": "beam",
                "transit_time_s": e.transit_time,
                "scattering_rate_per_s": e.scattering_rate,
                "scattering_count": e.scattering_count,
            })
        }
        ScenarioFile::Mot(m) => {
            let scn = m.to_scenario();
            let nsigma = mot_release_trace(&scn, &[0.0], data)?.nsigma[0];
            json!({
                "kind": "mot",
                "nsigma0L": nsigma,
                "probed_atoms_2s": probed_atom_number(nsigma, scn.probe_waist, c.sigma0)?,
                "expansion_velocity_m_per_s": scn.probe_waist / scn.decay_time,
            })
        }
        ScenarioFile::Fort(f) => {
            let scn = f.to_scenario();
            let pp = photon_pressure_estimates(&scn, c)?;
            json!({
                "kind": "fort",
                "larmor_rad_per_s": scn.larmor(),
                "larmor_hz": scn.larmor() / (2.0 * std::f64::consts::PI),
                "nsigma0L": scn.column(c.sigma0)?,
                "perfect_polarization_amplitude_rad": scn.perfect_polarization_amplitude(data)?,
                "scattering_rate_per_s": pp.rate,
                "acceleration_m_per_s2": pp.acceleration,
                "hold_time_s": pp.hold_time,
            })
        }
    })
}

pub fn estimates(scenario: Option<&Path>, out: Option<&Path>) -> Result<(), CliError> {
    let data = YbData::bundled();
    let files = match scenario {
        Some(p) => vec![parse_scenario(&read_text(p)?)?],
        None => vec![
            ScenarioFile::Beam(Default::default()),
            ScenarioFile::Mot(Default::default()),
            ScenarioFile::Fort(Default::default()),
        ],
    };
    let results = files
        .iter()
        .map(|f| scenario_estimates(f, &data))
        .collect::<Result<Vec<_>, _>>()?;
    match out {
        Some(path) => {
            write_json(&results, Some(path))?;
            write_meta(Some(path), "estimates", json!({ "scenarios": files }))
        }
        None => {
            for r in &results {
                println!("[{}]", r["kind"].as_str().unwrap_or_default());
                for (k, v) in r
                    .as_object()
                    .into_iter()
                    .flatten()
                    .filter(|(k, _)| *k != "kind")
                {
                    match v {
                        Value::Number(n) => println!("{k} {:.4e}", n.as_f64().unwrap_or(f64::NAN)),
                        other => println!("{k} {}", other.as_str().unwrap_or_default()),
                    }
                }
                println!();
            }
            Ok(())
        }
    }
}

pub struct FitArgs {
    pub kind: FitKind,
    pub data: PathBuf,
    pub out: Option<PathBuf>,
    pub max_iterations: usize,
}

fn split_columns(rows: &[[f64; 3]], column: usize) -> Vec<(f64, f64)> {
    rows.iter().map(|r| (r[0], r[column])).collect()
}

/// Returns `Ok(false)` when the optimizer stopped without converging.
pub fn fit(args: &FitArgs) -> Result<bool, CliError> {
    let options = LmOptions {
        max_iterations: args.max_iterations,
        ..LmOptions::default()
    };
    let (value, result, params): (Value, FitResult, Value) = match &args.kind {
        FitKind::Absorption {
            width_mhz,
            scale,
            offset_mhz,
            free,
        } => {
            let s = read_spectrum(open(&args.data)?)?;
            let data: Vec<(f64, f64)> = s.omega.iter().copied().zip(s.od.iter().copied()).collect();
            let init = AbsorptionInitial {
                doppler_width: scenario::mhz(*width_mhz),
                scale: *scale,
                offset: scenario::mhz(*offset_mhz),
            };
            let table = YbData::bundled().isotopes;
            let fit = fit_absorption_spectrum(&data, &table, &init, free, &options)?;
            let summary = json!({
                "model": "absorption",
                "doppler_width_mhz": rad_to_mhz(fit.doppler_width),
                "scale": fit.scale,
                "offset_mhz": rad_to_mhz(fit.offset),
                "columns": fit.columns,
            });
            (
                summary,
                fit.result,
                json!({ "initial_width_mhz": width_mhz, "initial_scale": scale,
                        "initial_offset_mhz": offset_mhz, "free_columns": free }),
            )
        }
        FitKind::Exp {
            column,
            amplitude,
            tau_ms,
        } => {
            let rows = read_mot_trace(open(&args.data)?)?;
            let col = match column.as_str() {
                "od" => 1,
                "phi_rad" => 2,
                other => {
                    return Err(CliError::Validation(format!(
                        "unknown column {other}; use od or phi_rad"
                    )))
                }
            };
            let data = split_columns(&rows, col);
            let (t0, y0) = data
                .iter()
                .copied()
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .ok_or_else(|| CliError::Validation("data file has no rows".into()))?;
            let t1 = data.iter().map(|d| d.0).fold(t0, f64::max);
            let init = ExponentialInitial {
                amplitude: amplitude.unwrap_or(y0),
                decay_time: tau_ms
                    .map(scenario::milliseconds)
                    .unwrap_or((t1 - t0) / 3.0),
            };
            let fit = fit_exponential(&data, &init, &options)?;
            let summary = json!({
                "model": "exponential",
                "amplitude": fit.amplitude,
                "decay_time_s": fit.decay_time,
                "decay_at_bound": fit.decay_at_bound,
            });
            (
                summary,
                fit.result,
                json!({ "column": column, "initial": init }),
            )
        }
        FitKind::Sinusoid {
            fixed_b_ut,
            gyromagnetic,
        } => {
            let data = read_precession(open(&args.data)?)?;
            let mode = match fixed_b_ut {
                Some(b) => FrequencyMode::Fixed(yb_faraday::experiments::larmor_frequency(
                    scenario::field_from_ut(*b),
                    *gyromagnetic,
                )),
                None => FrequencyMode::Free,
            };
            let fit = fit_damped_sinusoid(&data, None, mode, &options)?;
            let summary = json!({
                "model": "damped_sinusoid",
                "amplitude_rad": fit.amplitude,
                "decay_time_s": fit.decay_time,
                "phase_rad": fit.phase,
                "frequency_rad_per_s": fit.frequency,
                "field_ut": fit.frequency / (2.0 * std::f64::consts::PI * gyromagnetic) * 1e6,
            });
            (
                summary,
                fit.result,
                json!({ "mode": mode, "gyromagnetic_hz_per_t": gyromagnetic }),
            )
        }
    };
    let converged = result.converged;
    let mut doc = value;
    doc["converged"] = json!(converged);
    doc["fit"] = serde_json::to_value(&result).map_err(|e| CliError::Io(e.to_string()))?;
    if let Some(se) = result.standard_errors() {
        doc["standard_errors"] = json!(se);
    }
    write_json(&doc, args.out.as_deref())?;
    write_meta(
        args.out.as_deref(),
        "fit",
        json!({ "data": args.data.display().to_string(), "options": options, "settings": params }),
    )?;
    Ok(converged)
}
