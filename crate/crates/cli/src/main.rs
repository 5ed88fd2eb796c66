//! `ybfaraday`: spectra, rotation curves, pumping trajectories, experiment
//! estimates and fits for Yb Faraday-rotation measurements.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid input or computation
//! error, 3 fit did not converge.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use yb_faraday::angular::Polarization;
use yb_faraday::HalfInt;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Io(String),
    Library(yb_faraday::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Library(e) => write!(f, "{e}"),
        }
    }
}

impl From<yb_faraday::Error> for CliError {
    fn from(e: yb_faraday::Error) -> Self {
        CliError::Library(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ybfaraday",
    version,
    about = "Faraday rotation in Yb atomic ensembles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the transition constants and the isotope table.
    Constants,
    /// Print the exact absorption strengths for one polarization.
    Strengths {
        /// Nuclear spin, e.g. 0, 1/2 or 5/2.
        #[arg(long)]
        spin: HalfInt,
        /// sigma+, sigma- or pi.
        #[arg(long, default_value = "sigma+")]
        pol: Polarization,
    },
    /// Absorption and rotation spectra of an atomic beam.
    Spectrum {
        /// JSON beam scenario; omitted fields take their default values.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Output CSV; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Standard deviation of additive noise on the optical depth.
        #[arg(long, default_value_t = 0.0)]
        noise_od: f64,
        /// Standard deviation of additive noise on the rotation (rad).
        #[arg(long, default_value_t = 0.0)]
        noise_phi: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Rotation of one isotope against detuning from its highest F' line.
    Rotation {
        /// Mass number.
        #[arg(long, default_value_t = 171)]
        isotope: u32,
        /// Ground-state polarization in [-1, 1]; ignored for spin-0 isotopes.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        p: f64,
        /// Column N·sigma0·L.
        #[arg(long, default_value_t = 1.0)]
        nsigma: f64,
        /// MHz.
        #[arg(long, default_value_t = -500.0, allow_negative_numbers = true)]
        from: f64,
        /// MHz.
        #[arg(long, default_value_t = 500.0, allow_negative_numbers = true)]
        to: f64,
        /// MHz.
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        /// Linewidth in MHz; the natural width if omitted.
        #[arg(long)]
        width: Option<f64>,
        /// Zeeman splitting of the spin-0 excited sublevels (MHz).
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        zeeman: f64,
        /// Use the printed spin-5/2 coefficients instead of the derived ones.
        #[arg(long)]
        printed_coefficients: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optical pumping of an unpolarized ground state on the F' = I line.
    Pump {
        /// Mass number; defaults to 171.
        #[arg(long, conflicts_with = "spin")]
        isotope: Option<u32>,
        /// Select the bundled isotope with this nuclear spin.
        #[arg(long)]
        spin: Option<HalfInt>,
        #[arg(long, default_value = "sigma+")]
        pol: Polarization,
        /// mW/mm².
        #[arg(long, default_value_t = 0.06)]
        intensity: f64,
        /// Detuning from the F' = I line (MHz).
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        detuning: f64,
        /// µs.
        #[arg(long, default_value_t = 10.0)]
        duration: f64,
        #[arg(long, default_value_t = 1001)]
        samples: usize,
        /// Fixed integrator step (ns).
        #[arg(long)]
        step_ns: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Larmor precession signal of a polarized trapped sample.
    Precess {
        /// Magnetic field (µT).
        #[arg(
            long = "B",
            visible_alias = "field",
            default_value_t = 350.0,
            allow_negative_numbers = true
        )]
        field: f64,
        /// Initial amplitude (rad); the perfect-polarization value if omitted.
        #[arg(long, allow_negative_numbers = true)]
        amplitude: Option<f64>,
        /// Decay time (ms).
        #[arg(long, default_value_t = 6.0)]
        tau: f64,
        /// Phase (rad).
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phase: f64,
        /// ms.
        #[arg(long, default_value_t = 3.0)]
        duration: f64,
        /// µs.
        #[arg(long, default_value_t = 10.0)]
        step: f64,
        /// Standard deviation of additive noise (rad).
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optical depth and rotation after release from the MOT.
    Release {
        #[arg(long, default_value_t = 0.05)]
        od: f64,
        /// Decay time (ms).
        #[arg(long, default_value_t = 2.2)]
        tau: f64,
        /// Probe waist (mm).
        #[arg(long, default_value_t = 0.5)]
        waist: f64,
        /// Probe detuning from the 171Yb F' = 3/2 line (MHz).
        #[arg(long, default_value_t = 160.0, allow_negative_numbers = true)]
        detuning: f64,
        /// Probe intensity (µW/mm²).
        #[arg(long, default_value_t = 0.3)]
        intensity: f64,
        /// ms.
        #[arg(long, default_value_t = 8.0)]
        duration: f64,
        /// ms.
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        /// Noise standard deviation relative to the initial values.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Order-of-magnitude estimates for a beam, MOT or FORT scenario.
    Estimates {
        /// JSON scenario with "kind": beam, mot or fort; all defaults if omitted.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Least-squares fits to data files written by the other subcommands.
    Fit {
        #[command(subcommand)]
        kind: FitKind,
        /// Input CSV.
        #[arg(long, global = true)]
        data: Option<PathBuf>,
        /// Output JSON; stdout if omitted.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
        /// Iteration limit of the optimizer.
        #[arg(long, global = true, default_value_t = 100)]
        max_iterations: usize,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum FitKind {
    /// Absorption spectrum (from `spectrum`).
    Absorption {
        /// Initial Doppler width (MHz).
        #[arg(long = "width", default_value_t = 40.0)]
        width_mhz: f64,
        /// Initial column per unit abundance.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Initial frequency offset (MHz).
        #[arg(long = "offset", default_value_t = 0.0, allow_negative_numbers = true)]
        offset_mhz: f64,
        /// Isotopes whose columns are fitted separately, e.g. 171,173.
        #[arg(long, value_delimiter = ',')]
        free: Vec<u32>,
    },
    /// Exponential decay (from `release`).
    Exp {
        /// Column to fit: od or phi_rad.
        #[arg(long, default_value = "od")]
        column: String,
        /// Initial amplitude; the earliest sample if omitted.
        #[arg(long, allow_negative_numbers = true)]
        amplitude: Option<f64>,
        /// Initial decay time (ms); a third of the record if omitted.
        #[arg(long = "tau")]
        tau_ms: Option<f64>,
    },
    /// Damped sinusoid (from `precess`).
    Sinusoid {
        /// Hold the precession frequency at the Larmor frequency of this field (µT).
        #[arg(long = "fixed-B", allow_negative_numbers = true)]
        fixed_b_ut: Option<f64>,
        /// Hz/T.
        #[arg(long, default_value_t = yb_faraday::atomdata::GYROMAGNETIC_171_HZ_PER_T)]
        gyromagnetic: f64,
    },
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Constants => commands::constants()?,
        Command::Strengths { spin, pol } => commands::strengths(spin, pol)?,
        Command::Spectrum {
            scenario,
            out,
            noise_od,
            noise_phi,
            seed,
        } => commands::spectrum(&commands::SpectrumArgs {
            scenario,
            out,
            noise_od,
            noise_phi,
            seed,
        })?,
        Command::Rotation {
            isotope,
            p,
            nsigma,
            from,
            to,
            step,
            width,
            zeeman,
            printed_coefficients,
            out,
        } => commands::rotation(&commands::RotationArgs {
            isotope,
            p,
            nsigma,
            from,
            to,
            step,
            width,
            zeeman,
            printed_coefficients,
            out,
        })?,
        Command::Pump {
            isotope,
            spin,
            pol,
            intensity,
            detuning,
            duration,
            samples,
            step_ns,
            out,
        } => commands::pump(&commands::PumpArgs {
            isotope,
            spin,
            pol,
            intensity,
            detuning,
            duration,
            samples,
            step_ns,
            out,
        })?,
        Command::Precess {
            field,
            amplitude,
            tau,
            phase,
            duration,
            step,
            noise,
            seed,
            out,
        } => commands::precess(&commands::PrecessArgs {
            field_ut: field,
            amplitude,
            tau_ms: tau,
            phase,
            duration_ms: duration,
            step_us: step,
            noise,
            seed,
            out,
        })?,
        Command::Release {
            od,
            tau,
            waist,
            detuning,
            intensity,
            duration,
            step,
            noise,
            seed,
            out,
        } => commands::release(&commands::ReleaseArgs {
            scenario: scenario::MotFile {
                initial_od: od,
                decay_time_ms: tau,
                probe_waist_mm: waist,
                probe_detuning_mhz: detuning,
                probe_intensity_uw_per_mm2: intensity,
            },
            duration_ms: duration,
            step_ms: step,
            noise,
            seed,
            out,
        })?,
        Command::Estimates { scenario, out } => {
            commands::estimates(scenario.as_deref(), out.as_deref())?
        }
        Command::Fit {
            kind,
            data,
            out,
            max_iterations,
        } => {
            let data = data.ok_or_else(|| CliError::Usage("fit needs --data".into()))?;
            if !commands::fit(&commands::FitArgs {
                kind,
                data,
                out,
                max_iterations,
            })? {
                eprintln!("fit did not converge");
                return Ok(3);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("ybfaraday: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
