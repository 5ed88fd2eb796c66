//! Model adapters. Parameters are fitted in MHz and ms so that the
//! finite-difference steps and damping see numbers of order one; results
//! are converted back to SI.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::lm::{least_squares, Bounds, FitResult, LmOptions};
use crate::atomdata::IsotopeTable;
use crate::error::{Error, Result};
use crate::experiments::absorption_lines;
use crate::lineshape::lorentzian_absorption;
use crate::units::{mhz_to_rad, ms, rad_to_mhz};

/// Splits a series into abscissa and ordinate after sorting by (x, y), so
/// that fits do not depend on the order of the input rows.
fn split_series(data: &[(f64, f64)]) -> (Vec<f64>, Vec<f64>) {
    let mut sorted = data.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    sorted.into_iter().unzip()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionInitial {
    /// Γ* (rad/s).
    pub doppler_width: f64,
    /// Column per unit abundance.
    pub scale: f64,
    /// Frequency offset of the whole spectrum (rad/s).
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionFit {
    /// Parameters [Γ*, scale, offset, free columns…] in SI.
    pub result: FitResult,
    pub doppler_width: f64,
    pub scale: f64,
    pub offset: f64,
    /// Nσ₀L of every isotope: free columns as fitted, the rest scale·abundance.
    pub columns: BTreeMap<u32, f64>,
}

/// Fits the π-probe absorption model to (ω, OD) pairs, ω measured from ω₀.
///
/// Each isotope's column is `scale`·abundance unless its mass number is in
/// `free_columns`, in which case the column is an independent parameter
/// started at `scale`·abundance.
pub fn fit_absorption_spectrum(
    data: &[(f64, f64)],
    table: &IsotopeTable,
    initial: &AbsorptionInitial,
    free_columns: &[u32],
    options: &LmOptions,
) -> Result<AbsorptionFit> {
    let n_par = 3 + free_columns.len();
    if data.len() < 3 * n_par {
        return Err(Error::Precondition(format!(
            "{} points are fewer than 3 per free parameter ({n_par})",
            data.len()
        )));
    }
    for m in free_columns {
        table.get(*m)?;
    }
    if !(initial.doppler_width > 0.0) {
        return Err(Error::domain("initial linewidth must be positive"));
    }
    let (omega, od) = split_series(data);
    let omega_mhz: Vec<f64> = omega.iter().map(|w| rad_to_mhz(*w)).collect();
    let lines = absorption_lines(table.iter())?;
    let abundance: Vec<f64> = lines
        .iter()
        .map(|l| table.get(l.mass_number).map(|i| i.abundance))
        .collect::<Result<_>>()?;
    let slot: Vec<Option<usize>> = lines
        .iter()
        .map(|l| free_columns.iter().position(|m| *m == l.mass_number))
        .collect();
    let centers_mhz: Vec<f64> = lines.iter().map(|l| rad_to_mhz(l.center)).collect();

    let model = |p: &[f64]| -> Result<Vec<f64>> {
        let (width, scale, offset) = (p[0], p[1], p[2]);
        let weights: Vec<f64> = (0..lines.len())
            .map(|k| {
                let col = match slot[k] {
                    Some(j) => p[3 + j],
                    None => scale * abundance[k],
                };
                col * lines[k].factor
            })
            .collect();
        Ok(omega_mhz
            .iter()
            .map(|w| {
                (0..lines.len())
                    .map(|k| weights[k] * lorentzian_absorption(centers_mhz[k], w - offset, width))
                    .sum()
            })
            .collect())
    };

    let mut start = vec![
        rad_to_mhz(initial.doppler_width),
        initial.scale,
        rad_to_mhz(initial.offset),
    ];
    let mut lower = vec![1e-6, 0.0, f64::NEG_INFINITY];
    let mut upper = vec![f64::INFINITY; 3];
    for m in free_columns {
        start.push(initial.scale * table.get(*m)?.abundance);
        lower.push(0.0);
        upper.push(f64::INFINITY);
    }
    let bounds = Bounds::new(lower, upper)?;
    let fit = least_squares(&model, &start, &od, Some(&bounds), options)?;

    let mut factors = vec![mhz_to_rad(1.0), 1.0, mhz_to_rad(1.0)];
    factors.resize(n_par, 1.0);
    let result = fit.rescaled(&factors);
    let p = &result.parameters;
    let mut columns = BTreeMap::new();
    for iso in table.iter() {
        let col = match free_columns.iter().position(|m| *m == iso.mass_number) {
            Some(j) => p[3 + j],
            None => p[1] * iso.abundance,
        };
        columns.insert(iso.mass_number, col);
    }
    Ok(AbsorptionFit {
        doppler_width: p[0],
        scale: p[1],
        offset: p[2],
        columns,
        result,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialInitial {
    pub amplitude: f64,
    /// s.
    pub decay_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit {
    /// Parameters [d, τ] in SI.
    pub result: FitResult,
    pub amplitude: f64,
    pub decay_time: f64,
    /// True when τ ended on its upper bound, the signature of non-decaying data.
    pub decay_at_bound: bool,
}

/// Upper limit on τ as a multiple of the sampled time span.
pub const DECAY_SPAN_LIMIT: f64 = 1e3;

/// Fits y = d·exp(−t/τ).
pub fn fit_exponential(
    data: &[(f64, f64)],
    initial: &ExponentialInitial,
    options: &LmOptions,
) -> Result<ExponentialFit> {
    if data.len() < 4 {
        return Err(Error::Precondition(
            "an exponential fit needs at least 4 points".into(),
        ));
    }
    let (t, y) = split_series(data);
    let t_ms: Vec<f64> = t.iter().map(|v| v / ms(1.0)).collect();
    let span = t_ms.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - t_ms.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(span > 0.0) {
        return Err(Error::Precondition("time samples span no interval".into()));
    }
    let tau_max = DECAY_SPAN_LIMIT * span;
    let tau_min = 1e-9 * span;
    let tau0 = (initial.decay_time / ms(1.0)).clamp(tau_min, tau_max);
    let model = |p: &[f64]| {
        Ok(t_ms
            .iter()
            .map(|t| p[0] * (-t / p[1]).exp())
            .collect::<Vec<_>>())
    };
    let bounds = Bounds::new(
        vec![f64::NEG_INFINITY, tau_min],
        vec![f64::INFINITY, tau_max],
    )?;
    let fit = least_squares(
        &model,
        &[initial.amplitude, tau0],
        &y,
        Some(&bounds),
        options,
    )?;
    let result = fit.rescaled(&[1.0, ms(1.0)]);
    Ok(ExponentialFit {
        amplitude: result.parameters[0],
        decay_time: result.parameters[1],
        decay_at_bound: result.active_bounds.contains(&1)
            && result.parameters[1] >= tau_max * ms(1.0) * (1.0 - 1e-12),
        result,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinusoidInitial {
    pub amplitude: f64,
    /// s.
    pub decay_time: f64,
    /// rad.
    pub phase: f64,
    /// rad/s.
    pub frequency: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "omega", rename_all = "snake_case")]
pub enum FrequencyMode {
    Free,
    /// ω_B held at the given value (rad/s).
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinusoidFit {
    /// Parameters [Φ, τ, θ] or [Φ, τ, θ, ω_B] in SI.
    pub result: FitResult,
    pub amplitude: f64,
    pub decay_time: f64,
    pub phase: f64,
    pub frequency: f64,
}

fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Zero crossings with hysteresis: the sign state flips only after the
/// signal passes ±`threshold`, and each flip is timed by linear
/// interpolation at the last sign change before it. The flag is `true` for
/// rising crossings.
pub fn zero_crossings(times: &[f64], values: &[f64], threshold: f64) -> Vec<(f64, bool)> {
    let mut out = Vec::new();
    let mut state: Option<bool> = None;
    for i in 0..values.len() {
        let v = values[i];
        let now = if v > threshold {
            Some(true)
        } else if v < -threshold {
            Some(false)
        } else {
            None
        };
        let (Some(s), Some(n)) = (state, now) else {
            if state.is_none() {
                state = now;
            }
            continue;
        };
        if s == n {
            continue;
        }
        let mut j = i;
        while j > 0 && (values[j - 1] > 0.0) == n {
            j -= 1;
        }
        let t = if j == 0 {
            times[0]
        } else {
            let (t0, t1, v0, v1) = (times[j - 1], times[j], values[j - 1], values[j]);
            if v1 == v0 {
                t0
            } else {
                t0 - v0 * (t1 - t0) / (v1 - v0)
            }
        };
        out.push((t, n));
        state = now;
    }
    out
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Starting point for [`fit_damped_sinusoid`]: ω_B from the median
/// zero-crossing spacing, Φ from max |φ|, θ from the first crossing and τ
/// from the envelope decay between the first and last thirds of the record.
pub fn sinusoid_initial_guess(data: &[(f64, f64)]) -> Result<SinusoidInitial> {
    let (t, y) = split_series(data);
    let peak = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(peak > 0.0) {
        return Err(Error::Precondition("signal is identically zero".into()));
    }
    let crossings = zero_crossings(&t, &y, 0.2 * peak);
    if crossings.len() < 3 {
        return Err(Error::Precondition(format!(
            "found {} zero crossings; at least two oscillation periods are needed",
            crossings.len()
        )));
    }
    let spacing = median(crossings.windows(2).map(|w| w[1].0 - w[0].0).collect());
    let frequency = PI / spacing;
    let (t0, rising) = crossings[0];
    let phase = wrap_phase(if rising {
        -frequency * t0
    } else {
        PI - frequency * t0
    });

    let n = t.len();
    let third = (n / 3).max(1);
    let amp = |r: std::ops::Range<usize>| y[r].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (a1, a2) = (amp(0..third), amp(n - third..n));
    let dt = t[n - third / 2 - 1] - t[third / 2];
    let span = t[n - 1] - t[0];
    let decay_time = if a2 > 0.0 && a1 > a2 && dt > 0.0 {
        dt / (a1 / a2).ln()
    } else {
        10.0 * span
    };
    let amplitude = peak * ((t[third / 2] - t[0]) / decay_time).exp();
    Ok(SinusoidInitial {
        amplitude,
        decay_time,
        phase,
        frequency,
    })
}

/// Fits φ(T) = Φ·exp(−T/τ)·sin(ω_B·T + θ). With `initial = None` the
/// zero-crossing guess is used.
pub fn fit_damped_sinusoid(
    data: &[(f64, f64)],
    initial: Option<&SinusoidInitial>,
    mode: FrequencyMode,
    options: &LmOptions,
) -> Result<SinusoidFit> {
    if data.len() < 5 {
        return Err(Error::Precondition(
            "a damped-sinusoid fit needs at least 5 points".into(),
        ));
    }
    let mut init = match initial {
        Some(i) => *i,
        None => sinusoid_initial_guess(data)?,
    };
    if let FrequencyMode::Fixed(w) = mode {
        init.frequency = w;
    }
    let (t, y) = split_series(data);
    let span = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - t.iter().cloned().fold(f64::INFINITY, f64::min);
    let periods = span * init.frequency.abs() / (2.0 * PI);
    if !(periods >= 2.0) {
        return Err(Error::Precondition(format!(
            "record spans {periods:.3} oscillation periods; at least 2 are required"
        )));
    }
    if !(init.decay_time > 0.0) {
        return Err(Error::domain("initial decay time must be positive"));
    }

    let t_ms: Vec<f64> = t.iter().map(|v| v / ms(1.0)).collect();
    // ω_B in rad/ms
    let to_rad_per_ms = ms(1.0);
    let fixed = match mode {
        FrequencyMode::Fixed(w) => Some(w * to_rad_per_ms),
        FrequencyMode::Free => None,
    };
    let model = |p: &[f64]| {
        let w = fixed.unwrap_or_else(|| p[3]);
        Ok(t_ms
            .iter()
            .map(|t| p[0] * (-t / p[1]).exp() * (w * t + p[2]).sin())
            .collect::<Vec<_>>())
    };
    let tau_span = span / ms(1.0);
    let mut start = vec![
        init.amplitude,
        (init.decay_time / ms(1.0)).min(1e3 * tau_span),
        init.phase,
    ];
    let mut lower = vec![f64::NEG_INFINITY, 1e-9 * tau_span, f64::NEG_INFINITY];
    let mut upper = vec![f64::INFINITY, 1e3 * tau_span, f64::INFINITY];
    let mut factors = vec![1.0, ms(1.0), 1.0];
    if fixed.is_none() {
        start.push(init.frequency * to_rad_per_ms);
        lower.push(0.0);
        upper.push(f64::INFINITY);
        factors.push(1.0 / to_rad_per_ms);
    }
    let bounds = Bounds::new(lower, upper)?;
    let fit = least_squares(&model, &start, &y, Some(&bounds), options)?;
    let mut result = fit.rescaled(&factors);
    // Fold a negative amplitude into the phase
    if result.parameters[0] < 0.0 {
        result.parameters[0] = -result.parameters[0];
        result.parameters[2] += PI;
        if let Some(cov) = result.covariance.as_mut() {
            let (first, rest) = cov.split_at_mut(1);
            for (k, row) in rest.iter_mut().enumerate() {
                first[0][k + 1] = -first[0][k + 1];
                row[0] = -row[0];
            }
        }
    }
    result.parameters[2] = wrap_phase(result.parameters[2]);
    let p = &result.parameters;
    Ok(SinusoidFit {
        amplitude: p[0],
        decay_time: p[1],
        phase: p[2],
        frequency: match mode {
            FrequencyMode::Fixed(w) => w,
            FrequencyMode::Free => p[3],
        },
        result,
    })
}
