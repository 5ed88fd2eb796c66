//! Conversions between the human-facing units used in data files and on the
//! command line, and the SI / angular-frequency units used in the formulas.

use std::f64::consts::PI;

/// MHz (cycles) to rad/s.
pub fn mhz_to_rad(mhz: f64) -> f64 {
    2.0 * PI * 1e6 * mhz
}

/// rad/s to MHz (cycles).
pub fn rad_to_mhz(omega: f64) -> f64 {
    omega / (2.0 * PI * 1e6)
}

/// GHz (cycles) to rad/s.
pub fn ghz_to_rad(ghz: f64) -> f64 {
    mhz_to_rad(1e3 * ghz)
}

/// kHz (cycles) to rad/s.
pub fn khz_to_rad(khz: f64) -> f64 {
    2.0 * PI * 1e3 * khz
}

/// mW/mm² to W/m². The two differ by exactly 10³.
pub fn mw_per_mm2(x: f64) -> f64 {
    1e3 * x
}

/// µW/mm² to W/m².
pub fn uw_per_mm2(x: f64) -> f64 {
    x
}

/// W/m² to mW/mm².
pub fn to_mw_per_mm2(w_per_m2: f64) -> f64 {
    1e-3 * w_per_m2
}

pub fn mm(x: f64) -> f64 {
    1e-3 * x
}

pub fn um(x: f64) -> f64 {
    1e-6 * x
}

pub fn ms(x: f64) -> f64 {
    1e-3 * x
}

pub fn us(x: f64) -> f64 {
    1e-6 * x
}

/// µT to T.
pub fn microtesla(x: f64) -> f64 {
    1e-6 * x
}
