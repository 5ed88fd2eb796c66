//! Dispersive and absorptive lineshapes, Rabi frequency and the two-level
//! photon scattering rate.

use crate::atomdata::TransitionConstants;
use crate::error::{Error, Result};

/// Center and full width of a Lorentzian resonance, both in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineshapeParams {
    pub center: f64,
    pub width: f64,
}

impl LineshapeParams {
    pub fn new(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::domain(format!(
                "linewidth must be positive, got {width}"
            )));
        }
        Ok(LineshapeParams { center, width })
    }

    pub fn dispersive(&self, omega: f64) -> f64 {
        dispersive(self.center, omega, self.width)
    }

    pub fn absorption(&self, omega: f64) -> f64 {
        lorentzian_absorption(self.center, omega, self.width)
    }
}

/// g(ω) = (ω_c − ω)/((ω_c − ω)² + (Γ/2)²), in s/rad.
#[inline]
pub fn dispersive(center: f64, omega: f64, width: f64) -> f64 {
    let d = center - omega;
    let hw = 0.5 * width;
    d / (d * d + hw * hw)
}

/// (Γ/2)²/((ω_c − ω)² + (Γ/2)²), unity on resonance.
#[inline]
pub fn lorentzian_absorption(center: f64, omega: f64, width: f64) -> f64 {
    let d = center - omega;
    let hw2 = 0.25 * width * width;
    hw2 / (d * d + hw2)
}

/// Ω² = Γ²·I/(2·I_s) in (rad/s)².
pub fn rabi_squared(intensity: f64, constants: &TransitionConstants) -> Result<f64> {
    if intensity < 0.0 || !intensity.is_finite() {
        return Err(Error::domain(format!(
            "intensity must be nonnegative, got {intensity}"
        )));
    }
    Ok(constants.gamma * constants.gamma * intensity / (2.0 * constants.i_sat))
}

/// `true` when Ω² ≪ Δ² + (Γ/2)², taken as a factor `margin` below.
pub fn is_weak_field(
    intensity: f64,
    detuning: f64,
    constants: &TransitionConstants,
    margin: f64,
) -> bool {
    match rabi_squared(intensity, constants) {
        Ok(o2) => o2 * margin <= detuning * detuning + 0.25 * constants.gamma * constants.gamma,
        Err(_) => false,
    }
}

/// Two-level scattering rate r = (Γ/4)·Ω²/(Δ² + (Γ/2)² + (Ω/2)²) in 1/s,
/// always evaluated with the natural width.
pub fn scattering_rate(
    intensity: f64,
    detuning: f64,
    constants: &TransitionConstants,
) -> Result<f64> {
    let o2 = rabi_squared(intensity, constants)?;
    let g = constants.gamma;
    Ok(0.25 * g * o2 / (detuning * detuning + 0.25 * g * g + 0.25 * o2))
}

/// Width to use inside the lineshapes: a configured inhomogeneous width Γ*
/// replaces the natural width when present.
pub fn effective_linewidth(natural: f64, doppler: Option<f64>) -> Result<f64> {
    if !(natural > 0.0) {
        return Err(Error::domain("natural linewidth must be positive"));
    }
    match doppler {
        Some(w) if !(w > 0.0) => Err(Error::domain("Doppler width must be positive")),
        Some(w) => Ok(w),
        None => Ok(natural),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomdata::transition_constants;
    use crate::units::{mhz_to_rad, mw_per_mm2};

    #[test]
    fn dispersive_values() {
        let w = mhz_to_rad(29.0);
        assert_eq!(dispersive(1.0, 1.0, w), 0.0);
        assert!((dispersive(0.5 * w, 0.0, w) * w - 1.0).abs() < 1e-14);
        // −160/(160² + 14.5²) per (2π·MHz)
        let g = dispersive(-mhz_to_rad(160.0), 0.0, w) * mhz_to_rad(1.0);
        assert!((g - (-160.0 / (160.0f64.powi(2) + 14.5f64.powi(2)))).abs() < 1e-15);
        assert!((g + 6.20e-3).abs() < 5e-6);
    }

    #[test]
    fn absorption_values() {
        let w = 3.0;
        assert_eq!(lorentzian_absorption(2.0, 2.0, w), 1.0);
        assert!((lorentzian_absorption(0.0, 0.5 * w, w) - 0.5).abs() < 1e-15);
        assert!((lorentzian_absorption(0.0, 1.5 * w, w) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rabi_values() {
        let k = transition_constants();
        let g2 = k.gamma * k.gamma;
        assert!((rabi_squared(k.i_sat, &k).unwrap() / g2 - 0.5).abs() < 1e-15);
        assert_eq!(rabi_squared(0.0, &k).unwrap(), 0.0);
        let k6 = TransitionConstants {
            i_sat: mw_per_mm2(0.60),
            ..k
        };
        let r = rabi_squared(mw_per_mm2(0.70), &k6).unwrap() / g2;
        assert!((r - 0.7 / 1.2).abs() < 1e-12);
        assert!(rabi_squared(-1.0, &k).is_err());
    }

    #[test]
    fn scattering_limits() {
        let k = transition_constants();
        let r = scattering_rate(mw_per_mm2(0.70), mhz_to_rad(1600.0), &k).unwrap();
        assert!((r / 8.7e3 - 1.0).abs() < 0.05, "r = {r}");

        let weak = 1e-6 * k.i_sat;
        let o2 = rabi_squared(weak, &k).unwrap();
        let r0 = scattering_rate(weak, 0.0, &k).unwrap();
        assert!((r0 / (o2 / k.gamma) - 1.0).abs() < 1e-6);

        assert!(scattering_rate(k.i_sat, 1e30, &k).unwrap() < 1e-30);
    }

    #[test]
    fn effective_width() {
        let g = mhz_to_rad(29.0);
        assert_eq!(effective_linewidth(g, None).unwrap(), g);
        assert_eq!(
            effective_linewidth(g, Some(mhz_to_rad(57.0))).unwrap(),
            mhz_to_rad(57.0)
        );
        let ratio = effective_linewidth(g, Some(mhz_to_rad(57.0))).unwrap() / g;
        assert!((ratio - 1.97).abs() < 0.005);
        assert!(effective_linewidth(g, Some(0.0)).is_err());
        assert!(LineshapeParams::new(0.0, 0.0).is_err());
    }
}
