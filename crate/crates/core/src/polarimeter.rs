//! Balanced polarimeter and optical-depth observables.

use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::angular::to_f64;
use crate::error::{Error, Result};

/// Powers at the four points of the setup plus the derived observables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarimeterReading {
    /// Power in front of the atoms (W).
    pub p_in: f64,
    /// Power behind the atoms (W).
    pub p_out: f64,
    /// Power on the `+` photodiode (W).
    pub p_plus: f64,
    /// Power on the `−` photodiode (W).
    pub p_minus: f64,
    /// Polarization rotation (rad).
    pub rotation: f64,
    pub optical_depth: f64,
}

impl PolarimeterReading {
    /// Difference signal P₊ − P₋ = P_out·sin 2φ.
    pub fn difference(&self) -> f64 {
        self.p_plus - self.p_minus
    }

    /// Rotation recovered from the photodiode powers, asin((P₊ − P₋)/(P₊ + P₋))/2.
    pub fn inferred_rotation(&self) -> f64 {
        let total = self.p_plus + self.p_minus;
        if total == 0.0 {
            return 0.0;
        }
        0.5 * (self.difference() / total).clamp(-1.0, 1.0).asin()
    }

    /// Adds independent Gaussian noise of standard deviation `sigma` (W) to
    /// both photodiode powers. P_out stays the ideal transmitted power.
    pub fn with_detector_noise<R: Rng + ?Sized>(mut self, sigma: f64, rng: &mut R) -> Result<Self> {
        let normal = Normal::new(0.0, sigma).map_err(|e| Error::domain(e.to_string()))?;
        self.p_plus += normal.sample(rng);
        self.p_minus += normal.sample(rng);
        Ok(self)
    }
}

/// Ideal reading for input power `p_in`, absorption optical depth
/// `absorption_od` and rotation `phi`.
pub fn read(p_in: f64, absorption_od: f64, phi: f64) -> Result<PolarimeterReading> {
    if !(p_in >= 0.0) {
        return Err(Error::domain("input power must be nonnegative"));
    }
    if !(absorption_od >= 0.0) {
        return Err(Error::domain("optical depth must be nonnegative"));
    }
    let p_out = p_in * (-absorption_od).exp();
    let s = (2.0 * phi).sin();
    Ok(PolarimeterReading {
        p_in,
        p_out,
        p_plus: 0.5 * p_out * (1.0 + s),
        p_minus: 0.5 * p_out * (1.0 - s),
        rotation: phi,
        optical_depth: absorption_od,
    })
}

/// −ln(P_out/P_in).
pub fn optical_depth(p_in: f64, p_out: f64) -> Result<f64> {
    if !(p_in > 0.0) {
        return Err(Error::domain("input power must be positive"));
    }
    if !(p_out > 0.0) {
        return Err(Error::domain("transmitted power must be positive"));
    }
    if p_out > p_in {
        return Err(Error::domain(format!(
            "transmitted power {p_out} exceeds input {p_in}; gain is unphysical"
        )));
    }
    Ok(-(p_out / p_in).ln())
}

/// Column N·σ₀·L from a resonant optical depth and the relative line strength.
pub fn column_from_depth(od: f64, line_factor: &BigRational) -> Result<f64> {
    if !line_factor.is_positive() || *line_factor > BigRational::one() {
        return Err(Error::domain(format!(
            "line factor {line_factor} outside (0, 1]"
        )));
    }
    Ok(od / to_f64(line_factor))
}
