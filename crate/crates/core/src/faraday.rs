//! Refractive indices and Faraday rotation angles from ground-state
//! populations.
//!
//! Probe frequencies passed as `omega` are angular offsets from the ¹⁷⁴Yb
//! resonance ω₀ (rad/s), the same frame as [`IsotopeSpec::line_center`].
//! Rotation prefactors use the natural width Γ from [`TransitionConstants`];
//! `width` only enters the dispersive functions, so a Doppler width Γ* can be
//! supplied there.
//!
//! Sign convention: φ > 0 when n₊ > n₋.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::angular::{sigma_strength_table, Polarization, StrengthTable};
use crate::atomdata::{refractive_prefactor, IsotopeSpec, TransitionConstants, C};
use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::lineshape::dispersive;

/// Tolerance on Σ fractions = 1.
pub const FRACTION_SUM_TOLERANCE: f64 = 1e-12;

/// Fractional populations of the ground sublevels m_I = −I … I.
///
/// Spin-0 ensembles instead carry the Zeeman shift of the excited m_J′ = ±1
/// sublevels, which drives the diamagnetic rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundPopulations {
    nuclear_spin: HalfInt,
    fractions: Vec<f64>,
    zeeman_split: f64,
}

impl GroundPopulations {
    /// `fractions` are ordered by ascending m.
    pub fn new(spin: HalfInt, fractions: Vec<f64>) -> Result<Self> {
        if fractions.len() != spin.multiplicity() || spin.twice() < 0 {
            return Err(Error::domain(format!(
                "spin {spin} needs {} fractions, got {}",
                spin.multiplicity(),
                fractions.len()
            )));
        }
        if fractions.iter().any(|f| !(*f >= 0.0)) {
            return Err(Error::validation("populations must be nonnegative"));
        }
        let total: f64 = fractions.iter().sum();
        if (total - 1.0).abs() > FRACTION_SUM_TOLERANCE {
            return Err(Error::validation(format!(
                "populations sum to {total}, not 1"
            )));
        }
        Ok(GroundPopulations {
            nuclear_spin: spin,
            fractions,
            zeeman_split: 0.0,
        })
    }

    /// Builds populations from a possibly slightly unnormalized vector (as
    /// produced by an integrator): tiny negative values are clamped to zero
    /// and the vector is renormalized.
    pub(crate) fn from_integrated(spin: HalfInt, mut fractions: Vec<f64>) -> Self {
        for f in &mut fractions {
            if *f < 0.0 {
                *f = 0.0;
            }
        }
        let total: f64 = fractions.iter().sum();
        if total > 0.0 {
            for f in &mut fractions {
                *f /= total;
            }
        }
        GroundPopulations {
            nuclear_spin: spin,
            fractions,
            zeeman_split: 0.0,
        }
    }

    pub fn unpolarized(spin: HalfInt) -> Self {
        let n = spin.multiplicity();
        GroundPopulations {
            nuclear_spin: spin,
            fractions: vec![1.0 / n as f64; n],
            zeeman_split: 0.0,
        }
    }

    /// All population in m = +I (`upper`) or m = −I.
    pub fn stretched(spin: HalfInt, upper: bool) -> Self {
        let n = spin.multiplicity();
        let mut fractions = vec![0.0; n];
        fractions[if upper { n - 1 } else { 0 }] = 1.0;
        GroundPopulations {
            nuclear_spin: spin,
            fractions,
            zeeman_split: 0.0,
        }
    }

    /// Spin-1/2 populations with polarization p = N₊ − N₋.
    pub fn spin_half(p: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("polarization {p} outside [-1, 1]")));
        }
        Self::new(HalfInt::HALF, vec![0.5 * (1.0 - p), 0.5 * (1.0 + p)])
    }

    /// Mixture of the two stretched states with weights (1 ± p)/2.
    pub fn stretched_mixture(spin: HalfInt, p: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("polarization {p} outside [-1, 1]")));
        }
        if spin.twice() == 0 {
            return Ok(Self::unpolarized(spin));
        }
        let n = spin.multiplicity();
        let mut fractions = vec![0.0; n];
        fractions[0] = 0.5 * (1.0 - p);
        fractions[n - 1] += 0.5 * (1.0 + p);
        Self::new(spin, fractions)
    }

    /// Spin-0 ground state with excited sublevels at ω ± `zeeman_split`.
    pub fn spin_zero(zeeman_split: f64) -> Self {
        GroundPopulations {
            nuclear_spin: HalfInt::ZERO,
            fractions: vec![1.0],
            zeeman_split,
        }
    }

    pub fn nuclear_spin(&self) -> HalfInt {
        self.nuclear_spin
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    pub fn zeeman_split(&self) -> f64 {
        self.zeeman_split
    }

    pub fn fraction(&self, m: HalfInt) -> f64 {
        let idx = (m.twice() + self.nuclear_spin.twice()) / 2;
        if m.abs() > self.nuclear_spin || !m.same_parity(self.nuclear_spin) {
            return 0.0;
        }
        self.fractions[idx as usize]
    }

    /// Orientation ⟨m⟩/I; equals N₊ − N₋ for I = 1/2 and 0 for I = 0.
    pub fn polarization(&self) -> f64 {
        if self.nuclear_spin.twice() == 0 {
            return 0.0;
        }
        let mean: f64 = self
            .nuclear_spin
            .projections()
            .zip(&self.fractions)
            .map(|(m, f)| m.value() * f)
            .sum();
        mean / self.nuclear_spin.value()
    }

    /// Populations with m → −m.
    pub fn mirrored(&self) -> Self {
        let mut out = self.clone();
        out.fractions.reverse();
        out.zeeman_split = -self.zeeman_split;
        out
    }

    pub fn total(&self) -> f64 {
        self.fractions.iter().sum()
    }
}

/// Column quantities of the probed ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleGeometry {
    /// Dimensionless column N·σ₀·L.
    pub nsigma: f64,
    /// Medium length along the probe (m).
    pub length: f64,
    /// Probe 1/e² radius (m).
    pub probe_waist: f64,
    /// Number density (1/m³) when known.
    pub number_density: Option<f64>,
}

impl EnsembleGeometry {
    pub fn from_column(nsigma: f64, length: f64, probe_waist: f64) -> Result<Self> {
        let g = EnsembleGeometry {
            nsigma,
            length,
            probe_waist,
            number_density: None,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn from_density(
        number_density: f64,
        length: f64,
        probe_waist: f64,
        sigma0: f64,
    ) -> Result<Self> {
        let g = EnsembleGeometry {
            nsigma: number_density * sigma0 * length,
            length,
            probe_waist,
            number_density: Some(number_density),
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if !(self.nsigma >= 0.0) {
            return Err(Error::domain("N·σ₀·L must be nonnegative"));
        }
        if !(self.length >= 0.0) || !(self.probe_waist >= 0.0) {
            return Err(Error::domain("length and waist must be nonnegative"));
        }
        if let Some(n) = self.number_density {
            if !(n >= 0.0) {
                return Err(Error::domain("number density must be nonnegative"));
            }
        }
        Ok(())
    }

    /// N, either as given or from N·σ₀·L / (σ₀·L).
    pub fn density(&self, sigma0: f64) -> Option<f64> {
        self.number_density
            .or_else(|| (self.length > 0.0).then(|| self.nsigma / (sigma0 * self.length)))
    }

    /// Probed atom number 2S = N·π·w²·L.
    pub fn probed_spin_count(&self, sigma0: f64) -> f64 {
        self.nsigma / sigma0 * std::f64::consts::PI * self.probe_waist * self.probe_waist
    }
}

/// Strength tables for one spin as dense `f64` arrays.
#[derive(Debug)]
struct DenseCoupling {
    levels: Vec<HalfInt>,
    /// `[m][F′]`, m ascending.
    plus: Vec<Vec<f64>>,
    minus: Vec<Vec<f64>>,
}

fn dense_coupling(spin: HalfInt) -> Result<Arc<DenseCoupling>> {
    static CACHE: OnceLock<Mutex<HashMap<i32, Arc<DenseCoupling>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().expect("coupling cache").get(&spin.twice()) {
        return Ok(Arc::clone(hit));
    }
    let plus = sigma_strength_table(spin, Polarization::SigmaPlus)?;
    let minus = sigma_strength_table(spin, Polarization::SigmaMinus)?;
    let built = Arc::new(DenseCoupling {
        levels: plus.levels(),
        plus: plus.to_dense(),
        minus: minus.to_dense(),
    });
    cache
        .lock()
        .expect("coupling cache")
        .insert(spin.twice(), Arc::clone(&built));
    Ok(built)
}

fn check_spin(pops: &GroundPopulations, isotope: &IsotopeSpec) -> Result<()> {
    if pops.nuclear_spin != isotope.nuclear_spin {
        return Err(Error::domain(format!(
            "populations are for spin {} but isotope {} has spin {}",
            pops.nuclear_spin, isotope.mass_number, isotope.nuclear_spin
        )));
    }
    if pops.zeeman_split != 0.0 && pops.nuclear_spin.twice() != 0 {
        return Err(Error::domain(
            "excited-state Zeeman splitting is only modelled for spin 0",
        ));
    }
    Ok(())
}

/// Refractive-index excesses n₊ − 1 and n₋ − 1, kept separately from the
/// leading 1 so that their difference does not lose precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefractiveIndices {
    pub plus_excess: f64,
    pub minus_excess: f64,
}

impl RefractiveIndices {
    pub fn n_plus(&self) -> f64 {
        1.0 + self.plus_excess
    }

    pub fn n_minus(&self) -> f64 {
        1.0 + self.minus_excess
    }

    /// (ωL/2c)(n₊ − n₋) for absolute probe frequency `omega_abs`.
    pub fn rotation(&self, length: f64, omega_abs: f64) -> f64 {
        omega_abs * length / (2.0 * C) * (self.plus_excess - self.minus_excess)
    }
}

/// n± = 1 + (cσ₀Γ/4ω₀)·Σ_{m,F′} strength±(m,F′)·g^(F′)(ω)·N·fraction(m).
#[allow(clippy::too_many_arguments)]
pub fn refractive_indices(
    pops: &GroundPopulations,
    table_plus: &StrengthTable,
    table_minus: &StrengthTable,
    omega: f64,
    isotope: &IsotopeSpec,
    constants: &TransitionConstants,
    width: f64,
    number_density: f64,
) -> Result<RefractiveIndices> {
    check_spin(pops, isotope)?;
    if table_plus.nuclear_spin != pops.nuclear_spin || table_minus.nuclear_spin != pops.nuclear_spin
    {
        return Err(Error::domain(
            "strength tables do not match the population spin",
        ));
    }
    if table_plus.polarization != Polarization::SigmaPlus
        || table_minus.polarization != Polarization::SigmaMinus
    {
        return Err(Error::domain("expected sigma+ and sigma- strength tables"));
    }
    if !(width > 0.0) {
        return Err(Error::domain("linewidth must be positive"));
    }
    let mut plus = 0.0;
    let mut minus = 0.0;
    for level in table_plus.levels() {
        let center = isotope.line_center(level)?;
        let g_plus = dispersive(center + pops.zeeman_split, omega, width);
        let g_minus = dispersive(center - pops.zeeman_split, omega, width);
        for m in pops.nuclear_spin.projections() {
            let f = pops.fraction(m);
            plus += table_plus.entry_f64(m, level) * g_plus * f;
            minus += table_minus.entry_f64(m, level) * g_minus * f;
        }
    }
    let k = refractive_prefactor(constants) * number_density;
    Ok(RefractiveIndices {
        plus_excess: k * plus,
        minus_excess: k * minus,
    })
}

/// φ = (ωL/2c)(n₊ − n₋).
pub fn rotation_angle(n_plus: f64, n_minus: f64, length: f64, omega: f64) -> Result<f64> {
    if !(length >= 0.0) {
        return Err(Error::domain("length must be nonnegative"));
    }
    Ok(omega * length / (2.0 * C) * (n_plus - n_minus))
}

/// Diamagnetic rotation of a spin-0 isotope, (Γ/8)(g₊₁ − g₋₁)·Nσ₀L, with
/// `omega` measured from the isotope's line center and the m_J′ = ±1
/// resonances at ±`zeeman_split`.
pub fn rotation_spin_zero(
    constants: &TransitionConstants,
    nsigma: f64,
    omega: f64,
    zeeman_split: f64,
    width: f64,
) -> Result<f64> {
    if !(nsigma >= 0.0) {
        return Err(Error::domain("N·σ₀·L must be nonnegative"));
    }
    let gp = dispersive(zeeman_split, omega, width);
    let gm = dispersive(-zeeman_split, omega, width);
    Ok(constants.gamma / 8.0 * (gp - gm) * nsigma)
}

/// Spin-1/2 rotation (Γ/12)(g^(3/2) − g^(1/2))·p·Nσ₀L.
pub fn rotation_spin_half(
    constants: &TransitionConstants,
    p: f64,
    nsigma: f64,
    omega: f64,
    isotope: &IsotopeSpec,
    width: f64,
) -> Result<f64> {
    if isotope.nuclear_spin != HalfInt::HALF {
        return Err(Error::domain(format!(
            "isotope {} is not spin-1/2",
            isotope.mass_number
        )));
    }
    if !(-1.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("polarization {p} outside [-1, 1]")));
    }
    if !(nsigma >= 0.0) {
        return Err(Error::domain("N·σ₀·L must be nonnegative"));
    }
    let g32 = dispersive(isotope.line_center(HalfInt::from_twice(3))?, omega, width);
    let g12 = dispersive(isotope.line_center(HalfInt::HALF)?, omega, width);
    Ok(constants.gamma / 12.0 * (g32 - g12) * p * nsigma)
}

/// Which coefficients to use for the stretched spin-5/2 rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientSource {
    /// From the strength tables: (10, −7, −3)/84 for F′ = (7/2, 3/2, 5/2).
    Derived,
    /// The literature form (10, −7, −6)/84, kept for comparison output.
    Printed,
}

/// Coefficients c(F′) with φ = Γ·Nσ₀L·Σ_F′ c(F′)·g^(F′) for the stretched
/// state m = +I, computed exactly as (strength₊ − strength₋)/8.
pub fn stretched_coefficients(spin: HalfInt) -> Result<BTreeMap<HalfInt, BigRational>> {
    let plus = sigma_strength_table(spin, Polarization::SigmaPlus)?;
    let minus = sigma_strength_table(spin, Polarization::SigmaMinus)?;
    let eighth = BigRational::new(BigInt::from(1), BigInt::from(8));
    Ok(plus
        .levels()
        .into_iter()
        .map(|f| (f, (plus.entry(spin, f) - minus.entry(spin, f)) * &eighth))
        .collect())
}

/// Spin-5/2 numerators over 84 for F′ = 7/2, 3/2, 5/2.
pub fn spin52_numerators(source: CoefficientSource) -> Result<[(HalfInt, i64); 3]> {
    let order = [
        HalfInt::from_twice(7),
        HalfInt::from_twice(3),
        HalfInt::from_twice(5),
    ];
    match source {
        CoefficientSource::Printed => Ok([(order[0], 10), (order[1], -7), (order[2], -6)]),
        CoefficientSource::Derived => {
            let c = stretched_coefficients(HalfInt::from_twice(5))?;
            let scale = BigRational::from_integer(BigInt::from(84));
            let mut out = [(HalfInt::ZERO, 0i64); 3];
            for (slot, f) in out.iter_mut().zip(order) {
                let v = &c[&f] * &scale;
                if !v.is_integer() {
                    return Err(Error::domain(
                        "spin-5/2 coefficient is not a multiple of 1/84",
                    ));
                }
                let n: i64 = v
                    .to_integer()
                    .try_into()
                    .map_err(|_| Error::domain("coefficient overflow"))?;
                *slot = (f, n);
            }
            Ok(out)
        }
    }
}

/// Stretched-state (m = +5/2) rotation of a spin-5/2 isotope.
pub fn rotation_spin_52_stretched(
    constants: &TransitionConstants,
    nsigma: f64,
    omega: f64,
    isotope: &IsotopeSpec,
    width: f64,
    source: CoefficientSource,
) -> Result<f64> {
    if isotope.nuclear_spin != HalfInt::from_twice(5) {
        return Err(Error::domain(format!(
            "isotope {} is not spin-5/2",
            isotope.mass_number
        )));
    }
    if !(nsigma >= 0.0) {
        return Err(Error::domain("N·σ₀·L must be nonnegative"));
    }
    let coeffs = spin52_numerators(source)?;
    let total: i64 = coeffs.iter().map(|(_, c)| c).sum();
    let g_ref = if total == 0 {
        dispersive(isotope.line_center(isotope.top_level())?, omega, width)
    } else {
        0.0
    };
    let mut acc = 0.0;
    for (level, c) in coeffs {
        let g = dispersive(isotope.line_center(level)?, omega, width);
        acc += c as f64 * (g - g_ref);
    }
    Ok(constants.gamma / 84.0 * acc * nsigma)
}

/// Population-weighted rotation for any spin,
/// φ = (Γ·Nσ₀L/8)·Σ_{m,F′} [strength₊ − strength₋](m,F′)·g^(F′)·fraction(m).
///
/// Each ground sublevel's σ₊ and σ₋ strengths both sum to one over F′, so
/// the sum is evaluated relative to g at the top level; degenerate levels then
/// cancel exactly.
pub fn rotation_general(
    constants: &TransitionConstants,
    pops: &GroundPopulations,
    geometry: &EnsembleGeometry,
    omega: f64,
    isotope: &IsotopeSpec,
    width: f64,
) -> Result<f64> {
    check_spin(pops, isotope)?;
    if !(width > 0.0) {
        return Err(Error::domain("linewidth must be positive"));
    }
    let coupling = dense_coupling(pops.nuclear_spin)?;
    let g_ref = dispersive(isotope.line_center(isotope.top_level())?, omega, width);
    let mut delta_plus = Vec::with_capacity(coupling.levels.len());
    let mut delta_minus = Vec::with_capacity(coupling.levels.len());
    for &level in &coupling.levels {
        let center = isotope.line_center(level)?;
        delta_plus.push(dispersive(center + pops.zeeman_split, omega, width) - g_ref);
        delta_minus.push(dispersive(center - pops.zeeman_split, omega, width) - g_ref);
    }
    let mut acc = 0.0;
    for (mi, f) in pops.fractions.iter().enumerate() {
        if *f == 0.0 {
            continue;
        }
        let row: f64 = (0..coupling.levels.len())
            .map(|li| {
                coupling.plus[mi][li] * delta_plus[li] - coupling.minus[mi][li] * delta_minus[li]
            })
            .sum();
        acc += f * row;
    }
    Ok(constants.gamma * geometry.nsigma / 8.0 * acc)
}

/// φ/S_z for a spin-1/2 ensemble, the product αt₁/2 in radians per unit spin:
/// rotation_spin_half(p = 1, Nσ₀L = 1)·2σ₀/(πw²).
pub fn spin_rotation_coupling(
    constants: &TransitionConstants,
    omega: f64,
    geometry: &EnsembleGeometry,
    isotope: &IsotopeSpec,
    width: f64,
) -> Result<f64> {
    if isotope.nuclear_spin != HalfInt::HALF {
        return Err(Error::domain(
            "the spin-proportional coupling is defined for spin 1/2",
        ));
    }
    if !(geometry.probe_waist > 0.0) {
        return Err(Error::domain("probe waist must be positive"));
    }
    let per_column = rotation_spin_half(constants, 1.0, 1.0, omega, isotope, width)?;
    let w = geometry.probe_waist;
    Ok(per_column * 2.0 * constants.sigma0 / (std::f64::consts::PI * w * w))
}

/// Exact check that each ground sublevel's σ₊ and σ₋ strengths sum to one.
pub fn completeness_holds(spin: HalfInt) -> Result<bool> {
    let plus = sigma_strength_table(spin, Polarization::SigmaPlus)?;
    let minus = sigma_strength_table(spin, Polarization::SigmaMinus)?;
    let one = BigRational::from_integer(BigInt::from(1));
    Ok(spin
        .projections()
        .all(|m| plus.row_sum(m) == one && minus.row_sum(m) == one))
}

/// Sum of the stretched-state coefficients; zero for the derived form.
pub fn coefficient_sum(source: CoefficientSource) -> Result<i64> {
    Ok(spin52_numerators(source)?.iter().map(|(_, c)| c).sum())
}

/// Side-by-side comparison of the derived and printed spin-5/2 coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Spin52Discrepancy {
    pub derived: [(HalfInt, i64); 3],
    pub printed: [(HalfInt, i64); 3],
    /// φ/(Γ·g·Nσ₀L) with every hyperfine level at one frequency.
    pub degenerate_derived: f64,
    pub degenerate_printed: f64,
}

impl Spin52Discrepancy {
    pub fn new(constants: &TransitionConstants, isotope: &IsotopeSpec) -> Result<Self> {
        let degenerate = isotope.with_degenerate_levels();
        let width = constants.gamma;
        let omega = degenerate.line_center(degenerate.top_level())? + 0.5 * width;
        let unit = constants.gamma
            * dispersive(
                degenerate.line_center(degenerate.top_level())?,
                omega,
                width,
            );
        let phi = |src| rotation_spin_52_stretched(constants, 1.0, omega, &degenerate, width, src);
        Ok(Spin52Discrepancy {
            derived: spin52_numerators(CoefficientSource::Derived)?,
            printed: spin52_numerators(CoefficientSource::Printed)?,
            degenerate_derived: phi(CoefficientSource::Derived)? / unit + 0.0,
            degenerate_printed: phi(CoefficientSource::Printed)? / unit,
        })
    }
}

impl std::fmt::Display for Spin52Discrepancy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let row = |c: &[(HalfInt, i64); 3]| {
            c.iter()
                .map(|(lvl, n)| format!("F'={lvl}: {n}/84"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let sum = |c: &[(HalfInt, i64); 3]| c.iter().map(|(_, n)| n).sum::<i64>();
        writeln!(f, "spin-5/2 stretched-state coefficients")?;
        writeln!(
            f,
            "  derived: {} (sum {}/84)",
            row(&self.derived),
            sum(&self.derived)
        )?;
        writeln!(
            f,
            "  printed: {} (sum {}/84)",
            row(&self.printed),
            sum(&self.printed)
        )?;
        writeln!(
            f,
            "  degenerate-limit phi/(Gamma g Nsigma0L): derived {:e}, printed {:e}",
            self.degenerate_derived, self.degenerate_printed
        )
    }
}
