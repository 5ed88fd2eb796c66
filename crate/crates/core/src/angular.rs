//! Exact angular-momentum coupling for the ¹S₀(F = I) → ¹P₁(F′) line.
//!
//! Squared Clebsch–Gordan coefficients are evaluated with the Racah
//! closed form in exact integer arithmetic and kept as rationals; they are
//! converted to `f64` only where a lineshape consumes them.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::atomdata::IsotopeSpec;
use crate::error::{Error, Result};
use crate::halfint::HalfInt;

/// Photon polarization relative to the probe axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    #[serde(rename = "sigma+")]
    SigmaPlus,
    #[serde(rename = "sigma-")]
    SigmaMinus,
    #[serde(rename = "pi")]
    Pi,
}

impl Polarization {
    /// Change of the magnetic quantum number on absorption.
    pub fn q(self) -> i32 {
        match self {
            Polarization::SigmaPlus => 1,
            Polarization::SigmaMinus => -1,
            Polarization::Pi => 0,
        }
    }

    pub fn from_q(q: i32) -> Result<Self> {
        match q {
            1 => Ok(Polarization::SigmaPlus),
            -1 => Ok(Polarization::SigmaMinus),
            0 => Ok(Polarization::Pi),
            _ => Err(Error::domain(format!(
                "photon helicity q={q} not in {{-1, 0, 1}}"
            ))),
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Polarization::SigmaPlus => Polarization::SigmaMinus,
            Polarization::SigmaMinus => Polarization::SigmaPlus,
            Polarization::Pi => Polarization::Pi,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::SigmaPlus => "sigma+",
            Polarization::SigmaMinus => "sigma-",
            Polarization::Pi => "pi",
        })
    }
}

impl std::str::FromStr for Polarization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sigma+" | "s+" | "+1" | "1" | "sigma_plus" => Ok(Polarization::SigmaPlus),
            "sigma-" | "s-" | "-1" | "sigma_minus" => Ok(Polarization::SigmaMinus),
            "pi" | "0" => Ok(Polarization::Pi),
            other => Err(Error::Parse {
                record: other.to_string(),
                message: "expected sigma+, sigma- or pi".into(),
            }),
        }
    }
}

fn factorial(n: i32) -> BigInt {
    (2..=n.max(1)).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Converts an exact rational to the nearest `f64`.
pub fn to_f64(r: &BigRational) -> f64 {
    match r.to_f64() {
        Some(x) => x,
        None => r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN),
    }
}

/// |⟨j1, j2; m1, m2 | j1, j2; J, m1 + m2⟩|² as an exact rational.
pub fn clebsch_gordan_sq(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    big_j: HalfInt,
) -> Result<BigRational> {
    let (tj1, tm1, tj2, tm2, tj) = (
        j1.twice(),
        m1.twice(),
        j2.twice(),
        m2.twice(),
        big_j.twice(),
    );
    if tj1 < 0 || tj2 < 0 || tj < 0 {
        return Err(Error::domain("angular momenta must be nonnegative"));
    }
    if tm1.abs() > tj1 || !j1.same_parity(m1) {
        return Err(Error::domain(format!(
            "m1={m1} is not a projection of j1={j1}"
        )));
    }
    if tm2.abs() > tj2 || !j2.same_parity(m2) {
        return Err(Error::domain(format!(
            "m2={m2} is not a projection of j2={j2}"
        )));
    }
    if tj < (tj1 - tj2).abs() || tj > tj1 + tj2 || (tj1 + tj2 - tj) % 2 != 0 {
        return Err(Error::domain(format!(
            "J={big_j} cannot be formed from j1={j1} and j2={j2}"
        )));
    }
    let tm = tm1 + tm2;
    if tm.abs() > tj {
        return Ok(BigRational::zero());
    }

    // Integer combinations, all exact because of the parity checks above.
    let h = |x: i32| x / 2;
    let a = h(tj1 + tj2 - tj); // j1 + j2 - J
    let b = h(tj1 - tm1); // j1 - m1
    let c = h(tj2 + tm2); // j2 + m2
    let d = h(tj - tj2 + tm1); // J - j2 + m1
    let e = h(tj - tj1 - tm2); // J - j1 - m2

    let k_min = 0.max(-d).max(-e);
    let k_max = a.min(b).min(c);
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let den = factorial(k)
            * factorial(a - k)
            * factorial(b - k)
            * factorial(c - k)
            * factorial(d + k)
            * factorial(e + k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }

    let triangle = BigRational::new(
        BigInt::from(tj + 1)
            * factorial(h(tj + tj1 - tj2))
            * factorial(h(tj - tj1 + tj2))
            * factorial(a),
        factorial(h(tj1 + tj2 + tj) + 1),
    );
    let projections = factorial(h(tj + tm))
        * factorial(h(tj - tm))
        * factorial(h(tj1 - tm1))
        * factorial(h(tj1 + tm1))
        * factorial(h(tj2 - tm2))
        * factorial(h(tj2 + tm2));
    Ok(triangle * BigRational::from_integer(projections) * &sum * &sum)
}

/// Squared amplitude for absorbing a q-polarized photon from ground |I, m⟩
/// into |F′, m + q⟩, i.e. |⟨1, I; q, m | F′, m + q⟩|². Zero when the target
/// sublevel does not exist in F′.
pub fn absorption_strength(
    spin: HalfInt,
    m: HalfInt,
    pol: Polarization,
    level: HalfInt,
) -> Result<BigRational> {
    let q = HalfInt::from_int(pol.q());
    if (m + q).abs() > level {
        return Ok(BigRational::zero());
    }
    clebsch_gordan_sq(HalfInt::ONE, q, spin, m, level)
}

/// Spontaneous-decay branching from excited |F′, m′⟩ into each ground
/// sublevel |I, m_g⟩ with |m′ − m_g| ≤ 1. Branches sum to 1.
pub fn decay_branching(
    spin: HalfInt,
    level: HalfInt,
    m_exc: HalfInt,
) -> Result<Vec<(HalfInt, BigRational)>> {
    if m_exc.abs() > level || !m_exc.same_parity(level) {
        return Err(Error::domain(format!(
            "m'={m_exc} is not a projection of F'={level}"
        )));
    }
    let mut out = Vec::new();
    for m_g in spin.projections() {
        let q = m_exc - m_g;
        if q.abs() > HalfInt::ONE {
            continue;
        }
        let w = clebsch_gordan_sq(HalfInt::ONE, q, spin, m_g, level)?;
        if !w.is_zero() {
            out.push((m_g, w));
        }
    }
    Ok(out)
}

/// Absorption strengths for one polarization, indexed by (ground m, F′).
#[derive(Debug, Clone, PartialEq)]
pub struct StrengthTable {
    pub nuclear_spin: HalfInt,
    pub polarization: Polarization,
    pub entries: BTreeMap<(HalfInt, HalfInt), BigRational>,
}

impl StrengthTable {
    /// Excited levels F′ covered by the table, ascending.
    pub fn levels(&self) -> Vec<HalfInt> {
        IsotopeSpec::allowed_levels(self.nuclear_spin)
    }

    pub fn entry(&self, m: HalfInt, level: HalfInt) -> BigRational {
        self.entries
            .get(&(m, level))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn entry_f64(&self, m: HalfInt, level: HalfInt) -> f64 {
        self.entries.get(&(m, level)).map(to_f64).unwrap_or(0.0)
    }

    /// Σ_F′ entry(m, F′).
    pub fn row_sum(&self, m: HalfInt) -> BigRational {
        self.levels()
            .into_iter()
            .fold(BigRational::zero(), |acc, f| acc + self.entry(m, f))
    }

    /// Dense `f64` copy, indexed `[m index][F′ index]` with m ascending.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let levels = self.levels();
        self.nuclear_spin
            .projections()
            .map(|m| levels.iter().map(|&f| self.entry_f64(m, f)).collect())
            .collect()
    }
}

impl fmt::Display for StrengthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let levels = self.levels();
        write!(f, "m_I")?;
        for lv in &levels {
            write!(f, "\tF'={lv}")?;
        }
        writeln!(f)?;
        for m in self.nuclear_spin.projections() {
            write!(f, "{m}")?;
            for &lv in &levels {
                write!(f, "\t{}", self.entry(m, lv))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Strength table for polarization `pol` on the ¹S₀(F = I) → ¹P₁(F′) line.
pub fn sigma_strength_table(spin: HalfInt, pol: Polarization) -> Result<StrengthTable> {
    if spin.twice() < 0 {
        return Err(Error::domain("nuclear spin must be nonnegative"));
    }
    let mut entries = BTreeMap::new();
    for level in IsotopeSpec::allowed_levels(spin) {
        for m in spin.projections() {
            entries.insert((m, level), absorption_strength(spin, m, pol, level)?);
        }
    }
    Ok(StrengthTable {
        nuclear_spin: spin,
        polarization: pol,
        entries,
    })
}

/// Relative π-line strength of each hyperfine component for an unpolarized
/// ground state, (2F′ + 1)/(3(2I + 1)).
pub fn pi_line_strengths(spin: HalfInt) -> Result<BTreeMap<HalfInt, BigRational>> {
    if spin.twice() < 0 {
        return Err(Error::domain("nuclear spin must be nonnegative"));
    }
    let den = BigInt::from(3 * (spin.twice() + 1));
    Ok(IsotopeSpec::allowed_levels(spin)
        .into_iter()
        .map(|f| {
            (
                f,
                BigRational::new(BigInt::from(f.twice() + 1), den.clone()),
            )
        })
        .collect())
}

/// `true` when every entry is within [0, 1].
pub fn entries_in_unit_interval(table: &StrengthTable) -> bool {
    let one = BigRational::one();
    table
        .entries
        .values()
        .all(|v| !v.is_negative() && *v <= one)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn spin_half_coefficients() {
        for s in [1, -1] {
            assert_eq!(
                clebsch_gordan_sq(h(2), h(2 * s), h(1), h(s), h(3)).unwrap(),
                q(1, 1)
            );
            assert_eq!(
                clebsch_gordan_sq(h(2), h(2 * s), h(1), h(-s), h(3)).unwrap(),
                q(1, 3)
            );
            assert_eq!(
                clebsch_gordan_sq(h(2), h(2 * s), h(1), h(-s), h(1)).unwrap(),
                q(2, 3)
            );
        }
    }

    #[test]
    fn stretched_spin_five_halves() {
        let got: Vec<_> = [7, 5, 3]
            .iter()
            .map(|&f| clebsch_gordan_sq(h(5), h(5), h(2), h(-2), h(f)).unwrap())
            .collect();
        assert_eq!(got, vec![q(1, 21), q(2, 7), q(2, 3)]);
    }

    #[test]
    fn domain_errors() {
        assert!(clebsch_gordan_sq(h(2), h(4), h(1), h(1), h(3)).is_err());
        assert!(clebsch_gordan_sq(h(2), h(1), h(1), h(1), h(3)).is_err());
        assert!(clebsch_gordan_sq(h(2), h(0), h(1), h(1), h(5)).is_err());
        assert!(clebsch_gordan_sq(h(2), h(0), h(1), h(1), h(2)).is_err());
        assert!(clebsch_gordan_sq(h(-2), h(0), h(1), h(1), h(1)).is_err());
    }

    #[test]
    fn projection_outside_total_is_zero() {
        // M = 3/2 cannot live in J = 1/2
        assert!(clebsch_gordan_sq(h(2), h(2), h(1), h(1), h(1))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn sigma_plus_table_spin_half() {
        let t = sigma_strength_table(h(1), Polarization::SigmaPlus).unwrap();
        assert_eq!(t.entry(h(1), h(3)), q(1, 1));
        assert_eq!(t.entry(h(-1), h(3)), q(1, 3));
        assert_eq!(t.entry(h(-1), h(1)), q(2, 3));
        assert!(t.entry(h(1), h(1)).is_zero());
        assert!(entries_in_unit_interval(&t));
    }

    #[test]
    fn spin_zero_table() {
        for pol in [Polarization::SigmaPlus, Polarization::SigmaMinus] {
            let t = sigma_strength_table(HalfInt::ZERO, pol).unwrap();
            assert_eq!(t.entries.len(), 1);
            assert_eq!(t.entry(HalfInt::ZERO, HalfInt::ONE), q(1, 1));
        }
    }

    #[test]
    fn pi_lines() {
        let p = pi_line_strengths(h(1)).unwrap();
        assert_eq!(p[&h(1)], q(1, 3));
        assert_eq!(p[&h(3)], q(2, 3));
        let p = pi_line_strengths(h(5)).unwrap();
        assert_eq!(p[&h(7)], q(4, 9));
        assert_eq!(p[&h(3)], q(2, 9));
        assert_eq!(p[&h(5)], q(1, 3));
        let p = pi_line_strengths(HalfInt::ZERO).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[&HalfInt::ONE], q(1, 1));
    }

    #[test]
    fn decay_branches_sum_to_one() {
        for spin in [h(1), h(3), h(5)] {
            for level in IsotopeSpec::allowed_levels(spin) {
                for m in level.projections() {
                    let total = decay_branching(spin, level, m)
                        .unwrap()
                        .into_iter()
                        .fold(BigRational::zero(), |a, (_, w)| a + w);
                    assert_eq!(total, q(1, 1), "I={spin} F'={level} m'={m}");
                }
            }
        }
    }

    #[test]
    fn polarization_parse() {
        assert_eq!(
            "sigma+".parse::<Polarization>().unwrap(),
            Polarization::SigmaPlus
        );
        assert_eq!(
            "SIGMA-".parse::<Polarization>().unwrap(),
            Polarization::SigmaMinus
        );
        assert_eq!("pi".parse::<Polarization>().unwrap(), Polarization::Pi);
        assert!("circular".parse::<Polarization>().is_err());
    }
}
