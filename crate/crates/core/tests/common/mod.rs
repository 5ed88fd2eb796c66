//! Clebsch-Gordan coefficients by diagonalising J² in the uncoupled basis.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};

fn ladder(j: f64, m: f64, up: bool) -> f64 {
    let mm = if up { m * (m + 1.0) } else { m * (m - 1.0) };
    (j * (j + 1.0) - mm).max(0.0).sqrt()
}

/// |⟨j1, m1; j2, m2 | J, m1 + m2⟩|² for twice-valued quantum numbers.
pub fn cg_sq_oracle(tj1: i32, tm1: i32, tj2: i32, tm2: i32, tj: i32) -> f64 {
    let tm = tm1 + tm2;
    let (j1, j2) = (tj1 as f64 / 2.0, tj2 as f64 / 2.0);
    let basis: Vec<(i32, i32)> = (-tj1..=tj1)
        .step_by(2)
        .filter_map(|a| {
            let b = tm - a;
            (b.abs() <= tj2 && (b - tj2) % 2 == 0).then_some((a, b))
        })
        .collect();
    let n = basis.len();
    let mut h = DMatrix::<f64>::zeros(n, n);
    for (i, &(a, b)) in basis.iter().enumerate() {
        let (ma, mb) = (a as f64 / 2.0, b as f64 / 2.0);
        h[(i, i)] = j1 * (j1 + 1.0) + j2 * (j2 + 1.0) + 2.0 * ma * mb;
        for (k, &(c, d)) in basis.iter().enumerate() {
            // J1+ J2- connects (a, b) -> (a + 2, b - 2)
            if c == a + 2 && d == b - 2 {
                let v = ladder(j1, ma, true) * ladder(j2, mb, false);
                h[(k, i)] += v;
                h[(i, k)] += v;
            }
        }
    }
    let eig = SymmetricEigen::new(h);
    let target = (tj as f64 / 2.0) * (tj as f64 / 2.0 + 1.0);
    let col = (0..n)
        .min_by(|&x, &y| {
            (eig.eigenvalues[x] - target)
                .abs()
                .total_cmp(&(eig.eigenvalues[y] - target).abs())
        })
        .expect("nonempty basis");
    assert!(
        (eig.eigenvalues[col] - target).abs() < 1e-9,
        "J={tj}/2 not in spectrum"
    );
    let row = basis
        .iter()
        .position(|&(a, _)| a == tm1)
        .expect("m1 in basis");
    eig.eigenvectors[(row, col)].powi(2)
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use yb_faraday::atomdata::{IsotopeTable, YbData};
use yb_faraday::experiments::{beam_spectra, fort_precession_trace, BeamScenario, FortScenario};
use yb_faraday::units::mhz_to_rad;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn add_noise(y: &mut [f64], sigma: f64, seed: u64) {
    let mut r = rng(seed);
    let n = Normal::new(0.0, sigma).unwrap();
    for v in y {
        *v += n.sample(&mut r);
    }
}

/// Beam absorption spectrum with the default beam scenario on a 2 MHz grid
/// from −1 GHz to +2.2 GHz, plus Gaussian noise of `rel_noise`·peak.
pub fn beam_absorption_data(rel_noise: f64, seed: u64) -> Vec<(f64, f64)> {
    let data = YbData::bundled();
    let scn = BeamScenario::reference(&data.isotopes).unwrap();
    let grid: Vec<f64> = (0..=1600)
        .map(|i| mhz_to_rad(-1000.0 + 2.0 * i as f64))
        .collect();
    let mut od = beam_spectra(&scn, &grid, &data.constants).unwrap().od;
    let peak = od.iter().cloned().fold(0.0, f64::max);
    add_noise(&mut od, rel_noise * peak, seed);
    grid.into_iter().zip(od).collect()
}

/// d·exp(−t/τ) sampled every 0.1 ms over 8 ms with noise `rel_noise`·d.
pub fn exponential_data(d: f64, tau: f64, rel_noise: f64, seed: u64) -> Vec<(f64, f64)> {
    let t: Vec<f64> = (0..=80).map(|i| i as f64 * 1e-4).collect();
    let mut y: Vec<f64> = t.iter().map(|t| d * (-t / tau).exp()).collect();
    add_noise(&mut y, rel_noise * d, seed);
    t.into_iter().zip(y).collect()
}

/// FORT precession trace sampled every 10 µs over 3 ms with noise `rel_noise`·Φ.
pub fn precession_data(
    amplitude: f64,
    tau: f64,
    phase: f64,
    rel_noise: f64,
    seed: u64,
) -> Vec<(f64, f64)> {
    let scn = FortScenario::reference();
    let t: Vec<f64> = (0..=300).map(|i| i as f64 * 1e-5).collect();
    let mut y = fort_precession_trace(&scn, amplitude, tau, phase, &t).unwrap();
    add_noise(&mut y, rel_noise * amplitude, seed);
    t.into_iter().zip(y).collect()
}

pub fn bundled_table() -> IsotopeTable {
    IsotopeTable::bundled()
}
