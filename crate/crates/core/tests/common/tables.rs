//! Random hazard and penetrance tables for conversion round trips.

use rand::Rng;

pub const AGES: usize = 94;

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Random hazards and mortality with λ + λ_D well inside [0, 1].
pub fn random_hazard_table<R: Rng>(rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let scale = rng.random_range(0.001..0.1);
    let h = (0..AGES).map(|_| rng.random_range(0.0..scale)).collect();
    let d = (0..AGES).map(|_| rng.random_range(0.0..0.05)).collect();
    (h, d)
}

/// Random per-year penetrance whose implied hazards stay valid.
pub fn random_penetrance_table<R: Rng>(rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let scale = rng.random_range(0.0005..0.005);
    let pen = (0..AGES).map(|_| rng.random_range(0.0..scale)).collect();
    let d = (0..AGES).map(|_| rng.random_range(0.0..0.02)).collect();
    (pen, d)
}
