//! Density-ratio weights w(x) ≈ p_target(x) / p_train(x) by unconstrained
//! least-squares importance fitting over a Gaussian-kernel basis.

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::EnsembleError;

const MAX_CENTERS: usize = 100;
const FOLDS: usize = 5;
const WIDTH_MULTIPLIERS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
const RIDGE_GRID: [f64; 6] = [1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImportanceOptions {
    /// Seeds the choice of kernel centers.
    pub seed: u64,
}

impl Default for ImportanceOptions {
    fn default() -> Self {
        ImportanceOptions { seed: 0x5eed }
    }
}

/// Standardized copies of both matrices, keeping only columns that vary.
fn standardize(train: &[Vec<f64>], target: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let d = train.first().or(target.first()).map_or(0, Vec::len);
    let all = || train.iter().chain(target.iter());
    let n = (train.len() + target.len()) as f64;
    let mut keep = Vec::new();
    let mut stats = Vec::new();
    for j in 0..d {
        let mean = all().map(|r| r[j]).sum::<f64>() / n;
        let var = all().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
        if var > 1e-24 {
            keep.push(j);
            stats.push((mean, var.sqrt()));
        }
    }
    let map = |m: &[Vec<f64>]| -> Vec<Vec<f64>> {
        m.iter()
            .map(|r| {
                keep.iter()
                    .zip(&stats)
                    .map(|(&j, &(mu, sd))| (r[j] - mu) / sd)
                    .collect()
            })
            .collect()
    };
    (map(train), map(target))
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Design: one Gaussian kernel per center plus a constant (unpenalized).
fn basis(x: &[Vec<f64>], centers: &[Vec<f64>], sigma: f64) -> DMatrix<f64> {
    let b = centers.len() + 1;
    let denom = 2.0 * sigma * sigma;
    DMatrix::from_fn(x.len(), b, |i, k| {
        if k == centers.len() {
            1.0
        } else {
            (-sq_dist(&x[i], &centers[k]) / denom).exp()
        }
    })
}

struct Moments {
    /// Σ φφᵀ and Σ φ per fold.
    h: Vec<DMatrix<f64>>,
    g: Vec<DVector<f64>>,
    n_h: Vec<usize>,
    n_g: Vec<usize>,
}

fn fold_moments(phi_train: &DMatrix<f64>, phi_target: &DMatrix<f64>) -> Moments {
    let b = phi_train.ncols();
    let mut h = vec![DMatrix::zeros(b, b); FOLDS];
    let mut g = vec![DVector::zeros(b); FOLDS];
    let mut n_h = vec![0; FOLDS];
    let mut n_g = vec![0; FOLDS];
    for k in 0..FOLDS {
        let rows: Vec<usize> = (k..phi_train.nrows()).step_by(FOLDS).collect();
        let sub = phi_train.select_rows(&rows);
        h[k] = sub.transpose() * &sub;
        n_h[k] = rows.len();
        let trows: Vec<usize> = (k..phi_target.nrows()).step_by(FOLDS).collect();
        let tsub = phi_target.select_rows(&trows);
        g[k] = tsub.row_sum().transpose();
        n_g[k] = trows.len();
    }
    Moments { h, g, n_h, n_g }
}

/// α = (H + λR)⁻¹ h with R the identity on kernel coefficients and zero on
/// the constant.
fn solve(h: &DMatrix<f64>, g: &DVector<f64>, lambda: f64) -> Result<DVector<f64>, EnsembleError> {
    let b = h.nrows();
    let mut a = h.clone();
    for k in 0..b - 1 {
        a[(k, k)] += lambda;
    }
    a.clone()
        .cholesky()
        .map(|c| c.solve(g))
        .or_else(|| a.lu().solve(g))
        .ok_or(EnsembleError::DegenerateKernel)
}

/// Nonnegative weights with mean 1, one per training row.
pub fn importance_weights(
    train: &[Vec<f64>],
    target: &[Vec<f64>],
    opts: ImportanceOptions,
) -> Result<Vec<f64>, EnsembleError> {
    if train.is_empty() || target.is_empty() {
        return Err(EnsembleError::Input(
            "importance weighting needs non-empty train and target sets".into(),
        ));
    }
    let d = train[0].len();
    if train
        .iter()
        .chain(target)
        .any(|r| r.len() != d || r.iter().any(|v| !v.is_finite()))
    {
        return Err(EnsembleError::Input(
            "feature rows must share one finite dimension".into(),
        ));
    }
    let (xs, xt) = standardize(train, target);
    if xs[0].is_empty() {
        return Ok(vec![1.0; train.len()]);
    }

    let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);
    let n_centers = MAX_CENTERS.min(xt.len());
    let mut idx = sample(&mut rng, xt.len(), n_centers).into_vec();
    idx.sort_unstable();
    let centers: Vec<Vec<f64>> = idx.iter().map(|&i| xt[i].clone()).collect();

    // Median pairwise distance among centers anchors the width grid.
    let mut dists: Vec<f64> = Vec::new();
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            dists.push(sq_dist(&centers[i], &centers[j]).sqrt());
        }
    }
    dists.retain(|v| *v > 0.0);
    dists.sort_by(f64::total_cmp);
    let median = dists.get(dists.len() / 2).copied().unwrap_or(1.0);

    let mut best: Option<(f64, f64, f64)> = None;
    for m in WIDTH_MULTIPLIERS {
        let sigma = median * m;
        let phi_s = basis(&xs, &centers, sigma);
        let phi_t = basis(&xt, &centers, sigma);
        let mom = fold_moments(&phi_s, &phi_t);
        let h_all: DMatrix<f64> = mom
            .h
            .iter()
            .fold(DMatrix::zeros(phi_s.ncols(), phi_s.ncols()), |a, b| a + b);
        let g_all: DVector<f64> = mom
            .g
            .iter()
            .fold(DVector::zeros(phi_s.ncols()), |a, b| a + b);
        let n_s: usize = mom.n_h.iter().sum();
        let n_t: usize = mom.n_g.iter().sum();
        for lambda in RIDGE_GRID {
            let mut score = 0.0;
            for k in 0..FOLDS {
                if mom.n_h[k] == 0 || mom.n_g[k] == 0 || n_s == mom.n_h[k] || n_t == mom.n_g[k] {
                    continue;
                }
                let h = (&h_all - &mom.h[k]) / (n_s - mom.n_h[k]) as f64;
                let g = (&g_all - &mom.g[k]) / (n_t - mom.n_g[k]) as f64;
                let alpha = solve(&h, &g, lambda)?;
                // Held-out least-squares objective ½ E_train[w²] − E_target[w].
                let quad = (alpha.transpose() * &mom.h[k] * &alpha)[(0, 0)] / mom.n_h[k] as f64;
                let lin = alpha.dot(&mom.g[k]) / mom.n_g[k] as f64;
                score += 0.5 * quad - lin;
            }
            if best.is_none_or(|(s, _, _)| score < s) {
                best = Some((score, sigma, lambda));
            }
        }
    }
    let (_, sigma, lambda) = best.ok_or(EnsembleError::DegenerateKernel)?;
    let phi_s = basis(&xs, &centers, sigma);
    let phi_t = basis(&xt, &centers, sigma);
    let h = phi_s.transpose() * &phi_s / xs.len() as f64;
    let g = phi_t.row_sum().transpose() / xt.len() as f64;
    let alpha = solve(&h, &g, lambda)?;
    let mut w: Vec<f64> = (&phi_s * alpha).iter().map(|v| v.max(0.0)).collect();
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    if !(mean > 0.0) {
        return Err(EnsembleError::DegenerateKernel);
    }
    w.iter_mut().for_each(|v| *v /= mean);
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_features_give_unit_weights() {
        let a = vec![vec![1.0, 2.0]; 20];
        let b = vec![vec![1.0, 2.0]; 7];
        assert_eq!(
            importance_weights(&a, &b, ImportanceOptions::default()).unwrap(),
            vec![1.0; 20]
        );
    }
}
