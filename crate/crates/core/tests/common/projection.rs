//! Monte-Carlo cumulative incidence of simulated yearly lifetimes, compared
//! with the closed-form projections.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use riskfuse_core::combine::modified_noncarrier_risk;
use riskfuse_core::normalized_relative_hazard;
use riskfuse_core::pedigree::Race;
use riskfuse_core::{genotype_future_risk, Genotype, ParameterSet};

pub const LIFETIMES: u64 = 10_000_000;
const CHUNK: u64 = 100_000;

/// Share of `LIFETIMES` women, alive and unaffected at `a`, who develop
/// breast cancer by `a + τ` given per-age (breast, death) probabilities.
pub fn monte_carlo(a: u32, tau: u32, yearly: impl Fn(u32) -> (f64, f64) + Sync, seed: u64) -> f64 {
    let table: Vec<(f64, f64)> = (a + 1..=a + tau).map(&yearly).collect();
    let cases: u64 = (0..LIFETIMES / CHUNK)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let mut n = 0;
            for _ in 0..CHUNK {
                for &(b, d) in &table {
                    let u: f64 = rng.random();
                    if u < b {
                        n += 1;
                        break;
                    }
                    if u < b + d {
                        break;
                    }
                }
            }
            n
        })
        .sum();
    cases as f64 / LIFETIMES as f64
}

pub fn within_3se(exact: f64, mc: f64) -> bool {
    let se = (mc * (1.0 - mc) / LIFETIMES as f64)
        .sqrt()
        .max(1.0 / LIFETIMES as f64);
    (exact - mc).abs() <= 3.0 * se
}

pub fn check_configs(params: &ParameterSet, seed: u64) -> Vec<String> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let race = Race::White;
    let h = |g| params.penetrance.breast_hazard(g, race).unwrap();
    let hd = params.penetrance.mortality(race).unwrap();
    let mut failures = Vec::new();
    for k in 0..10u64 {
        let a = rng.random_range(20..=70);
        let tau = rng.random_range(1..=(90 - a).min(20));
        let g = Genotype::ALL[rng.random_range(0..4)];
        let exact = genotype_future_risk(&params.penetrance, g, race, a, tau).unwrap();
        let hb = h(g);
        let mc = monte_carlo(a, tau, |t| (hb[t as usize - 1], hd[t as usize - 1]), 2 * k);
        if !within_3se(exact, mc) {
            failures.push(format!(
                "genotype {g:?} a={a} tau={tau}: exact {exact} vs {mc}"
            ));
        }

        let x = super::random_factors(&mut rng);
        let coeffs = params.relhaz.for_race(race).unwrap();
        let exact = modified_noncarrier_risk(params, race, &x, a, tau).unwrap();
        let h0 = h(Genotype::NonCarrier);
        let mc = monte_carlo(
            a,
            tau,
            |t| {
                let r =
                    normalized_relative_hazard(t as f64, &x, coeffs, &params.normalization, race)
                        .unwrap();
                (1.0 - (1.0 - h0[t as usize - 1]).powf(r), hd[t as usize - 1])
            },
            2 * k + 1,
        );
        if !within_3se(exact, mc) {
            failures.push(format!(
                "modified a={a} tau={tau} x={x:?}: exact {exact} vs {mc}"
            ));
        }
    }
    failures
}
