//! Synthetic follow-up with known outcome models.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use riskfuse_core::{EventType, FollowUp};

/// Uncensored outcomes drawn from a known logistic stack.
pub fn uncensored_cohort(n: usize, taus: &[u32], seed: u64) -> (Vec<FollowUp>, Vec<Vec<[f64; 2]>>) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let last = *taus.last().unwrap() as f64;
    let mut cohort = Vec::with_capacity(n);
    let mut preds = Vec::with_capacity(n);
    for i in 0..n {
        let p1: f64 = rng.random_range(0.001..0.3);
        let p2: f64 = rng.random_range(0.001..0.2);
        let (s1, s2) = (p1.sqrt(), p2.sqrt());
        let eta = -2.5 + 3.0 * s1 + 4.0 * s2 + 2.0 * s1 * s2;
        let case = rng.random_bool(1.0 / (1.0 + (-eta).exp()));
        let (followup, event) = if case {
            (
                rng.random_range(1..=taus.len()) as f64 * last / taus.len() as f64,
                EventType::Breast,
            )
        } else {
            (last + 5.0, EventType::Censored)
        };
        cohort.push(FollowUp {
            id: i.to_string(),
            followup,
            event,
            stratum: None,
        });
        preds.push(
            taus.iter()
                .map(|&t| [p1 * t as f64 / last, p2 * t as f64 / last])
                .collect(),
        );
    }
    (cohort, preds)
}
