//! A censored evaluation fixture small enough to score by hand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use riskfuse_core::ensemble::censoring::stratum_key;
use riskfuse_core::ensemble::km_censoring;
use riskfuse_core::eval::{prepare_records, EvalRecord};
use riskfuse_core::{EventType, FollowUp};

pub const TAU: f64 = 5.0;

pub fn follow(id: &str, followup: f64, event: EventType) -> FollowUp {
    FollowUp {
        id: id.into(),
        followup,
        event,
        stratum: None,
    }
}

/// Eight probands, τ = 5. Kaplan–Meier censoring survivor: 7/8 from t = 1,
/// 7/10 from t = 3 (the death tied at 3 leaves the risk set first), 7/20
/// from t = 6.
pub fn fixture() -> (Vec<f64>, Vec<EvalRecord>) {
    use EventType::*;
    let cohort = vec![
        follow("A", 1.0, Censored), // unknown at τ
        follow("B", 2.0, Breast),   // case, weight 8/7
        follow("C", 3.0, Censored), // unknown at τ
        follow("G", 3.0, Death),    // control, weight 8/7
        follow("D", 4.0, Breast),   // case, weight 10/7
        follow("E", 6.0, Censored), // control, weight 10/7
        follow("F", 7.0, Death),    // control, weight 10/7
        follow("H", 8.0, Breast),   // control at τ, weight 10/7
    ];
    let g = km_censoring(&cohort, stratum_key).unwrap();
    let recs = prepare_records(&cohort, |i| cohort[i].id.clone(), TAU, &g).unwrap();
    let p = vec![0.10, 0.30, 0.20, 0.25, 0.15, 0.05, 0.30, 0.40];
    (p, recs)
}

pub fn close(actual: f64, expected: f64) -> bool {
    (actual - expected).abs() <= 4.0 * f64::EPSILON * expected.abs().max(1.0)
}

/// A cohort with independent uniform censoring and exponential event times.
pub fn censored_cohort(n: usize, seed: u64) -> (Vec<FollowUp>, Vec<f64>) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut cohort = Vec::with_capacity(n);
    let mut risk = Vec::with_capacity(n);
    for i in 0..n {
        let rate: f64 = rng.random_range(0.005..0.08);
        let t_event = -rng.random::<f64>().ln() / rate;
        let t_death = -rng.random::<f64>().ln() / 0.01;
        let c: f64 = rng.random_range(1.0..12.0);
        let (t, e) = if t_event.min(t_death) > c {
            (c, EventType::Censored)
        } else if t_event < t_death {
            (t_event, EventType::Breast)
        } else {
            (t_death, EventType::Death)
        };
        cohort.push(follow(&i.to_string(), t, e));
        risk.push(1.0 - (-rate * TAU).exp());
    }
    (cohort, risk)
}

pub fn records(cohort: &[FollowUp]) -> Vec<EvalRecord> {
    let g = km_censoring(cohort, stratum_key).unwrap();
    prepare_records(cohort, |i| cohort[i].id.clone(), TAU, &g).unwrap()
}
