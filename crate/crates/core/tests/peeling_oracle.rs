//! Carrier posteriors against brute-force enumeration of every genotype
//! configuration of the full three-generation skeleton.

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::time::Instant;

use common::peeling::{enumerate, non_skeleton};
use riskfuse_core::carrier_posterior;
use riskfuse_core::mendelian::MendelianError;
use riskfuse_core::pedigree::{Pedigree, Relation};

#[test]
fn posterior_matches_enumeration_on_random_pedigrees() {
    let params = common::params();
    let table = &params.penetrance;
    let mut rng = ChaCha20Rng::seed_from_u64(0xb1a5);
    let start = Instant::now();
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    while checked < 500 {
        let size = rng.random_range(1..=6);
        let p = common::random_pedigree(&mut rng, size);
        // Keeps the enumeration at most 4^11 configurations.
        if non_skeleton(&p) > 3 {
            continue;
        }
        let oracle = enumerate(&p, table);
        match (carrier_posterior(&p, table), oracle) {
            (Ok(post), Some(o)) => {
                for g in 0..4 {
                    worst = worst.max((post.probs[g] - o[g]).abs());
                }
            }
            (Err(MendelianError::InconsistentEvidence), None) => {}
            (got, want) => panic!("disagreement on {}: {got:?} vs {want:?}", p.to_json()),
        }
        checked += 1;
    }
    assert!(worst < 1e-10, "max abs difference {worst:e}");
    assert!(start.elapsed().as_secs() < 60, "took {:?}", start.elapsed());
}

#[test]
fn proband_only_posterior_is_likelihood_weighted_prior() {
    let params = common::params();
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let p = Pedigree::proband_only(common::random_member(&mut rng, 0, Relation::Proband, false))
        .unwrap();
    let post = carrier_posterior(&p, &params.penetrance).unwrap();
    let o = enumerate(&p, &params.penetrance).unwrap();
    for g in 0..4 {
        assert!((post.probs[g] - o[g]).abs() < 1e-14);
    }
}
