#![allow(dead_code)]

pub mod cohorts;
pub mod irls;
pub mod metric_fixture;
pub mod peeling;
pub mod projection;
pub mod tables;

use rand::Rng;
use std::path::PathBuf;

use riskfuse_core::pedigree::{
    Biopsies, EthnicityFlags, GeneticTest, Hyperplasia, Pedigree, Race, Relation, Relative,
    RiskFactors, Sex,
};
use riskfuse_core::ParameterSet;

pub fn params_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../params/default")
}

pub fn params() -> ParameterSet {
    ParameterSet::load(params_dir()).expect("shipped parameters load")
}

pub const NON_PROBAND: [Relation; 14] = [
    Relation::Mother,
    Relation::Father,
    Relation::Sister,
    Relation::Brother,
    Relation::Daughter,
    Relation::Son,
    Relation::MaternalGrandmother,
    Relation::MaternalGrandfather,
    Relation::PaternalGrandmother,
    Relation::PaternalGrandfather,
    Relation::MaternalAunt,
    Relation::MaternalUncle,
    Relation::PaternalAunt,
    Relation::PaternalUncle,
];

/// A member with random age, cancers, surgeries and (rarely) a test result.
pub fn random_member<R: Rng>(
    rng: &mut R,
    id: u32,
    relation: Relation,
    ashkenazi: bool,
) -> Relative {
    let sex = relation.implied_sex().unwrap_or(Sex::Female);
    let age = match relation {
        Relation::Proband => rng.random_range(25..=70),
        Relation::Daughter | Relation::Son => rng.random_range(1..=45),
        _ => rng.random_range(20..=94),
    };
    let mut m = Relative::new(id, relation, sex, age);
    m.race = Race::White;
    m.ethnicity_flags = EthnicityFlags { ashkenazi };
    m.alive = relation == Relation::Proband || rng.random_bool(0.6);
    if relation != Relation::Proband && rng.random_bool(0.35) {
        m.breast_cancer = Some(rng.random_range(1..=age));
    }
    if sex == Sex::Female && rng.random_bool(0.15) {
        m.ovarian_cancer = Some(rng.random_range(1..=age));
    }
    if rng.random_bool(0.1) {
        let lo = m.breast_cancer.unwrap_or(1).max(1);
        m.prophylactic_mastectomy_age = Some(rng.random_range(lo..=age));
    }
    if sex == Sex::Female && rng.random_bool(0.1) {
        let lo = m.ovarian_cancer.unwrap_or(1).max(1);
        m.prophylactic_oophorectomy_age = Some(rng.random_range(lo..=age));
    }
    if rng.random_bool(0.08) {
        m.genetic_test = Some(match rng.random_range(0..4) {
            0 => GeneticTest::Negative,
            1 => GeneticTest::Brca1Positive,
            2 => GeneticTest::Brca2Positive,
            _ => GeneticTest::BothPositive,
        });
    }
    m
}

/// A random valid pedigree with `n` members (proband included); unique
/// relations are drawn at most once.
pub fn random_pedigree<R: Rng>(rng: &mut R, n: usize) -> Pedigree {
    let ashkenazi = rng.random_bool(0.5);
    let mut members = vec![random_member(rng, 0, Relation::Proband, ashkenazi)];
    while members.len() < n {
        let rel = NON_PROBAND[rng.random_range(0..NON_PROBAND.len())];
        if rel.is_unique() && members.iter().any(|m| m.relation == rel) {
            continue;
        }
        members.push(random_member(rng, members.len() as u32, rel, ashkenazi));
    }
    Pedigree::new(None, members).expect("generated pedigree is valid")
}

pub fn random_factors<R: Rng>(rng: &mut R) -> RiskFactors {
    RiskFactors {
        age_at_menarche: [None, Some(11), Some(13), Some(15)][rng.random_range(0..4)],
        num_biopsies: [
            Biopsies::Zero,
            Biopsies::One,
            Biopsies::TwoOrMore,
            Biopsies::Unknown,
        ][rng.random_range(0..4)],
        age_first_live_birth: rng.random_range(15..=40),
        affected_first_degree: rng.random_range(0..=3),
        atypical_hyperplasia: [Hyperplasia::No, Hyperplasia::Yes, Hyperplasia::Unknown]
            [rng.random_range(0..3)],
    }
}
