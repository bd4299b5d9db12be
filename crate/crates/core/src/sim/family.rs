//! Family structure, genotypes and baseline phenotypes.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Normal;

use super::{SimConfig, TruncatedNormal};
use crate::mendelian::Genotype;
use crate::params::{Cancer, PenetranceKey, PenetranceTable};
use crate::pedigree::{EthnicityFlags, Relation, Relative, Sex};
use crate::MAX_AGE;

/// Alleles at (BRCA1, BRCA2), two copies each; `true` is a variant.
pub type Alleles = [[bool; 2]; 2];

pub fn genotype_of(a: &Alleles) -> Genotype {
    Genotype::from_bits(a[0][0] || a[0][1], a[1][0] || a[1][1])
}

/// One simulated individual. Ages are on the proband's baseline date.
#[derive(Debug, Clone)]
pub struct SimMember {
    pub relation: Relation,
    pub sex: Sex,
    /// Age the member would have at baseline if alive (may be ≤ 0 for
    /// children not yet born; such members are never reported).
    pub age_at_baseline: i32,
    pub alleles: Alleles,
    pub death_age: Option<u32>,
    pub breast_cancer: Option<u32>,
    pub ovarian_cancer: Option<u32>,
    /// Reported in the pedigree (skeleton members may be simulated but absent).
    pub present: bool,
}

impl SimMember {
    pub fn genotype(&self) -> Genotype {
        genotype_of(&self.alleles)
    }

    /// Observed age: age at baseline, or age at death if earlier.
    pub fn observed_age(&self) -> u32 {
        let a = self.age_at_baseline.max(0) as u32;
        self.death_age.map_or(a, |d| d.min(a)).min(MAX_AGE)
    }

    pub fn alive(&self) -> bool {
        self.death_age
            .is_none_or(|d| d >= self.age_at_baseline.max(0) as u32)
    }
}

#[derive(Debug, Clone)]
pub struct SimFamily {
    /// Proband first.
    pub members: Vec<SimMember>,
}

fn founder<R: Rng>(q: [f64; 2], rng: &mut R) -> Alleles {
    std::array::from_fn(|l| [rng.random_bool(q[l]), rng.random_bool(q[l])])
}

/// Each parent passes one uniformly chosen allele per locus.
pub fn transmit<R: Rng>(mother: &Alleles, father: &Alleles, rng: &mut R) -> Alleles {
    std::array::from_fn(|l| {
        [
            mother[l][rng.random_range(0..2)],
            father[l][rng.random_range(0..2)],
        ]
    })
}

fn sample_count<R: Rng>(dist: &[(u32, f64)], rng: &mut R) -> u32 {
    if dist.is_empty() {
        return 0;
    }
    let w = WeightedIndex::new(dist.iter().map(|d| d.1)).expect("validated weights");
    dist[w.sample(rng)].0
}

fn sample_age<R: Rng>(cfg: &SimConfig, rng: &mut R) -> i32 {
    let bands = &cfg.proband_age;
    let w = WeightedIndex::new(bands.iter().map(|b| b.probability)).expect("validated weights");
    let b = &bands[w.sample(rng)];
    rng.random_range(b.min..=b.max) as i32
}

/// Structure, ages and genotypes. The three-generation skeleton (four
/// grandparents, parents, proband, spouse) is always simulated so that
/// genotypes flow through it; `present` marks who is reported.
pub fn simulate_family<R: Rng>(cfg: &SimConfig, q: [f64; 2], rng: &mut R) -> SimFamily {
    let s = &cfg.structure;
    let gap = TruncatedNormal::new(
        cfg.parent_gap.mean,
        cfg.parent_gap.sd,
        cfg.parent_gap.min,
        cfg.parent_gap.max,
    );
    let proband_age = sample_age(cfg, rng);

    let new = |relation, sex, age: i32, alleles, present| SimMember {
        relation,
        sex,
        age_at_baseline: age,
        alleles,
        death_age: None,
        breast_cancer: None,
        ovarian_cancer: None,
        present,
    };

    // Generation by generation: grandparents, parents, proband's sibship, children.
    let mother_age = proband_age + gap.sample_years(rng);
    let father_age = proband_age + gap.sample_years(rng);
    let mgm_age = mother_age + gap.sample_years(rng);
    let mgf_age = mother_age + gap.sample_years(rng);
    let pgm_age = father_age + gap.sample_years(rng);
    let pgf_age = father_age + gap.sample_years(rng);

    let mgm = founder(q, rng);
    let mgf = founder(q, rng);
    let pgm = founder(q, rng);
    let pgf = founder(q, rng);
    let mother = transmit(&mgm, &mgf, rng);
    let father = transmit(&pgm, &pgf, rng);
    let proband = transmit(&mother, &father, rng);
    let spouse = founder(q, rng);

    let mut members = vec![new(
        Relation::Proband,
        Sex::Female,
        proband_age,
        proband,
        true,
    )];
    let present = |p: f64, rng: &mut R| rng.random_bool(p);
    let add_sibship = |members: &mut Vec<SimMember>,
                       rng: &mut R,
                       rel: Relation,
                       sex: Sex,
                       count: u32,
                       m: &Alleles,
                       f: &Alleles,
                       mother_age: i32| {
        for _ in 0..count {
            let age = mother_age - gap.sample_years(rng);
            let alleles = transmit(m, f, rng);
            if age >= 1 {
                members.push(new(rel, sex, age, alleles, true));
            }
        }
    };

    let p_mgm = present(s.grandparent_present, rng);
    let p_mgf = present(s.grandparent_present, rng);
    let p_pgm = present(s.grandparent_present, rng);
    let p_pgf = present(s.grandparent_present, rng);
    let p_m = present(s.parent_present, rng);
    let p_f = present(s.parent_present, rng);
    members.push(new(
        Relation::MaternalGrandmother,
        Sex::Female,
        mgm_age,
        mgm,
        p_mgm,
    ));
    members.push(new(
        Relation::MaternalGrandfather,
        Sex::Male,
        mgf_age,
        mgf,
        p_mgf,
    ));
    members.push(new(
        Relation::PaternalGrandmother,
        Sex::Female,
        pgm_age,
        pgm,
        p_pgm,
    ));
    members.push(new(
        Relation::PaternalGrandfather,
        Sex::Male,
        pgf_age,
        pgf,
        p_pgf,
    ));
    members.push(new(Relation::Mother, Sex::Female, mother_age, mother, p_m));
    members.push(new(Relation::Father, Sex::Male, father_age, father, p_f));

    let counts = [
        (
            Relation::MaternalAunt,
            Sex::Female,
            sample_count(&s.maternal_aunts, rng),
        ),
        (
            Relation::MaternalUncle,
            Sex::Male,
            sample_count(&s.maternal_uncles, rng),
        ),
        (
            Relation::PaternalAunt,
            Sex::Female,
            sample_count(&s.paternal_aunts, rng),
        ),
        (
            Relation::PaternalUncle,
            Sex::Male,
            sample_count(&s.paternal_uncles, rng),
        ),
        (Relation::Sister, Sex::Female, sample_count(&s.sisters, rng)),
        (Relation::Brother, Sex::Male, sample_count(&s.brothers, rng)),
        (
            Relation::Daughter,
            Sex::Female,
            sample_count(&s.daughters, rng),
        ),
        (Relation::Son, Sex::Male, sample_count(&s.sons, rng)),
    ];
    for (rel, sex, count) in counts {
        let (m, f, m_age) = match rel {
            Relation::MaternalAunt | Relation::MaternalUncle => (&mgm, &mgf, mgm_age),
            Relation::PaternalAunt | Relation::PaternalUncle => (&pgm, &pgf, pgm_age),
            Relation::Sister | Relation::Brother => (&mother, &father, mother_age),
            _ => (&proband, &spouse, proband_age),
        };
        add_sibship(&mut members, rng, rel, sex, count, m, f, m_age);
    }
    SimFamily { members }
}

/// Inverse-CDF draw of an onset age from per-year penetrance restricted to
/// ages 1..=max_age; `None` means unaffected by `max_age`.
pub fn sample_onset<R: Rng>(pen: &[f64], max_age: u32, rng: &mut R) -> Option<u32> {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for t in 1..=max_age.min(pen.len() as u32) {
        acc += pen[(t - 1) as usize];
        if u < acc {
            return Some(t);
        }
    }
    None
}

/// Death ages for relatives, then onsets up to each member's observed age.
pub fn assign_phenotypes<R: Rng>(
    fam: &mut SimFamily,
    table: &PenetranceTable,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<(), crate::params::ParamError> {
    let death =
        Normal::new(cfg.death_age.mean, cfg.death_age.sd).expect("validated death-age parameters");
    for (i, m) in fam.members.iter_mut().enumerate() {
        if m.age_at_baseline < 1 {
            continue;
        }
        m.death_age = if i == 0 {
            None
        } else {
            Some(death.sample(rng).round().max(1.0) as u32)
        };
        let age = m.observed_age();
        let g = m.genotype();
        let pen = table.penetrance(PenetranceKey::new(Cancer::Breast, m.sex, g, cfg.race))?;
        m.breast_cancer = sample_onset(pen, age, rng);
        if m.sex == Sex::Female {
            let pen = table.penetrance(PenetranceKey::new(
                Cancer::Ovarian,
                Sex::Female,
                g,
                cfg.race,
            ))?;
            m.ovarian_cancer = sample_onset(pen, age, rng);
        }
    }
    Ok(())
}

/// Reported members as pedigree rows (ids in member order).
pub fn to_relatives(fam: &SimFamily, cfg: &SimConfig) -> Vec<(usize, Relative)> {
    fam.members
        .iter()
        .enumerate()
        .filter(|(_, m)| m.present && m.age_at_baseline >= 1)
        .enumerate()
        .map(|(id, (idx, m))| {
            let mut r = Relative::new(id as u32, m.relation, m.sex, m.observed_age().max(1));
            r.alive = m.alive();
            r.breast_cancer = m.breast_cancer;
            r.ovarian_cancer = m.ovarian_cancer;
            r.race = cfg.race;
            r.ethnicity_flags = EthnicityFlags {
                ashkenazi: cfg.ashkenazi,
            };
            (idx, r)
        })
        .collect()
}
