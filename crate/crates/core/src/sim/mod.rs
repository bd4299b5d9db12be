//! Cohort simulator: pedigrees with Mendelian genotypes, penetrance-driven
//! baseline phenotypes, sampled covariates, and future outcomes generated
//! by the combined model.
//!
//! Every family draws from its own ChaCha stream (master seed, stream =
//! family index), so parallel and serial generation agree and output order
//! is the family index.

pub mod family;
pub mod outcome;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::Normal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cohort::{CohortRecord, EventType};
use crate::combine::CombineOptions;
use crate::params::{ParamError, ParameterSet};
use crate::pedigree::{
    count_affected_first_degree, Biopsies, Hyperplasia, Pedigree, PedigreeError, Race, Relation,
    RiskFactors, NULLIPAROUS_FIRST_BIRTH_AGE,
};
use family::{assign_phenotypes, simulate_family, to_relatives};
use outcome::{outcome_hazards, simulate_outcome};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Pedigree(#[from] PedigreeError),
    #[error(transparent)]
    Mendelian(#[from] crate::mendelian::MendelianError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapParams {
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalParams {
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgeBandWeight {
    pub min: u32,
    pub max: u32,
    pub probability: f64,
}

/// Categorical count distributions, as (count, probability) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureConfig {
    pub parent_present: f64,
    pub grandparent_present: f64,
    pub sisters: Vec<(u32, f64)>,
    pub brothers: Vec<(u32, f64)>,
    pub daughters: Vec<(u32, f64)>,
    pub sons: Vec<(u32, f64)>,
    pub maternal_aunts: Vec<(u32, f64)>,
    pub maternal_uncles: Vec<(u32, f64)>,
    pub paternal_aunts: Vec<(u32, f64)>,
    pub paternal_uncles: Vec<(u32, f64)>,
}

/// Category probabilities for the covariates sampled independently of the
/// pedigree. Menarche values are ages (`null` for unknown).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariateConfig {
    pub age_at_menarche: Vec<(Option<u32>, f64)>,
    pub num_biopsies: Vec<(Biopsies, f64)>,
    pub atypical_hyperplasia: Vec<(Hyperplasia, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub schema_version: u32,
    pub race: Race,
    pub ashkenazi: bool,
    /// Overrides the parameter set's allele frequencies, as [BRCA1, BRCA2].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allele_frequencies: Option<[f64; 2]>,
    pub proband_age: Vec<AgeBandWeight>,
    pub parent_gap: GapParams,
    pub death_age: NormalParams,
    pub structure: StructureConfig,
    pub covariates: CovariateConfig,
    pub tau: u32,
    /// Probands kept for training; the rest form the validation set.
    #[serde(default)]
    pub n_train: usize,
}

fn check_probs(name: &str, ps: impl Iterator<Item = f64>) -> Result<(), SimError> {
    let ps: Vec<f64> = ps.collect();
    if ps.is_empty()
        || ps.iter().any(|p| !(0.0..=1.0).contains(p))
        || ((ps.iter().sum::<f64>() - 1.0).abs() > 1e-9)
    {
        return Err(SimError::Config(format!(
            "{name}: probabilities must lie in [0,1] and sum to 1"
        )));
    }
    Ok(())
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.schema_version != 1 {
            return Err(SimError::Config(format!(
                "unsupported schema_version {}",
                self.schema_version
            )));
        }
        check_probs(
            "proband_age",
            self.proband_age.iter().map(|b| b.probability),
        )?;
        for b in &self.proband_age {
            if b.min < 20 || b.min > b.max || b.max + self.tau > 90 {
                return Err(SimError::Config(format!(
                    "proband age band {}..={} must lie in 20.. with age + tau <= 90",
                    b.min, b.max
                )));
            }
        }
        let s = &self.structure;
        for (name, d) in [
            ("sisters", &s.sisters),
            ("brothers", &s.brothers),
            ("daughters", &s.daughters),
            ("sons", &s.sons),
            ("maternal_aunts", &s.maternal_aunts),
            ("maternal_uncles", &s.maternal_uncles),
            ("paternal_aunts", &s.paternal_aunts),
            ("paternal_uncles", &s.paternal_uncles),
        ] {
            check_probs(name, d.iter().map(|e| e.1))?;
        }
        for (name, p) in [
            ("parent_present", s.parent_present),
            ("grandparent_present", s.grandparent_present),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SimError::Config(format!("{name} must lie in [0,1]")));
            }
        }
        let c = &self.covariates;
        check_probs("age_at_menarche", c.age_at_menarche.iter().map(|e| e.1))?;
        check_probs("num_biopsies", c.num_biopsies.iter().map(|e| e.1))?;
        check_probs(
            "atypical_hyperplasia",
            c.atypical_hyperplasia.iter().map(|e| e.1),
        )?;
        let g = &self.parent_gap;
        if !(g.sd > 0.0 && g.mean > 0.0 && g.min < g.max && g.min >= 1.0) {
            return Err(SimError::Config(
                "parent_gap needs positive mean/sd and 1 <= min < max".into(),
            ));
        }
        if !(self.death_age.sd > 0.0 && self.death_age.mean > 0.0) {
            return Err(SimError::Config(
                "death_age needs positive mean and sd".into(),
            ));
        }
        if self.tau == 0 {
            return Err(SimError::Config("tau must be positive".into()));
        }
        if let Some(q) = self.allele_frequencies {
            if q.iter().any(|v| !(0.0..0.5).contains(v)) {
                return Err(SimError::Config(
                    "allele frequencies must lie in [0, 0.5)".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn allele_frequencies(&self, params: &ParameterSet) -> [f64; 2] {
        self.allele_frequencies
            .unwrap_or_else(|| params.penetrance.alleles().for_ethnicity(self.ashkenazi))
    }
}

/// Normal truncated to [min, max] by rejection, rounded to whole years.
#[derive(Debug, Clone, Copy)]
pub struct TruncatedNormal {
    normal: Normal<f64>,
    min: f64,
    max: f64,
}

impl TruncatedNormal {
    pub fn new(mean: f64, sd: f64, min: f64, max: f64) -> Self {
        TruncatedNormal {
            normal: Normal::new(mean, sd).expect("validated normal parameters"),
            min,
            max,
        }
    }

    pub fn sample_years<R: Rng>(&self, rng: &mut R) -> i32 {
        loop {
            let v = self.normal.sample(rng);
            if (self.min..=self.max).contains(&v) {
                return v.round() as i32;
            }
        }
    }
}

/// One simulated proband with her pedigree, covariates, outcome and the
/// latent genotypes of the reported members (in pedigree member order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedProband {
    #[serde(flatten)]
    pub record: CohortRecord,
    pub latent_genotypes: Vec<u8>,
}

fn pick<T: Copy, R: Rng>(dist: &[(T, f64)], rng: &mut R) -> T {
    let w = WeightedIndex::new(dist.iter().map(|e| e.1)).expect("validated weights");
    dist[w.sample(rng)].0
}

/// Simulates family `index`; `Ok(None)` when the proband already has breast
/// cancer at baseline and is excluded.
pub fn simulate_proband(
    cfg: &SimConfig,
    params: &ParameterSet,
    seed: u64,
    index: u64,
) -> Result<Option<SimulatedProband>, SimError> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let q = cfg.allele_frequencies(params);
    let mut fam = simulate_family(cfg, q, &mut rng);
    assign_phenotypes(&mut fam, &params.penetrance, cfg, &mut rng)?;
    if fam.members[0].breast_cancer.is_some() {
        return Ok(None);
    }
    let rows = to_relatives(&fam, cfg);
    let latent_genotypes = rows
        .iter()
        .map(|(i, _)| fam.members[*i].genotype().code())
        .collect();
    let pedigree = Pedigree::new(
        Some(format!("F{index:07}")),
        rows.into_iter().map(|(_, r)| r).collect(),
    )?;

    let baseline_age = pedigree.proband().age();
    // Eldest live-born child fixes the age at first birth.
    let eldest = pedigree
        .members()
        .iter()
        .filter(|m| matches!(m.relation, Relation::Daughter | Relation::Son))
        .map(|m| m.age())
        .max();
    let x = RiskFactors {
        age_at_menarche: pick(&cfg.covariates.age_at_menarche, &mut rng),
        num_biopsies: pick(&cfg.covariates.num_biopsies, &mut rng),
        age_first_live_birth: eldest.map_or(NULLIPAROUS_FIRST_BIRTH_AGE, |c| baseline_age - c),
        affected_first_degree: count_affected_first_degree(&pedigree),
        atypical_hyperplasia: pick(&cfg.covariates.atypical_hyperplasia, &mut rng),
    };
    let genotype = fam.members[0].genotype();
    let hazards = outcome_hazards(
        params,
        genotype,
        cfg.race,
        &x,
        baseline_age,
        cfg.tau,
        &CombineOptions::default(),
    )?;
    let (followup, event) = simulate_outcome(&hazards, &mut rng);
    Ok(Some(SimulatedProband {
        record: CohortRecord {
            id: format!("P{index:07}"),
            baseline_age,
            pedigree,
            risk_factors: x,
            followup,
            event,
            stratum: None,
        },
        latent_genotypes,
    }))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub families: u64,
    pub excluded_baseline_breast_cancer: u64,
    pub probands: u64,
    pub breast_events: u64,
    pub deaths: u64,
    pub carriers: u64,
    pub train: u64,
    pub validation: u64,
}

impl SimSummary {
    pub fn add(&mut self, p: &SimulatedProband) {
        self.probands += 1;
        match p.record.event {
            EventType::Breast => self.breast_events += 1,
            EventType::Death => self.deaths += 1,
            EventType::Censored => {}
        }
        if p.latent_genotypes[0] != 0 {
            self.carriers += 1;
        }
    }
}

/// Families `range` in index order. Excluded baseline cases are `None`.
pub fn simulate_range(
    cfg: &SimConfig,
    params: &ParameterSet,
    seed: u64,
    range: std::ops::Range<u64>,
) -> Result<Vec<Option<SimulatedProband>>, SimError> {
    cfg.validate()?;
    range
        .into_par_iter()
        .map(|i| simulate_proband(cfg, params, seed, i))
        .collect()
}

/// Simulates `n` families and returns the kept probands with a summary.
pub fn simulate_cohort(
    n: u64,
    cfg: &SimConfig,
    params: &ParameterSet,
    seed: u64,
) -> Result<(Vec<SimulatedProband>, SimSummary), SimError> {
    if n == 0 {
        return Err(SimError::Config("n must be at least 1".into()));
    }
    let all = simulate_range(cfg, params, seed, 0..n)?;
    let mut summary = SimSummary {
        families: n,
        ..Default::default()
    };
    let mut kept = Vec::with_capacity(all.len());
    for p in all {
        match p {
            Some(p) => {
                summary.add(&p);
                kept.push(p);
            }
            None => summary.excluded_baseline_breast_cancer += 1,
        }
    }
    summary.train = (kept.len() as u64).min(cfg.n_train as u64);
    summary.validation = kept.len() as u64 - summary.train;
    Ok((kept, summary))
}
