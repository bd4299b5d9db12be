//! Mendelian carrier model: BRCA1/2 carrier posterior from the pedigree and
//! genotype-specific breast cancer risk under competing mortality.

pub mod hazard;
pub mod peeling;

use serde::{Deserialize, Serialize};

use crate::params::{ParamError, PenetranceTable};
use crate::pedigree::{Pedigree, Race, Sex};
use crate::MAX_AGE;

pub use hazard::{hazard_from_penetrance, penetrance_from_hazard};
pub use peeling::{carrier_posterior, member_likelihood, Transmission};

#[derive(Debug, thiserror::Error)]
pub enum MendelianError {
    #[error("parameter integrity at age {age}: {message}")]
    Integrity { age: u32, message: String },
    #[error("horizon beyond table support: age {a} + {tau} years exceeds {MAX_AGE}")]
    Horizon { a: u32, tau: u32 },
    #[error("pedigree evidence is inconsistent with every genotype assignment")]
    InconsistentEvidence,
    #[error("proband already has breast cancer at age {onset}")]
    ProbandAffected { onset: u32 },
    #[error("breast risk projection requires a female proband")]
    ProbandSex,
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// BRCA1/2 carrier genotype.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Genotype {
    NonCarrier = 0,
    Brca1 = 1,
    Brca2 = 2,
    Both = 3,
}

impl Genotype {
    pub const ALL: [Genotype; 4] = [
        Genotype::NonCarrier,
        Genotype::Brca1,
        Genotype::Brca2,
        Genotype::Both,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_code(code: u8) -> Option<Genotype> {
        Genotype::ALL.get(code as usize).copied()
    }

    /// Carrier status at (BRCA1, BRCA2).
    pub fn carrier_bits(self) -> [bool; 2] {
        let c = self.code();
        [c & 1 == 1, c & 2 == 2]
    }

    pub fn from_bits(brca1: bool, brca2: bool) -> Genotype {
        Genotype::ALL[brca1 as usize + 2 * brca2 as usize]
    }

    pub fn is_carrier(self) -> bool {
        self != Genotype::NonCarrier
    }
}

/// Posterior probability of each genotype for the proband.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenotypePosterior {
    pub probs: [f64; 4],
}

impl GenotypePosterior {
    pub fn point(g: Genotype) -> Self {
        let mut probs = [0.0; 4];
        probs[g.index()] = 1.0;
        GenotypePosterior { probs }
    }

    pub fn get(&self, g: Genotype) -> f64 {
        self.probs[g.index()]
    }

    pub fn carrier_probability(&self) -> f64 {
        1.0 - self.probs[0]
    }
}

pub(crate) fn check_horizon(a: u32, tau: u32) -> Result<(), MendelianError> {
    if a < 1 || a + tau > MAX_AGE {
        return Err(MendelianError::Horizon { a, tau });
    }
    Ok(())
}

/// Probability of breast cancer in (a, a + τ] for a woman of genotype γ who
/// is alive and unaffected at age a.
pub fn genotype_future_risk(
    table: &PenetranceTable,
    genotype: Genotype,
    race: Race,
    a: u32,
    tau: u32,
) -> Result<f64, MendelianError> {
    check_horizon(a, tau)?;
    let hb = table.breast_hazard(genotype, race)?;
    let hd = table.mortality(race)?;
    let at = |v: &[f64], t: u32| v[(t - 1) as usize];
    hazard::cumulative_incidence(a, tau, |t| at(hb, t), |t| 1.0 - at(hb, t) - at(hd, t))
}

/// Genotype-specific risks for all four genotypes.
pub fn genotype_risks(
    table: &PenetranceTable,
    race: Race,
    a: u32,
    tau: u32,
) -> Result<[f64; 4], MendelianError> {
    let mut out = [0.0; 4];
    for g in Genotype::ALL {
        out[g.index()] = genotype_future_risk(table, g, race, a, tau)?;
    }
    Ok(out)
}

pub(crate) fn check_risk_proband(p: &Pedigree, a: u32) -> Result<(), MendelianError> {
    let proband = p.proband();
    if proband.sex != Sex::Female {
        return Err(MendelianError::ProbandSex);
    }
    if let Some(onset) = proband.breast_cancer {
        if onset <= a {
            return Err(MendelianError::ProbandAffected { onset });
        }
    }
    Ok(())
}

/// BRCAPRO risk: genotype-specific risks mixed over the carrier posterior.
pub fn brcapro_risk(
    p: &Pedigree,
    table: &PenetranceTable,
    a: u32,
    tau: u32,
) -> Result<f64, MendelianError> {
    check_risk_proband(p, a)?;
    let post = carrier_posterior(p, table)?;
    let risks = genotype_risks(table, p.proband().race, a, tau)?;
    Ok((0..4).map(|g| post.probs[g] * risks[g]).sum())
}
