//! Model selection, eligibility rules and single-proband scoring shared by
//! the CLI commands and the service.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

use riskfuse_core::combine::{combined_risk_m, CombineOptions};
use riskfuse_core::ensemble::{predict_ensemble, FittedEnsemble};
use riskfuse_core::mendelian::{brcapro_risk, MendelianError};
use riskfuse_core::pedigree::{
    count_affected_first_degree, Biopsies, Hyperplasia, Pedigree, RiskFactors,
};
use riskfuse_core::relhaz::{bcrat_absolute_risk, RelHazError};
use riskfuse_core::{CohortRecord, ParameterSet};

use crate::error::CliError;

/// A model a caller can ask for.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelName {
    Brcapro,
    Bcrat,
    CombinedM,
    /// A loaded ensemble, by name.
    Ensemble(String),
}

impl ModelName {
    pub fn parse(s: &str) -> Option<ModelName> {
        match s {
            "brcapro" => Some(ModelName::Brcapro),
            "bcrat" => Some(ModelName::Bcrat),
            "combined_m" => Some(ModelName::CombinedM),
            _ => s
                .strip_prefix("ensemble:")
                .filter(|n| !n.is_empty())
                .map(|n| ModelName::Ensemble(n.to_string())),
        }
    }

    pub fn as_string(&self) -> String {
        match self {
            ModelName::Brcapro => "brcapro".into(),
            ModelName::Bcrat => "bcrat".into(),
            ModelName::CombinedM => "combined_m".into(),
            ModelName::Ensemble(n) => format!("ensemble:{n}"),
        }
    }

    /// Models whose inputs include the relative-hazard (BCRAT) prediction.
    pub fn uses_bcrat(&self) -> bool {
        matches!(self, ModelName::Bcrat | ModelName::Ensemble(_))
    }
}

/// Risk factors as supplied by callers. A missing affected-relative count is
/// derived from the pedigree; a supplied one must agree with it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiskFactorsInput {
    #[serde(default)]
    pub age_at_menarche: Option<u32>,
    #[serde(default = "unknown_biopsies")]
    pub num_biopsies: Biopsies,
    pub age_first_live_birth: u32,
    #[serde(default)]
    pub affected_first_degree: Option<u32>,
    #[serde(default = "unknown_hyperplasia")]
    pub atypical_hyperplasia: Hyperplasia,
}

fn unknown_biopsies() -> Biopsies {
    Biopsies::Unknown
}

fn unknown_hyperplasia() -> Hyperplasia {
    Hyperplasia::Unknown
}

impl RiskFactorsInput {
    pub fn resolve(&self, p: &Pedigree) -> Result<RiskFactors, CliError> {
        let counted = count_affected_first_degree(p);
        let x = RiskFactors {
            age_at_menarche: self.age_at_menarche,
            num_biopsies: self.num_biopsies,
            age_first_live_birth: self.age_first_live_birth,
            affected_first_degree: self.affected_first_degree.unwrap_or(counted),
            atypical_hyperplasia: self.atypical_hyperplasia,
        };
        x.check_against(p)
            .map_err(|e| CliError::field("risk_factors.affected_first_degree", e.to_string()))?;
        if !(5..=60).contains(&x.age_first_live_birth) {
            return Err(CliError::field(
                "risk_factors.age_first_live_birth",
                "must lie in 5..=60",
            ));
        }
        if let Some(m) = x.age_at_menarche {
            if !(5..=25).contains(&m) {
                return Err(CliError::field(
                    "risk_factors.age_at_menarche",
                    "must lie in 5..=25",
                ));
            }
        }
        Ok(x)
    }
}

impl From<RiskFactors> for RiskFactorsInput {
    fn from(x: RiskFactors) -> Self {
        RiskFactorsInput {
            age_at_menarche: x.age_at_menarche,
            num_biopsies: x.num_biopsies,
            age_first_live_birth: x.age_first_live_birth,
            affected_first_degree: Some(x.affected_first_degree),
            atypical_hyperplasia: x.atypical_hyperplasia,
        }
    }
}

/// Parameters and loaded ensembles.
#[derive(Debug, Clone)]
pub struct Scorer {
    pub params: Arc<ParameterSet>,
    pub ensembles: BTreeMap<String, Arc<FittedEnsemble>>,
    pub combine: CombineOptions,
}

impl Scorer {
    pub fn new(params: ParameterSet) -> Self {
        Scorer {
            params: Arc::new(params),
            ensembles: BTreeMap::new(),
            combine: CombineOptions::default(),
        }
    }

    pub fn with_ensemble(mut self, name: impl Into<String>, model: FittedEnsemble) -> Self {
        self.ensembles.insert(name.into(), Arc::new(model));
        self
    }

    /// All models this scorer can evaluate.
    pub fn models(&self) -> Vec<ModelName> {
        let mut v = vec![ModelName::Brcapro, ModelName::Bcrat, ModelName::CombinedM];
        v.extend(
            self.ensembles
                .keys()
                .map(|k| ModelName::Ensemble(k.clone())),
        );
        v
    }

    /// Checks model-specific eligibility; the error is a 422-class reason.
    pub fn eligibility(
        &self,
        model: &ModelName,
        p: &Pedigree,
        a: u32,
        tau: u32,
    ) -> Result<(), CliError> {
        if model.uses_bcrat() {
            if p.proband_known_carrier() {
                return Err(CliError::ineligible(
                    model,
                    "relative-hazard model is not recommended for known BRCA1/2 carriers",
                ));
            }
            if a < 20 || a + tau > 90 {
                return Err(CliError::ineligible(
                    model,
                    format!("relative-hazard model requires age >= 20 and age + tau <= 90 (got {a} + {tau})"),
                ));
            }
        }
        if let ModelName::Ensemble(name) = model {
            let m = self
                .ensembles
                .get(name)
                .ok_or_else(|| CliError::field("models", format!("unknown ensemble `{name}`")))?;
            if !m.supports(tau) {
                return Err(CliError::ineligible(
                    model,
                    format!(
                        "ensemble does not support tau = {tau} (grid {:?})",
                        m.tau_grid
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn brcapro(&self, p: &Pedigree, a: u32, tau: u32) -> Result<f64, CliError> {
        brcapro_risk(p, &self.params.penetrance, a, tau).map_err(mendelian_err)
    }

    pub fn bcrat(&self, p: &Pedigree, x: &RiskFactors, a: u32, tau: u32) -> Result<f64, CliError> {
        bcrat_absolute_risk(&self.params, p.proband().race, x, a as f64, tau as f64).map_err(|e| {
            match e {
                RelHazError::AgeOutOfRange { .. } => {
                    CliError::ineligible(&ModelName::Bcrat, e.to_string())
                }
                e => CliError::internal(e.to_string()),
            }
        })
    }

    pub fn combined(
        &self,
        p: &Pedigree,
        x: &RiskFactors,
        a: u32,
        tau: u32,
    ) -> Result<f64, CliError> {
        combined_risk_m(p, x, a, tau, &self.params, &self.combine).map_err(|e| match e {
            riskfuse_core::combine::CombineError::Mendelian(m) => mendelian_err(m),
            e => CliError::internal(e.to_string()),
        })
    }

    /// Risk for one model, after the eligibility check.
    pub fn score(
        &self,
        model: &ModelName,
        p: &Pedigree,
        x: &RiskFactors,
        a: u32,
        tau: u32,
    ) -> Result<f64, CliError> {
        self.eligibility(model, p, a, tau)?;
        match model {
            ModelName::Brcapro => self.brcapro(p, a, tau),
            ModelName::Bcrat => self.bcrat(p, x, a, tau),
            ModelName::CombinedM => self.combined(p, x, a, tau),
            ModelName::Ensemble(name) => {
                let m = &self.ensembles[name];
                let p1 = self.brcapro(p, a, tau)?;
                let p2 = self.bcrat(p, x, a, tau)?;
                predict_ensemble(m, p1, p2, tau).map_err(|e| CliError::internal(e.to_string()))
            }
        }
    }

    /// (BRCAPRO, BCRAT) at every horizon, for stacking.
    pub fn base_predictions(
        &self,
        r: &CohortRecord,
        taus: &[u32],
    ) -> Result<Vec<[f64; 2]>, CliError> {
        taus.iter()
            .map(|&tau| {
                Ok([
                    self.brcapro(&r.pedigree, r.baseline_age, tau)?,
                    self.bcrat(&r.pedigree, &r.risk_factors, r.baseline_age, tau)?,
                ])
            })
            .collect()
    }
}

fn mendelian_err(e: MendelianError) -> CliError {
    match e {
        MendelianError::Horizon { .. }
        | MendelianError::ProbandAffected { .. }
        | MendelianError::ProbandSex => CliError::field("pedigree", e.to_string()),
        MendelianError::InconsistentEvidence => {
            CliError::field("pedigree.members.genetic_test", e.to_string())
        }
        e => CliError::internal(e.to_string()),
    }
}
