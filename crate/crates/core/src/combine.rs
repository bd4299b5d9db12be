//! Penetrance-modification model: the Mendelian non-carrier hazard is raised
//! to the normalized relative hazard, carrier hazards are left unchanged, and
//! the genotype-specific risks are mixed over the carrier posterior.

use serde::{Deserialize, Serialize};

use crate::mendelian::{
    self, check_horizon, check_risk_proband, genotype_future_risk, Genotype, MendelianError,
};
use crate::params::{NormalizationTable, ParamError, ParameterSet, PenetranceTable};
use crate::pedigree::{Pedigree, Race, RiskFactors};
use crate::relhaz::{relative_hazard, AgeBand};

#[derive(Debug, thiserror::Error)]
pub enum CombineError {
    #[error("parameter integrity at age {age}: modified survivor factor {value} is not positive")]
    Survivor { age: u32, value: f64 },
    #[error(transparent)]
    Mendelian(#[from] MendelianError),
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// How carrier hazards respond to the relative hazard.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CarrierPolicy {
    /// Carrier penetrances are those of the Mendelian model.
    #[default]
    Unmodified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombineOptions {
    /// When false the affected-relatives covariate is zeroed before computing
    /// the relative hazard, so family history enters only via the pedigree.
    pub include_family_history: bool,
    pub carrier_policy: CarrierPolicy,
}

impl Default for CombineOptions {
    fn default() -> Self {
        CombineOptions {
            include_family_history: true,
            carrier_policy: CarrierPolicy::Unmodified,
        }
    }
}

impl CombineOptions {
    fn covariates(&self, x: &RiskFactors) -> RiskFactors {
        let mut x = *x;
        if !self.include_family_history {
            x.affected_first_degree = 0;
        }
        x
    }
}

/// r⁰(t, X) = r(t, X) · (1 − AR(t)).
pub fn normalized_relative_hazard(
    t: f64,
    x: &RiskFactors,
    coeffs: &[f64; 19],
    norm: &NormalizationTable,
    race: Race,
) -> Result<f64, ParamError> {
    Ok(relative_hazard(t, x, coeffs) * norm.one_minus_ar(race, AgeBand::of(t))?)
}

/// Non-carrier risk in (a, a + τ] with per-year hazard 1 − (1 − λ₀(t))^{r⁰(t)}
/// and survivor factor (1 − λ₀(u))^{r⁰(u)} − λ_D(u). `r0` is evaluated at
/// each integer age.
pub fn modified_noncarrier_risk_with(
    table: &PenetranceTable,
    race: Race,
    a: u32,
    tau: u32,
    r0: impl Fn(u32) -> f64,
) -> Result<f64, CombineError> {
    check_horizon(a, tau)?;
    let h0 = table.breast_hazard(Genotype::NonCarrier, race)?;
    let hd = table.mortality(race)?;
    let mut surv = 1.0;
    let mut risk = 0.0;
    for t in a + 1..=a + tau {
        let i = (t - 1) as usize;
        let stay = (1.0 - h0[i]).powf(r0(t));
        risk += (1.0 - stay) * surv;
        if t < a + tau {
            let s = stay - hd[i];
            if s <= 0.0 {
                return Err(CombineError::Survivor { age: t, value: s });
            }
            surv *= s;
        }
    }
    Ok(risk)
}

/// Modified non-carrier risk for covariates X.
pub fn modified_noncarrier_risk(
    params: &ParameterSet,
    race: Race,
    x: &RiskFactors,
    a: u32,
    tau: u32,
) -> Result<f64, CombineError> {
    let coeffs = params.relhaz.for_race(race)?;
    let lo = normalized_relative_hazard(40.0, x, coeffs, &params.normalization, race)?;
    let hi = normalized_relative_hazard(60.0, x, coeffs, &params.normalization, race)?;
    modified_noncarrier_risk_with(&params.penetrance, race, a, tau, |t| {
        if AgeBand::of(t as f64) == AgeBand::From50 {
            hi
        } else {
            lo
        }
    })
}

/// Per-genotype risks under the combined model (carriers unmodified).
pub fn combined_genotype_risks(
    params: &ParameterSet,
    race: Race,
    x: &RiskFactors,
    a: u32,
    tau: u32,
    opts: &CombineOptions,
) -> Result<[f64; 4], CombineError> {
    let x = opts.covariates(x);
    let mut out = [0.0; 4];
    out[0] = modified_noncarrier_risk(params, race, &x, a, tau)?;
    for g in &Genotype::ALL[1..] {
        out[g.index()] = match opts.carrier_policy {
            CarrierPolicy::Unmodified => {
                genotype_future_risk(&params.penetrance, *g, race, a, tau)?
            }
        };
    }
    Ok(out)
}

/// Combined-model risk: genotype risks mixed over the carrier posterior.
pub fn combined_risk_m(
    p: &Pedigree,
    x: &RiskFactors,
    a: u32,
    tau: u32,
    params: &ParameterSet,
    opts: &CombineOptions,
) -> Result<f64, CombineError> {
    check_risk_proband(p, a)?;
    let post = mendelian::carrier_posterior(p, &params.penetrance)?;
    let risks = combined_genotype_risks(params, p.proband().race, x, a, tau, opts)?;
    Ok((0..4).map(|g| post.probs[g] * risks[g]).sum())
}
