//! Scoring requests shared by `riskfuse score` and the service, and the
//! what-if deltas applied to them.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use riskfuse_core::pedigree::{pedigree_from_value, Pedigree, Relative, RiskFactors};

use crate::error::CliError;
use crate::fmt17::Num;
use crate::scoring::{ModelName, RiskFactorsInput, Scorer};

pub const API_SCHEMA_VERSION: u32 = 1;

fn default_schema() -> u32 {
    API_SCHEMA_VERSION
}

/// One proband to score. In batch files `baseline_age` is accepted for
/// `age` so simulated cohorts can be scored directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRequest {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub pedigree: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub risk_factors: Option<RiskFactorsInput>,
    /// Age at risk assessment; defaults to the proband's current age.
    #[serde(
        default,
        alias = "baseline_age",
        skip_serializing_if = "Option::is_none"
    )]
    pub age: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub taus: Vec<u32>,
    /// Model names; empty means every available model.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub models: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelResult {
    pub model: String,
    pub tau: u32,
    pub risk: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ineligible: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreResponse {
    pub schema_version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub age: u32,
    pub affected_first_degree: u32,
    pub results: Vec<ModelResult>,
}

/// A validated request, ready to score.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub id: Option<String>,
    pub pedigree: Pedigree,
    pub risk_factors: Option<RiskFactorsInput>,
    pub age: u32,
    pub taus: Vec<u32>,
    pub models: Vec<ModelName>,
    /// Models were named explicitly rather than defaulted.
    pub explicit_models: bool,
}

impl ScoreRequest {
    pub fn resolve(&self, scorer: &Scorer) -> Result<Resolved, CliError> {
        if self.schema_version != API_SCHEMA_VERSION {
            return Err(CliError::field(
                "schema_version",
                format!("unsupported version {}", self.schema_version),
            ));
        }
        let pedigree = pedigree_from_value(&self.pedigree)?;
        let taus = if self.taus.is_empty() {
            vec![5]
        } else {
            self.taus.clone()
        };
        if let Some(t) = taus.iter().find(|&&t| t == 0) {
            return Err(CliError::field(
                "taus",
                format!("horizon {t} must be at least 1"),
            ));
        }
        let models = if self.models.is_empty() {
            scorer.models()
        } else {
            self.models
                .iter()
                .map(|m| {
                    let name = ModelName::parse(m)
                        .ok_or_else(|| CliError::field("models", format!("unknown model `{m}`")))?;
                    if let ModelName::Ensemble(e) = &name {
                        if !scorer.ensembles.contains_key(e) {
                            return Err(CliError::field(
                                "models",
                                format!("ensemble `{e}` is not loaded"),
                            ));
                        }
                    }
                    Ok(name)
                })
                .collect::<Result<_, _>>()?
        };
        Ok(Resolved {
            id: self
                .id
                .clone()
                .or_else(|| pedigree.family_id().map(str::to_string)),
            age: self.age.unwrap_or_else(|| pedigree.proband().age()),
            pedigree,
            risk_factors: self.risk_factors,
            taus,
            models,
            explicit_models: !self.models.is_empty(),
        })
    }
}

impl Resolved {
    /// Scores every model at every horizon. Ineligibility is reported per
    /// entry; invalid input fails the whole request.
    pub fn score(&self, scorer: &Scorer) -> Result<ScoreResponse, CliError> {
        let x = match &self.risk_factors {
            Some(rf) => Some(rf.resolve(&self.pedigree)?),
            None => None,
        };
        let mut results = Vec::with_capacity(self.models.len() * self.taus.len());
        for model in &self.models {
            for &tau in &self.taus {
                let risk = match (model, &x) {
                    (ModelName::Brcapro, _) => scorer.score(
                        model,
                        &self.pedigree,
                        &RiskFactors::baseline(),
                        self.age,
                        tau,
                    ),
                    (_, Some(x)) => scorer.score(model, &self.pedigree, x, self.age, tau),
                    (_, None) => Err(CliError::field(
                        "risk_factors",
                        format!("required by model {}", model.as_string()),
                    )),
                };
                results.push(match risk {
                    Ok(r) => ModelResult {
                        model: model.as_string(),
                        tau,
                        risk: Some(Num(r)),
                        ineligible: None,
                    },
                    Err(CliError::Ineligible { reason, .. }) => ModelResult {
                        model: model.as_string(),
                        tau,
                        risk: None,
                        ineligible: Some(reason),
                    },
                    Err(e) => return Err(e),
                });
            }
        }
        Ok(ScoreResponse {
            schema_version: API_SCHEMA_VERSION,
            id: self.id.clone(),
            age: self.age,
            affected_first_degree: riskfuse_core::pedigree::count_affected_first_degree(
                &self.pedigree,
            ),
            results,
        })
    }
}

/// One what-if edit, applied to the base request on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Delta {
    AddRelative { relative: Relative },
    RemoveRelative { id: u32 },
    SetRiskFactors { risk_factors: RiskFactorsInput },
    SetAge { age: u32 },
    SetTaus { taus: Vec<u32> },
}

impl Delta {
    /// The edited request. Pedigree edits re-derive the affected-relative
    /// count so the covariate follows the family.
    pub fn apply(&self, base: &ScoreRequest) -> Result<ScoreRequest, CliError> {
        let mut req = base.clone();
        let edit_pedigree =
            |req: &mut ScoreRequest, f: &dyn Fn(&mut Vec<Relative>) -> Result<(), CliError>| {
                let p = pedigree_from_value(&req.pedigree)?;
                let mut err = None;
                let edited = p.edited(|m| err = f(m).err())?;
                if let Some(e) = err {
                    return Err(e);
                }
                req.pedigree = edited.to_value();
                if let Some(rf) = req.risk_factors.as_mut() {
                    rf.affected_first_degree = None;
                }
                Ok(())
            };
        match self {
            Delta::AddRelative { relative } => edit_pedigree(&mut req, &|m| {
                m.push(relative.clone());
                Ok(())
            })?,
            Delta::RemoveRelative { id } => edit_pedigree(&mut req, &|m| {
                let before = m.len();
                m.retain(|r| r.id != *id || r.relation == riskfuse_core::Relation::Proband);
                if m.len() == before {
                    return Err(CliError::field(
                        "id",
                        format!("no removable member with id {id}"),
                    ));
                }
                Ok(())
            })?,
            Delta::SetRiskFactors { risk_factors } => req.risk_factors = Some(*risk_factors),
            Delta::SetAge { age } => req.age = Some(*age),
            Delta::SetTaus { taus } => req.taus = taus.clone(),
        }
        Ok(req)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhatIfRequest {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub base: ScoreRequest,
    #[serde(default)]
    pub deltas: Vec<Delta>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhatIfRow {
    /// `None` for the base row.
    pub delta: Option<Delta>,
    pub response: ScoreResponse,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhatIfResponse {
    pub schema_version: u32,
    pub rows: Vec<WhatIfRow>,
}

/// Base row followed by one row per delta; ineligibility is always
/// reported inline.
pub fn whatif(scorer: &Scorer, req: &WhatIfRequest) -> Result<WhatIfResponse, CliError> {
    if req.schema_version != API_SCHEMA_VERSION {
        return Err(CliError::field(
            "schema_version",
            format!("unsupported version {}", req.schema_version),
        ));
    }
    let mut rows = vec![WhatIfRow {
        delta: None,
        response: req.base.resolve(scorer)?.score(scorer)?,
    }];
    for (i, d) in req.deltas.iter().enumerate() {
        let prefix = |e: CliError| match e {
            CliError::Invalid { field, message } => CliError::Invalid {
                field: format!("deltas[{i}].{field}"),
                message,
            },
            e => e,
        };
        let edited = d.apply(&req.base).map_err(prefix)?;
        let response = edited
            .resolve(scorer)
            .and_then(|r| r.score(scorer))
            .map_err(prefix)?;
        rows.push(WhatIfRow {
            delta: Some(d.clone()),
            response,
        });
    }
    Ok(WhatIfResponse {
        schema_version: API_SCHEMA_VERSION,
        rows,
    })
}
