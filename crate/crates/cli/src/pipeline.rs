//! Cohort-scale steps shared by the `fit` and `evaluate` commands: batch
//! predictions, censoring strata, training frames and importance features.

use rayon::prelude::*;

use riskfuse_core::ensemble::{
    build_training_frame, fit_ensemble_fixed, fit_ensemble_time, importance_weights, km_censoring,
    CensoringModel, FittedEnsemble, FrameOptions, ImportanceOptions,
};
use riskfuse_core::pedigree::{stratify_family_history, Stratum, StratumRules};
use riskfuse_core::CohortRecord;

use crate::error::CliError;
use crate::scoring::Scorer;

/// How follow-up records are grouped for censoring estimation and
/// stratified evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StrataKey {
    /// One censoring curve for everyone.
    #[default]
    None,
    /// Strong versus less family history, from the parameter set's rules.
    FamilyHistory,
    /// The `stratum` field carried by each record.
    Record,
}

impl StrataKey {
    pub fn parse(s: &str) -> Option<StrataKey> {
        match s {
            "none" => Some(StrataKey::None),
            "family_history" => Some(StrataKey::FamilyHistory),
            "record" => Some(StrataKey::Record),
            _ => None,
        }
    }
}

pub fn stratum_label(s: Stratum) -> &'static str {
    match s {
        Stratum::Strong => "strong",
        Stratum::Less => "less",
    }
}

/// Overwrites each record's stratum according to `key`.
pub fn apply_strata(records: &mut [CohortRecord], key: StrataKey, rules: &StratumRules) {
    for r in records {
        match key {
            StrataKey::None => r.stratum = None,
            StrataKey::FamilyHistory => {
                r.stratum =
                    Some(stratum_label(stratify_family_history(&r.pedigree, rules)).to_string())
            }
            StrataKey::Record => {}
        }
    }
}

pub fn censoring(records: &[CohortRecord]) -> Result<CensoringModel, CliError> {
    if records.is_empty() {
        return Err(CliError::field("cohort", "no records"));
    }
    km_censoring(records, riskfuse_core::ensemble::censoring::stratum_key)
        .map_err(|e| CliError::field("cohort", e.to_string()))
}

/// (BRCAPRO, BCRAT) per record and horizon, computed in parallel.
pub fn base_predictions(
    scorer: &Scorer,
    records: &[CohortRecord],
    taus: &[u32],
) -> Result<Vec<Vec<[f64; 2]>>, CliError> {
    records
        .par_iter()
        .map(|r| {
            scorer
                .base_predictions(r, taus)
                .map_err(|e| with_id(&r.id, e))
        })
        .collect()
}

/// Combined-model risk per record at one horizon.
pub fn combined_predictions(
    scorer: &Scorer,
    records: &[CohortRecord],
    tau: u32,
) -> Result<Vec<f64>, CliError> {
    records
        .par_iter()
        .map(|r| {
            scorer
                .combined(&r.pedigree, &r.risk_factors, r.baseline_age, tau)
                .map_err(|e| with_id(&r.id, e))
        })
        .collect()
}

fn with_id(id: &str, e: CliError) -> CliError {
    match e {
        CliError::Invalid { field, message } => CliError::Invalid {
            field: format!("{id}.{field}"),
            message,
        },
        CliError::Ineligible { model, reason } => CliError::Ineligible {
            model,
            reason: format!("{id}: {reason}"),
        },
        e => e,
    }
}

/// Covariate-shift features: baseline age and the square roots of both base
/// predictions at the longest horizon.
pub fn importance_features(records: &[CohortRecord], preds: &[Vec<[f64; 2]>]) -> Vec<Vec<f64>> {
    records
        .iter()
        .zip(preds)
        .map(|(r, p)| {
            let last = p.last().copied().unwrap_or([0.0, 0.0]);
            vec![r.baseline_age as f64, last[0].sqrt(), last[1].sqrt()]
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitKind {
    Fixed,
    Time,
}

impl FitKind {
    pub fn parse(s: &str) -> Option<FitKind> {
        match s {
            "fixed" | "lr1" => Some(FitKind::Fixed),
            "time" | "lr2" => Some(FitKind::Time),
            _ => None,
        }
    }
}

/// Fits an ensemble from precomputed base predictions. `target` holds
/// importance features of the deployment population, if any.
pub fn fit_from_predictions(
    records: &[CohortRecord],
    preds: &[Vec<[f64; 2]>],
    taus: &[u32],
    kind: FitKind,
    target: Option<&[Vec<f64>]>,
    frame_opts: FrameOptions,
) -> Result<FittedEnsemble, CliError> {
    let g = censoring(records)?;
    let weights = match target {
        Some(t) => Some(
            importance_weights(
                &importance_features(records, preds),
                t,
                ImportanceOptions::default(),
            )
            .map_err(|e| CliError::field("importance_target", e.to_string()))?,
        ),
        None => None,
    };
    let frame = build_training_frame(records, preds, taus, &g, weights.as_deref(), frame_opts)
        .map_err(|e| CliError::field("cohort", e.to_string()))?;
    let fit = match kind {
        FitKind::Fixed => fit_ensemble_fixed(&frame),
        FitKind::Time => fit_ensemble_time(&frame),
    };
    fit.map_err(|e| CliError::internal(format!("ensemble fit failed: {e}")))
}
