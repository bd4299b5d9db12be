//! Kaplan–Meier estimate of the censoring survivor function G(t) = P(C > t),
//! optionally per stratum.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::EnsembleError;
use crate::cohort::{EventType, SurvivalObservation};

/// Right-continuous step function starting at 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    /// Jump times, strictly increasing.
    pub times: Vec<f64>,
    /// Value from `times[k]` (inclusive) until the next jump.
    pub values: Vec<f64>,
}

impl StepFunction {
    pub fn constant_one() -> Self {
        StepFunction {
            times: Vec::new(),
            values: Vec::new(),
        }
    }

    /// G(t).
    pub fn value(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&s| s <= t);
        if k == 0 {
            1.0
        } else {
            self.values[k - 1]
        }
    }

    /// G(t−) = lim_{s↑t} G(s).
    pub fn left_limit(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&s| s < t);
        if k == 0 {
            1.0
        } else {
            self.values[k - 1]
        }
    }
}

/// Product-limit estimate treating censoring as the event. Events (cancer or
/// death) tied with a censoring time are taken to occur first, so they are
/// not at risk of censoring at that time.
pub fn kaplan_meier_censoring(obs: &[(f64, EventType)]) -> StepFunction {
    let mut sorted: Vec<(f64, bool)> = obs
        .iter()
        .map(|&(t, e)| (t, e == EventType::Censored))
        .collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = sorted.len();
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut g = 1.0;
    let mut i = 0;
    while i < n {
        let t = sorted[i].0;
        let mut j = i;
        let mut censored = 0usize;
        let mut events = 0usize;
        while j < n && sorted[j].0 == t {
            if sorted[j].1 {
                censored += 1;
            } else {
                events += 1;
            }
            j += 1;
        }
        let at_risk = n - i - events;
        if censored > 0 {
            g *= 1.0 - censored as f64 / at_risk as f64;
            times.push(t);
            values.push(g);
        }
        i = j;
    }
    StepFunction { times, values }
}

/// Per-stratum censoring distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensoringModel {
    pub strata: BTreeMap<String, StepFunction>,
}

/// Stratum key used when records carry no stratum.
pub const DEFAULT_STRATUM: &str = "all";

impl CensoringModel {
    /// G ≡ 1 for every stratum.
    pub fn none() -> Self {
        CensoringModel {
            strata: BTreeMap::from([(DEFAULT_STRATUM.to_string(), StepFunction::constant_one())]),
        }
    }

    fn stratum(&self, key: &str) -> Result<&StepFunction, EnsembleError> {
        if self.strata.len() == 1 && self.strata.contains_key(DEFAULT_STRATUM) {
            return Ok(&self.strata[DEFAULT_STRATUM]);
        }
        self.strata
            .get(key)
            .ok_or_else(|| EnsembleError::EmptyStratum(key.to_string()))
    }

    pub fn value(&self, key: &str, t: f64) -> Result<f64, EnsembleError> {
        Ok(self.stratum(key)?.value(t))
    }

    pub fn left_limit(&self, key: &str, t: f64) -> Result<f64, EnsembleError> {
        Ok(self.stratum(key)?.left_limit(t))
    }
}

/// Kaplan–Meier censoring curves, one per key.
pub fn km_censoring<R: SurvivalObservation>(
    records: &[R],
    key: impl Fn(&R) -> String,
) -> Result<CensoringModel, EnsembleError> {
    if records.is_empty() {
        return Err(EnsembleError::EmptyStratum(DEFAULT_STRATUM.into()));
    }
    let mut groups: BTreeMap<String, Vec<(f64, EventType)>> = BTreeMap::new();
    for r in records {
        if !(r.time() > 0.0) {
            return Err(EnsembleError::Input(format!(
                "follow-up time {} is not positive",
                r.time()
            )));
        }
        groups
            .entry(key(r))
            .or_default()
            .push((r.time(), r.event()));
    }
    Ok(CensoringModel {
        strata: groups
            .into_iter()
            .map(|(k, v)| (k, kaplan_meier_censoring(&v)))
            .collect(),
    })
}

/// Stratum key of a record, falling back to [`DEFAULT_STRATUM`].
pub fn stratum_key<R: SurvivalObservation>(r: &R) -> String {
    r.stratum().unwrap_or(DEFAULT_STRATUM).to_string()
}
