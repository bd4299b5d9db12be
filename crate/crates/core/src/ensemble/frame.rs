//! IPCW training frame: one row per proband and horizon.

use serde::{Deserialize, Serialize};

use super::censoring::{stratum_key, CensoringModel};
use super::EnsembleError;
use crate::cohort::{BinaryStatus, SurvivalObservation};

/// Transform applied to both base predictions before they enter the design.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    #[default]
    Sqrt,
    None,
}

impl Transform {
    pub fn apply(self, p: f64) -> f64 {
        match self {
            Transform::Sqrt => p.sqrt(),
            Transform::None => p,
        }
    }
}

/// Treatment of probands censored before τ without an event.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CensoredRows {
    /// Keep the row with pseudo-outcome 0 (Δ = 0). The mean pseudo-outcome
    /// over all probands is then unbiased for the cumulative incidence.
    #[default]
    PseudoZero,
    /// Drop the row.
    Omit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRow {
    /// Index of the proband in the input cohort; rows sharing it form one
    /// cluster for robust variances.
    pub group: usize,
    pub tau: f64,
    /// Transformed first base prediction.
    pub p1: f64,
    /// Transformed second base prediction.
    pub p2: f64,
    /// Δ·N(τ)/G(T̃−); may exceed 1.
    pub y: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingFrame {
    pub rows: Vec<FrameRow>,
    pub transform: Transform,
    pub tau_grid: Vec<u32>,
    pub n_groups: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameOptions {
    pub transform: Transform,
    pub censored_rows: CensoredRows,
}

impl Default for FrameOptions {
    fn default() -> Self {
        FrameOptions {
            transform: Transform::Sqrt,
            censored_rows: CensoredRows::PseudoZero,
        }
    }
}

/// Builds the stacked frame. `predictions[i][k]` holds the two raw base
/// predictions of proband i at `tau_grid[k]`; `extra_weights` (importance
/// weights) default to 1.
pub fn build_training_frame<R: SurvivalObservation>(
    cohort: &[R],
    predictions: &[Vec<[f64; 2]>],
    tau_grid: &[u32],
    g: &CensoringModel,
    extra_weights: Option<&[f64]>,
    opts: FrameOptions,
) -> Result<TrainingFrame, EnsembleError> {
    if tau_grid.is_empty() || tau_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EnsembleError::Input(
            "tau grid must be non-empty and strictly increasing".into(),
        ));
    }
    if predictions.len() != cohort.len() {
        return Err(EnsembleError::Input(format!(
            "{} prediction rows for {} probands",
            predictions.len(),
            cohort.len()
        )));
    }
    if let Some(w) = extra_weights {
        if w.len() != cohort.len() || w.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(EnsembleError::Input(
                "extra weights must be finite, nonnegative, one per proband".into(),
            ));
        }
    }
    let mut rows = Vec::with_capacity(cohort.len() * tau_grid.len());
    for (i, r) in cohort.iter().enumerate() {
        let preds = &predictions[i];
        if preds.len() != tau_grid.len() {
            return Err(EnsembleError::Input(format!(
                "proband {i}: {} predictions for {} horizons",
                preds.len(),
                tau_grid.len()
            )));
        }
        let weight = extra_weights.map_or(1.0, |w| w[i]);
        let key = stratum_key(r);
        for (k, &tau) in tau_grid.iter().enumerate() {
            let [p1, p2] = preds[k];
            if !(0.0..=1.0).contains(&p1) || !(0.0..=1.0).contains(&p2) {
                return Err(EnsembleError::Input(format!(
                    "proband {i}: prediction outside [0,1] at τ = {tau}"
                )));
            }
            let y = match r.status_at(tau as f64) {
                BinaryStatus::Case => {
                    let gt = g.left_limit(&key, r.time())?;
                    if !(gt > 0.0) {
                        return Err(EnsembleError::ZeroCensoringSurvival { t: r.time() });
                    }
                    1.0 / gt
                }
                BinaryStatus::NonCase => 0.0,
                BinaryStatus::Unknown => match opts.censored_rows {
                    CensoredRows::PseudoZero => 0.0,
                    CensoredRows::Omit => continue,
                },
            };
            rows.push(FrameRow {
                group: i,
                tau: tau as f64,
                p1: opts.transform.apply(p1),
                p2: opts.transform.apply(p2),
                y,
                weight,
            });
        }
    }
    Ok(TrainingFrame {
        rows,
        transform: opts.transform,
        tau_grid: tau_grid.to_vec(),
        n_groups: cohort.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohort::{EventType, FollowUp};

    fn fu(t: f64, e: EventType) -> FollowUp {
        FollowUp {
            id: String::new(),
            followup: t,
            event: e,
            stratum: None,
        }
    }

    #[test]
    fn censored_before_tau_handling() {
        let cohort = [
            fu(3.0, EventType::Censored),
            fu(2.0, EventType::Breast),
            fu(6.0, EventType::Censored),
        ];
        let preds = vec![vec![[0.04, 0.09]]; 3];
        let g = CensoringModel::none();
        let omit = FrameOptions {
            censored_rows: CensoredRows::Omit,
            ..Default::default()
        };
        let f = build_training_frame(&cohort, &preds, &[5], &g, None, omit).unwrap();
        assert_eq!(f.rows.len(), 2);
        assert_eq!(
            f.rows.iter().map(|r| r.y).collect::<Vec<_>>(),
            vec![1.0, 0.0]
        );
        assert_eq!(f.rows[0].p1, 0.2);
        let keep =
            build_training_frame(&cohort, &preds, &[5], &g, None, FrameOptions::default()).unwrap();
        assert_eq!(keep.rows.len(), 3);
        assert_eq!(keep.rows[0].y, 0.0);
    }
}
