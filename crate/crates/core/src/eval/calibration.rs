//! Observed-to-expected ratios by risk decile.

use serde::{Deserialize, Serialize};

use super::metrics::EvalRecord;
use super::EvalError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBin {
    pub lower: f64,
    pub upper: f64,
    pub n: usize,
    pub mean_prediction: f64,
    pub observed: f64,
    pub expected: f64,
    pub oe: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
}

/// Upper 97.5% Poisson limit for zero observed events.
const ZERO_EVENT_UPPER: f64 = 3.688_879_454_113_936;

/// Up to ten bins at the prediction deciles. Cut points are the order
/// statistics at each tenth of the sorted predictions (stable by record
/// order); equal predictions always share a bin, so repeated cut points
/// collapse and fewer bins are returned. O/E uses the same IPCW numerator
/// as the overall ratio; the interval treats the weighted count as Poisson.
pub fn calibration_deciles(
    p: &[f64],
    recs: &[EvalRecord],
) -> Result<Vec<CalibrationBin>, EvalError> {
    if p.len() != recs.len() {
        return Err(EvalError::Input(format!(
            "{} predictions for {} records",
            p.len(),
            recs.len()
        )));
    }
    let n = p.len();
    if recs.iter().filter(|r| r.weight > 0.0).count() < 10 {
        return Err(EvalError::Degenerate(
            "calibration needs at least 10 weighted records".into(),
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
    let mut cuts: Vec<f64> = (1..10)
        .map(|k| p[order[(k * n).div_ceil(10) - 1]])
        .collect();
    cuts.dedup();
    // Bin b covers (cuts[b-1], cuts[b]]; the last bin is open above.
    let mut bins: Vec<Vec<usize>> = vec![Vec::new(); cuts.len() + 1];
    for &i in &order {
        let b = cuts.partition_point(|&c| c < p[i]);
        bins[b].push(i);
    }
    let mut out = Vec::new();
    for members in bins.into_iter().filter(|b| !b.is_empty()) {
        let expected: f64 = members.iter().map(|&i| p[i]).sum();
        let observed: f64 = members
            .iter()
            .map(|&i| recs[i].weight * recs[i].outcome)
            .sum();
        let var: f64 = members
            .iter()
            .map(|&i| (recs[i].weight * recs[i].outcome).powi(2))
            .sum();
        let oe = if expected > 0.0 {
            observed / expected
        } else {
            f64::NAN
        };
        let (ci_lower, ci_upper) = if observed > 0.0 && expected > 0.0 {
            let se_log = var.sqrt() / observed;
            (oe * (-1.96 * se_log).exp(), oe * (1.96 * se_log).exp())
        } else if expected > 0.0 {
            (0.0, ZERO_EVENT_UPPER / expected)
        } else {
            (f64::NAN, f64::NAN)
        };
        out.push(CalibrationBin {
            lower: p[members[0]],
            upper: p[*members.last().unwrap()],
            n: members.len(),
            mean_prediction: expected / members.len() as f64,
            observed,
            expected,
            oe,
            ci_lower,
            ci_upper,
        });
    }
    Ok(out)
}
