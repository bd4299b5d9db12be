//! IPCW-weighted accuracy metrics for τ-year binary outcomes, plus Uno's
//! concordance for the time-to-event outcome.

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::cohort::{BinaryStatus, EventType, SurvivalObservation};
use crate::ensemble::censoring::{stratum_key, CensoringModel};

/// Per-proband outcome data shared by every model's predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub id: String,
    pub time: f64,
    pub event: EventType,
    /// τ-year status: 1 for a case, 0 otherwise (including unknown).
    pub outcome: f64,
    /// IPCW weight 1/G(min(T̃, τ)−); zero when the status is unknown.
    pub weight: f64,
    /// G(T̃−), used by the concordance weights.
    pub g_at_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stratum: Option<String>,
}

/// Derives binary outcomes and IPCW weights at horizon τ.
pub fn prepare_records<R: SurvivalObservation>(
    cohort: &[R],
    ids: impl Fn(usize) -> String,
    tau: f64,
    g: &CensoringModel,
) -> Result<Vec<EvalRecord>, EvalError> {
    cohort
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let key = stratum_key(r);
            let status = r.status_at(tau);
            let (outcome, weight) = match status {
                BinaryStatus::Unknown => (0.0, 0.0),
                s => {
                    let gt = g.left_limit(&key, r.status_time(tau))?;
                    if !(gt > 0.0) {
                        return Err(EvalError::ZeroCensoringSurvival {
                            t: r.status_time(tau),
                        });
                    }
                    (if s == BinaryStatus::Case { 1.0 } else { 0.0 }, 1.0 / gt)
                }
            };
            Ok(EvalRecord {
                id: ids(i),
                time: r.time(),
                event: r.event(),
                outcome,
                weight,
                g_at_time: g.left_limit(&key, r.time())?,
                stratum: r.stratum().map(str::to_string),
            })
        })
        .collect()
}

fn check_len(p: &[f64], recs: &[EvalRecord]) -> Result<(), EvalError> {
    if p.len() != recs.len() {
        return Err(EvalError::Input(format!(
            "{} predictions for {} records",
            p.len(),
            recs.len()
        )));
    }
    Ok(())
}

/// Weighted observed events over the sum of predictions (all records).
pub fn oe_ratio(p: &[f64], recs: &[EvalRecord]) -> Result<f64, EvalError> {
    check_len(p, recs)?;
    let o: f64 = recs.iter().map(|r| r.weight * r.outcome).sum();
    let e: f64 = p.iter().sum();
    if !(e > 0.0) {
        return Err(EvalError::ZeroExpected);
    }
    Ok(o / e)
}

/// Weighted Mann–Whitney AUC; tied predictions count one half.
pub fn auc_ipcw(p: &[f64], recs: &[EvalRecord]) -> Result<f64, EvalError> {
    check_len(p, recs)?;
    let mut items: Vec<(f64, f64, bool)> = p
        .iter()
        .zip(recs)
        .filter(|(_, r)| r.weight > 0.0)
        .map(|(&p, r)| (p, r.weight, r.outcome > 0.5))
        .collect();
    items.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut cases = 0.0;
    let mut controls_below = 0.0;
    let mut num = 0.0;
    let mut i = 0;
    while i < items.len() {
        let mut j = i;
        let (mut case_w, mut ctrl_w) = (0.0, 0.0);
        while j < items.len() && items[j].0 == items[i].0 {
            if items[j].2 {
                case_w += items[j].1;
            } else {
                ctrl_w += items[j].1;
            }
            j += 1;
        }
        num += case_w * (controls_below + 0.5 * ctrl_w);
        controls_below += ctrl_w;
        cases += case_w;
        i = j;
    }
    if cases == 0.0 || controls_below == 0.0 {
        return Err(EvalError::Degenerate(
            "AUC needs weighted cases and controls".into(),
        ));
    }
    Ok(num / (cases * controls_below))
}

fn weighted_mean(
    p: &[f64],
    recs: &[EvalRecord],
    f: impl Fn(f64, f64) -> f64,
) -> Result<f64, EvalError> {
    check_len(p, recs)?;
    let (mut s, mut w) = (0.0, 0.0);
    for (&p, r) in p.iter().zip(recs) {
        if r.weight > 0.0 {
            s += r.weight * f(p, r.outcome);
            w += r.weight;
        }
    }
    if !(w > 0.0) {
        return Err(EvalError::Degenerate(
            "no records with positive weight".into(),
        ));
    }
    Ok(s / w)
}

pub fn brier_ipcw(p: &[f64], recs: &[EvalRecord]) -> Result<f64, EvalError> {
    weighted_mean(p, recs, |p, y| (p - y) * (p - y))
}

pub const LOG_SCORE_EPS: f64 = 1e-12;

/// Weighted mean negative log-likelihood with predictions clipped to
/// [ε, 1 − ε].
pub fn log_score(p: &[f64], recs: &[EvalRecord]) -> Result<f64, EvalError> {
    weighted_mean(p, recs, |p, y| {
        let p = p.clamp(LOG_SCORE_EPS, 1.0 - LOG_SCORE_EPS);
        -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
    })
}

/// 100·(b − a)/b: percent improvement of score `a` over reference `b` for
/// lower-is-better scores.
pub fn relative_improvement(a: f64, b: f64) -> f64 {
    100.0 * (b - a) / b
}

/// Standardized net benefit at risk threshold `t`: TPR − odds(t)/odds(π)·FPR.
pub fn snb(p: &[f64], recs: &[EvalRecord], threshold: f64) -> Result<f64, EvalError> {
    check_len(p, recs)?;
    if !(0.0 < threshold && threshold < 1.0) {
        return Err(EvalError::Input(format!(
            "threshold {threshold} outside (0,1)"
        )));
    }
    let (mut case_w, mut ctrl_w, mut tp, mut fp) = (0.0, 0.0, 0.0, 0.0);
    for (&p, r) in p.iter().zip(recs) {
        let positive = p >= threshold;
        if r.outcome > 0.5 {
            case_w += r.weight;
            if positive {
                tp += r.weight;
            }
        } else {
            ctrl_w += r.weight;
            if positive {
                fp += r.weight;
            }
        }
    }
    if !(case_w > 0.0 && ctrl_w > 0.0) {
        return Err(EvalError::Degenerate(
            "prevalence must lie strictly between 0 and 1".into(),
        ));
    }
    let prevalence = case_w / (case_w + ctrl_w);
    let ratio = (threshold / (1.0 - threshold)) / (prevalence / (1.0 - prevalence));
    Ok(tp / case_w - ratio * fp / ctrl_w)
}

/// Fenwick tree over prediction ranks, accumulating counts.
struct Fenwick(Vec<f64>);

impl Fenwick {
    fn add(&mut self, i: usize, v: f64) {
        let mut i = i + 1;
        while i < self.0.len() {
            self.0[i] += v;
            i += i & i.wrapping_neg();
        }
    }
    /// Sum over ranks < i.
    fn prefix(&self, i: usize) -> f64 {
        let mut i = i;
        let mut s = 0.0;
        while i > 0 {
            s += self.0[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// Uno's IPCW concordance truncated at `tau`: over pairs with Tᵢ < Tⱼ,
/// Tᵢ ≤ τ and a breast cancer event at Tᵢ, weighted by G(Tᵢ−)⁻².
pub fn uno_c(p: &[f64], recs: &[EvalRecord], tau: f64) -> Result<f64, EvalError> {
    check_len(p, recs)?;
    let n = p.len();
    // Prediction ranks with ties sharing a rank.
    let mut by_p: Vec<usize> = (0..n).collect();
    by_p.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
    let mut rank = vec![0usize; n];
    let mut distinct = 0;
    for k in 0..n {
        if k > 0 && p[by_p[k]] != p[by_p[k - 1]] {
            distinct += 1;
        }
        rank[by_p[k]] = distinct;
    }
    let mut by_t: Vec<usize> = (0..n).collect();
    by_t.sort_by(|&a, &b| recs[b].time.total_cmp(&recs[a].time));
    let mut tree = Fenwick(vec![0.0; distinct + 2]);
    let mut inserted = 0.0;
    let (mut num, mut den) = (0.0, 0.0);
    let mut k = 0;
    while k < n {
        let t = recs[by_t[k]].time;
        let mut m = k;
        while m < n && recs[by_t[m]].time == t {
            m += 1;
        }
        // Everyone later in time is already in the tree.
        for &i in &by_t[k..m] {
            let r = &recs[i];
            if r.event == EventType::Breast && r.time <= tau && inserted > 0.0 {
                if !(r.g_at_time > 0.0) {
                    return Err(EvalError::ZeroCensoringSurvival { t: r.time });
                }
                let w = 1.0 / (r.g_at_time * r.g_at_time);
                let below = tree.prefix(rank[i]);
                let tied = tree.prefix(rank[i] + 1) - below;
                num += w * (below + 0.5 * tied);
                den += w * inserted;
            }
        }
        for &i in &by_t[k..m] {
            tree.add(rank[i], 1.0);
            inserted += 1.0;
        }
        k = m;
    }
    if den == 0.0 {
        return Err(EvalError::Degenerate(
            "no usable pairs for concordance".into(),
        ));
    }
    Ok(num / den)
}
