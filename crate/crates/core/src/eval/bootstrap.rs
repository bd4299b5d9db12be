//! Bootstrap confidence intervals and pairwise win proportions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{auc_ipcw, brier_ipcw, log_score, oe_ratio, snb, uno_c, EvalRecord};
use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Oe,
    Auc,
    Brier,
    LogScore,
    Snb,
    UnoC,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Oe,
        Metric::Auc,
        Metric::Brier,
        Metric::LogScore,
        Metric::Snb,
        Metric::UnoC,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Oe => "oe",
            Metric::Auc => "auc",
            Metric::Brier => "brier",
            Metric::LogScore => "log_score",
            Metric::Snb => "snb",
            Metric::UnoC => "uno_c",
        }
    }

    /// True when `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Metric::Oe => (a - 1.0).abs() < (b - 1.0).abs(),
            Metric::Auc | Metric::Snb | Metric::UnoC => a > b,
            Metric::Brier | Metric::LogScore => a < b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub seed: u64,
    pub snb_threshold: f64,
    /// Truncation time for the concordance.
    pub uno_tau: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            replicates: 1000,
            seed: 1,
            snb_threshold: 0.0167,
            uno_tau: 10.0,
        }
    }
}

pub fn compute_metric(
    m: Metric,
    p: &[f64],
    recs: &[EvalRecord],
    cfg: &BootstrapConfig,
) -> Result<f64, EvalError> {
    match m {
        Metric::Oe => oe_ratio(p, recs),
        Metric::Auc => auc_ipcw(p, recs),
        Metric::Brier => brier_ipcw(p, recs),
        Metric::LogScore => log_score(p, recs),
        Metric::Snb => snb(p, recs, cfg.snb_threshold),
        Metric::UnoC => uno_c(p, recs, cfg.uno_tau),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub model: String,
    pub estimate: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub metric: Metric,
    pub estimates: Vec<Estimate>,
    /// `wins[a][b]`: share of replicates where model a is strictly better.
    pub wins: Vec<Vec<f64>>,
    /// `ties[a][b]`: number of replicates with equal values.
    pub ties: Vec<Vec<usize>>,
    /// Share of replicates in which the model is at least as good as every
    /// other model at once.
    pub no_worse_than_all: Vec<f64>,
    /// Replicates where the metric was undefined for some model.
    pub failed_replicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub schema_version: u32,
    pub n_records: usize,
    pub config: BootstrapConfig,
    pub models: Vec<String>,
    pub metrics: Vec<MetricSummary>,
}

/// Percentile (linear interpolation between order statistics).
fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Resamples records with replacement; each replicate draws from its own
/// ChaCha stream so the result does not depend on scheduling.
pub fn bootstrap_compare(
    models: &[String],
    predictions: &[Vec<f64>],
    recs: &[EvalRecord],
    metrics: &[Metric],
    cfg: &BootstrapConfig,
) -> Result<MetricReport, EvalError> {
    if cfg.replicates < 2 {
        return Err(EvalError::Input(
            "at least 2 bootstrap replicates are required".into(),
        ));
    }
    if models.len() != predictions.len() {
        return Err(EvalError::Input(
            "one prediction column per model is required".into(),
        ));
    }
    let n = recs.len();
    for p in predictions {
        if p.len() != n {
            return Err(EvalError::Input(format!(
                "{} predictions for {n} records",
                p.len()
            )));
        }
    }
    let point: Vec<Vec<f64>> = metrics
        .iter()
        .map(|&m| {
            predictions
                .iter()
                .map(|p| compute_metric(m, p, recs, cfg))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;

    // values[b][metric][model]
    let values: Vec<Vec<Vec<f64>>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b as u64 + 1);
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let r: Vec<EvalRecord> = idx.iter().map(|&i| recs[i].clone()).collect();
            metrics
                .iter()
                .map(|&m| {
                    predictions
                        .iter()
                        .map(|p| {
                            let pp: Vec<f64> = idx.iter().map(|&i| p[i]).collect();
                            compute_metric(m, &pp, &r, cfg).unwrap_or(f64::NAN)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let k = models.len();
    let mut summaries = Vec::new();
    for (mi, &metric) in metrics.iter().enumerate() {
        let mut estimates = Vec::new();
        for (a, name) in models.iter().enumerate() {
            let mut v: Vec<f64> = values
                .iter()
                .map(|rep| rep[mi][a])
                .filter(|x| x.is_finite())
                .collect();
            v.sort_by(f64::total_cmp);
            let est = point[mi][a];
            estimates.push(Estimate {
                model: name.clone(),
                estimate: est,
                ci_lower: quantile(&v, 0.025).min(est),
                ci_upper: quantile(&v, 0.975).max(est),
            });
        }
        let ok: Vec<&Vec<f64>> = values
            .iter()
            .map(|rep| &rep[mi])
            .filter(|row| row.iter().all(|x| x.is_finite()))
            .collect();
        let mut wins = vec![vec![0.0; k]; k];
        let mut ties = vec![vec![0usize; k]; k];
        for row in &ok {
            for a in 0..k {
                for b in 0..k {
                    if metric.better(row[a], row[b]) {
                        wins[a][b] += 1.0;
                    } else if a != b && !metric.better(row[b], row[a]) {
                        ties[a][b] += 1;
                    }
                }
            }
        }
        let denom = ok.len().max(1) as f64;
        wins.iter_mut().flatten().for_each(|w| *w /= denom);
        let no_worse_than_all = (0..k)
            .map(|a| {
                ok.iter()
                    .filter(|row| (0..k).all(|b| !metric.better(row[b], row[a])))
                    .count() as f64
                    / denom
            })
            .collect();
        summaries.push(MetricSummary {
            metric,
            estimates,
            wins,
            ties,
            no_worse_than_all,
            failed_replicates: cfg.replicates - ok.len(),
        });
    }
    Ok(MetricReport {
        schema_version: 1,
        n_records: n,
        config: *cfg,
        models: models.to_vec(),
        metrics: summaries,
    })
}
