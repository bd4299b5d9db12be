//! End-to-end simulation study: simulate a cohort, fit both ensembles on the
//! training split, and score every model on the validation split.

use serde::Serialize;
use std::collections::BTreeMap;

use riskfuse_core::ensemble::{predict_ensemble, FittedEnsemble, FrameOptions};
use riskfuse_core::eval::{
    bootstrap_compare, oe_ratio, prepare_records, BootstrapConfig, Metric, MetricReport,
};
use riskfuse_core::sim::{simulate_cohort, SimConfig, SimSummary};
use riskfuse_core::{CohortRecord, ParameterSet};

use crate::error::CliError;
use crate::pipeline::{
    base_predictions, censoring, combined_predictions, fit_from_predictions, FitKind,
};
use crate::scoring::Scorer;

pub const MODELS: [&str; 5] = ["brcapro", "bcrat", "combined_m", "lr1", "lr2"];

#[derive(Debug, Clone)]
pub struct ReplicaOptions {
    pub families: u64,
    pub seed: u64,
    pub bootstrap: usize,
    /// Evaluation horizon; the fixed-horizon ensemble is fitted here.
    pub tau: u32,
    /// Horizons of the time-varying ensemble.
    pub tau_grid: Vec<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplicaReport {
    pub summary: SimSummary,
    pub n_validation: usize,
    pub validation_cases: f64,
    pub oe: BTreeMap<String, f64>,
    /// Share of replicates with AUC(combined) at least as high as both base
    /// models simultaneously.
    pub auc_m_not_worse_share: f64,
    pub auc: MetricReport,
    pub lr1: FittedEnsemble,
    pub lr2: FittedEnsemble,
}

fn ensemble_predictions(
    m: &FittedEnsemble,
    base: &[Vec<[f64; 2]>],
    idx: usize,
    tau: u32,
) -> Result<Vec<f64>, CliError> {
    base.iter()
        .map(|p| {
            predict_ensemble(m, p[idx][0], p[idx][1], tau)
                .map_err(|e| CliError::internal(e.to_string()))
        })
        .collect()
}

pub fn run_replica(
    params: ParameterSet,
    cfg: &SimConfig,
    opts: &ReplicaOptions,
) -> Result<ReplicaReport, CliError> {
    let scorer = Scorer::new(params);
    let (cohort, summary) = simulate_cohort(opts.families, cfg, &scorer.params, opts.seed)
        .map_err(|e| CliError::field("config", e.to_string()))?;
    let records: Vec<CohortRecord> = cohort.into_iter().map(|p| p.record).collect();
    let (train, valid) = records.split_at(summary.train as usize);

    let mut grid = opts.tau_grid.clone();
    if !grid.contains(&opts.tau) {
        grid.push(opts.tau);
        grid.sort_unstable();
    }
    let tau_idx = grid.iter().position(|&t| t == opts.tau).expect("τ in grid");

    let train_base = base_predictions(&scorer, train, &grid)?;
    let fixed_base: Vec<Vec<[f64; 2]>> = train_base.iter().map(|p| vec![p[tau_idx]]).collect();
    let lr1 = fit_from_predictions(
        train,
        &fixed_base,
        &[opts.tau],
        FitKind::Fixed,
        None,
        FrameOptions::default(),
    )?;
    let lr2_base: Vec<Vec<[f64; 2]>> = train_base
        .iter()
        .map(|p| {
            grid.iter()
                .zip(p)
                .filter(|(t, _)| opts.tau_grid.contains(t))
                .map(|(_, v)| *v)
                .collect()
        })
        .collect();
    let lr2 = fit_from_predictions(
        train,
        &lr2_base,
        &opts.tau_grid,
        FitKind::Time,
        None,
        FrameOptions::default(),
    )?;

    let valid_base = base_predictions(&scorer, valid, &[opts.tau])?;
    let preds = vec![
        valid_base.iter().map(|p| p[0][0]).collect::<Vec<_>>(),
        valid_base.iter().map(|p| p[0][1]).collect(),
        combined_predictions(&scorer, valid, opts.tau)?,
        ensemble_predictions(&lr1, &valid_base, 0, opts.tau)?,
        ensemble_predictions(&lr2, &valid_base, 0, opts.tau)?,
    ];

    let g = censoring(valid)?;
    let recs = prepare_records(valid, |i| valid[i].id.clone(), opts.tau as f64, &g)
        .map_err(|e| CliError::internal(e.to_string()))?;
    let mut oe = BTreeMap::new();
    for (name, p) in MODELS.iter().zip(&preds) {
        oe.insert(
            name.to_string(),
            oe_ratio(p, &recs).map_err(|e| CliError::internal(e.to_string()))?,
        );
    }
    let cfg_b = BootstrapConfig {
        replicates: opts.bootstrap,
        seed: opts.seed,
        ..Default::default()
    };
    let auc = bootstrap_compare(
        &["combined_m".into(), "brcapro".into(), "bcrat".into()],
        &[preds[2].clone(), preds[0].clone(), preds[1].clone()],
        &recs,
        &[Metric::Auc],
        &cfg_b,
    )
    .map_err(|e| CliError::internal(e.to_string()))?;
    Ok(ReplicaReport {
        summary,
        n_validation: valid.len(),
        validation_cases: recs.iter().map(|r| r.outcome).sum(),
        oe,
        auc_m_not_worse_share: auc.metrics[0].no_worse_than_all[0],
        auc,
        lr1,
        lr2,
    })
}
