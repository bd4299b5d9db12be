//! Censoring-aware evaluation: calibration, discrimination and proper
//! scores with IPCW weights, decile calibration and bootstrap comparison.

pub mod bootstrap;
pub mod calibration;
pub mod metrics;

pub use bootstrap::{bootstrap_compare, BootstrapConfig, Metric, MetricReport};
pub use calibration::{calibration_deciles, CalibrationBin};
pub use metrics::{
    auc_ipcw, brier_ipcw, log_score, oe_ratio, prepare_records, relative_improvement, snb, uno_c,
    EvalRecord,
};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("invalid evaluation input: {0}")]
    Input(String),
    #[error("expected event count is zero")]
    ZeroExpected,
    #[error("metric undefined: {0}")]
    Degenerate(String),
    #[error("censoring survivor is zero at t = {t}")]
    ZeroCensoringSurvival { t: f64 },
    #[error(transparent)]
    Ensemble(#[from] crate::ensemble::EnsembleError),
}
