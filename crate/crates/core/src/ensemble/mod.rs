//! Stacked logistic ensembles over two base-model predictions, fitted with
//! inverse-probability-of-censoring weighted pseudo-outcomes.

pub mod censoring;
pub mod fit;
pub mod frame;
pub mod importance;

pub use censoring::{km_censoring, CensoringModel, StepFunction};
pub use fit::{
    fit_ensemble_fixed, fit_ensemble_time, predict_ensemble, EnsembleKind, FittedEnsemble,
};
pub use frame::{build_training_frame, CensoredRows, FrameOptions, TrainingFrame, Transform};
pub use importance::{importance_weights, ImportanceOptions};

#[derive(Debug, thiserror::Error)]
pub enum EnsembleError {
    #[error("invalid ensemble input: {0}")]
    Input(String),
    #[error("no censoring curve for stratum `{0}`")]
    EmptyStratum(String),
    #[error("censoring survivor is zero at t = {t}; the pseudo-outcome is undefined")]
    ZeroCensoringSurvival { t: f64 },
    #[error("no convergence after {iterations} iterations (max score {max_score:e})")]
    NoConvergence { iterations: usize, max_score: f64 },
    #[error("separation: fitted probabilities saturate (|linear predictor| reached {max_eta})")]
    Separation { max_eta: f64 },
    #[error("design is collinear")]
    Collinear,
    #[error("horizon {tau} not supported by the model (grid {grid:?})")]
    UnsupportedHorizon { tau: u32, grid: Vec<u32> },
    #[error("kernel system is degenerate")]
    DegenerateKernel,
}
