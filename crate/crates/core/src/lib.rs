//! Breast cancer risk-model fusion.
//!
//! The crate combines a Mendelian, pedigree-based carrier model with an
//! empirical relative-hazard model in two ways:
//!
//! * **Penetrance modification** ([`combine`]): the non-carrier yearly hazard
//!   is raised to the power of a normalized relative hazard before mixing the
//!   genotype-specific risks over the carrier posterior.
//! * **Stacking** ([`ensemble`]): logistic meta-models over the two base
//!   predictions, fitted with inverse-probability-of-censoring weighted
//!   pseudo-outcomes.
//!
//! Supporting modules cover pedigree types and parsing ([`pedigree`]),
//! parameter tables ([`params`]), carrier inference and genotype-specific risk
//! ([`mendelian`]), the relative-hazard model ([`relhaz`]), a cohort simulator
//! ([`sim`]) and the censoring-aware evaluation suite ([`eval`]).

pub mod cohort;
pub mod combine;
pub mod ensemble;
pub mod eval;
pub mod mendelian;
pub mod params;
pub mod pedigree;
pub mod relhaz;
pub mod sim;

pub use cohort::{CohortRecord, EventType, FollowUp, SurvivalObservation};
pub use combine::{
    combined_risk_m, modified_noncarrier_risk, normalized_relative_hazard, CombineOptions,
};
pub use mendelian::{
    brcapro_risk, carrier_posterior, genotype_future_risk, Genotype, GenotypePosterior,
};
pub use params::ParameterSet;
pub use pedigree::{Pedigree, Race, Relation, Relative, RiskFactors, Sex};
pub use relhaz::{bcrat_absolute_risk, relative_hazard};

/// Oldest age covered by the penetrance and mortality tables.
pub const MAX_AGE: u32 = 94;

/// Crate-level error, wrapping the per-module error types.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Pedigree(#[from] pedigree::PedigreeError),
    #[error(transparent)]
    Params(#[from] params::ParamError),
    #[error(transparent)]
    Mendelian(#[from] mendelian::MendelianError),
    #[error(transparent)]
    RelHaz(#[from] relhaz::RelHazError),
    #[error(transparent)]
    Combine(#[from] combine::CombineError),
    #[error(transparent)]
    Ensemble(#[from] ensemble::EnsembleError),
    #[error(transparent)]
    Eval(#[from] eval::EvalError),
    #[error(transparent)]
    Sim(#[from] sim::SimError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
