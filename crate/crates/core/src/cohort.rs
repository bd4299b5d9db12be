//! Follow-up records shared by the ensemble fitter, the simulator and the
//! evaluation suite.

use serde::{Deserialize, Serialize};

use crate::pedigree::{Pedigree, RiskFactors};

/// Type of the first event observed during follow-up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventType {
    Breast,
    Death,
    /// No event by the end of follow-up.
    Censored,
}

/// Binary τ-year status derived from a follow-up record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryStatus {
    Case,
    NonCase,
    /// Censored before τ without an event.
    Unknown,
}

/// Anything with a follow-up time (years from baseline) and a first-event type.
pub trait SurvivalObservation {
    fn time(&self) -> f64;
    fn event(&self) -> EventType;
    fn stratum(&self) -> Option<&str> {
        None
    }

    fn status_at(&self, tau: f64) -> BinaryStatus {
        let t = self.time();
        match self.event() {
            EventType::Breast if t <= tau => BinaryStatus::Case,
            EventType::Death if t <= tau => BinaryStatus::NonCase,
            EventType::Censored if t < tau => BinaryStatus::Unknown,
            _ => BinaryStatus::NonCase,
        }
    }

    /// Time at which the τ-year status became known: min(T̃, τ).
    fn status_time(&self, tau: f64) -> f64 {
        self.time().min(tau)
    }
}

/// Outcome-only record (id, follow-up, event), as read from outcome files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FollowUp {
    pub id: String,
    pub followup: f64,
    pub event: EventType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stratum: Option<String>,
}

impl SurvivalObservation for FollowUp {
    fn time(&self) -> f64 {
        self.followup
    }
    fn event(&self) -> EventType {
        self.event
    }
    fn stratum(&self) -> Option<&str> {
        self.stratum.as_deref()
    }
}

/// One proband: baseline age, covariates, pedigree and follow-up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortRecord {
    pub id: String,
    pub baseline_age: u32,
    pub pedigree: Pedigree,
    pub risk_factors: RiskFactors,
    /// Years from baseline to the first event or censoring.
    pub followup: f64,
    pub event: EventType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stratum: Option<String>,
}

impl CohortRecord {
    pub fn follow_up(&self) -> FollowUp {
        FollowUp {
            id: self.id.clone(),
            followup: self.followup,
            event: self.event,
            stratum: self.stratum.clone(),
        }
    }
}

impl SurvivalObservation for CohortRecord {
    fn time(&self) -> f64 {
        self.followup
    }
    fn event(&self) -> EventType {
        self.event
    }
    fn stratum(&self) -> Option<&str> {
        self.stratum.as_deref()
    }
}
