//! Weighted quasi-binomial logistic fit of the stacked design, robust
//! variances, and the serialized model.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::frame::{FrameRow, TrainingFrame, Transform};
use super::EnsembleError;

pub const ENSEMBLE_SCHEMA_VERSION: u32 = 1;
const MAX_ITER: usize = 100;
const SCORE_TOL: f64 = 1e-8;
/// A linear predictor beyond this on any row means the fitted probabilities
/// are saturating, which on bounded inputs only happens under separation.
const SATURATION: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    /// (1, p₁, p₂, p₁p₂) at one horizon.
    FixedHorizon,
    /// Adds τ, τp₁, τp₂, τp₁p₂.
    TimeVarying,
}

impl EnsembleKind {
    pub fn n_coefficients(self) -> usize {
        match self {
            EnsembleKind::FixedHorizon => 4,
            EnsembleKind::TimeVarying => 8,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the training cohort file, when fitted from one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub training_hash: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created: Option<String>,
    #[serde(default)]
    pub n_rows: usize,
    #[serde(default)]
    pub n_groups: usize,
    #[serde(default)]
    pub iterations: usize,
    /// Design columns dropped as constant (time-varying fit on one horizon).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dropped_columns: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedEnsemble {
    pub schema_version: u32,
    pub kind: EnsembleKind,
    pub coefficients: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robust_se: Option<Vec<f64>>,
    pub transform: Transform,
    pub tau_grid: Vec<u32>,
    #[serde(default)]
    pub provenance: Provenance,
}

impl FittedEnsemble {
    /// A model from known coefficients (e.g. published estimates).
    pub fn from_coefficients(
        kind: EnsembleKind,
        coefficients: Vec<f64>,
        transform: Transform,
        tau_grid: Vec<u32>,
    ) -> Result<Self, EnsembleError> {
        let m = FittedEnsemble {
            schema_version: ENSEMBLE_SCHEMA_VERSION,
            kind,
            coefficients,
            robust_se: None,
            transform,
            tau_grid,
            provenance: Provenance::default(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), EnsembleError> {
        if self.schema_version != ENSEMBLE_SCHEMA_VERSION {
            return Err(EnsembleError::Input(format!(
                "unsupported ensemble schema_version {}",
                self.schema_version
            )));
        }
        if self.coefficients.len() != self.kind.n_coefficients() {
            return Err(EnsembleError::Input(format!(
                "{:?} needs {} coefficients, found {}",
                self.kind,
                self.kind.n_coefficients(),
                self.coefficients.len()
            )));
        }
        if self.coefficients.iter().any(|b| !b.is_finite()) {
            return Err(EnsembleError::Input("non-finite coefficient".into()));
        }
        if self.tau_grid.is_empty() || self.tau_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(EnsembleError::Input(
                "tau_grid must be non-empty and strictly increasing".into(),
            ));
        }
        if self.kind == EnsembleKind::FixedHorizon && self.tau_grid.len() != 1 {
            return Err(EnsembleError::Input(
                "a fixed-horizon model has exactly one horizon".into(),
            ));
        }
        Ok(())
    }

    pub fn supports(&self, tau: u32) -> bool {
        match self.kind {
            EnsembleKind::FixedHorizon => tau == self.tau_grid[0],
            EnsembleKind::TimeVarying => {
                (self.tau_grid[0]..=*self.tau_grid.last().unwrap()).contains(&tau)
            }
        }
    }
}

fn design(kind: EnsembleKind, p1: f64, p2: f64, tau: f64) -> [f64; 8] {
    let base = [1.0, p1, p2, p1 * p2];
    match kind {
        EnsembleKind::FixedHorizon => [base[0], base[1], base[2], base[3], 0.0, 0.0, 0.0, 0.0],
        EnsembleKind::TimeVarying => [
            base[0],
            base[1],
            base[2],
            base[3],
            tau,
            tau * p1,
            tau * p2,
            tau * p1 * p2,
        ],
    }
}

fn logistic(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^η) without overflow.
fn softplus(eta: f64) -> f64 {
    if eta > 0.0 {
        eta + (-eta).exp().ln_1p()
    } else {
        eta.exp().ln_1p()
    }
}

/// Probability from a fitted model at raw base predictions p₁, p₂ and horizon τ.
pub fn predict_ensemble(
    model: &FittedEnsemble,
    p1: f64,
    p2: f64,
    tau: u32,
) -> Result<f64, EnsembleError> {
    if !(0.0..=1.0).contains(&p1) || !(0.0..=1.0).contains(&p2) {
        return Err(EnsembleError::Input(format!(
            "base predictions ({p1}, {p2}) outside [0,1]"
        )));
    }
    if !model.supports(tau) {
        return Err(EnsembleError::UnsupportedHorizon {
            tau,
            grid: model.tau_grid.clone(),
        });
    }
    let x = design(
        model.kind,
        model.transform.apply(p1),
        model.transform.apply(p2),
        tau as f64,
    );
    let eta: f64 = model.coefficients.iter().zip(&x).map(|(b, x)| b * x).sum();
    Ok(logistic(eta))
}

/// Result of the estimating-equation solver on a reduced design.
#[derive(Debug, Clone)]
pub struct QuasiBinomialFit {
    pub beta: Vec<f64>,
    pub robust_se: Vec<f64>,
    pub iterations: usize,
    pub max_score: f64,
}

/// Solves Σ wᵢ xᵢ (yᵢ − expit(xᵢᵀβ)) = 0 by damped Newton steps on the
/// concave quasi-log-likelihood. `groups` clusters rows for the sandwich
/// variance.
pub fn fit_quasi_binomial(
    x: &[Vec<f64>],
    y: &[f64],
    w: &[f64],
    groups: &[usize],
) -> Result<QuasiBinomialFit, EnsembleError> {
    let n = x.len();
    if n == 0 {
        return Err(EnsembleError::Input("empty design".into()));
    }
    let p = x[0].len();
    let objective = |beta: &DVector<f64>| -> f64 {
        (0..n)
            .map(|i| {
                let eta: f64 = x[i].iter().zip(beta.iter()).map(|(a, b)| a * b).sum();
                w[i] * (y[i] * eta - softplus(eta))
            })
            .sum()
    };
    let score_info = |beta: &DVector<f64>| -> (DVector<f64>, DMatrix<f64>) {
        let mut u = DVector::zeros(p);
        let mut info = DMatrix::zeros(p, p);
        for i in 0..n {
            let eta: f64 = x[i].iter().zip(beta.iter()).map(|(a, b)| a * b).sum();
            let mu = logistic(eta);
            let r = w[i] * (y[i] - mu);
            let v = w[i] * mu * (1.0 - mu);
            for a in 0..p {
                u[a] += r * x[i][a];
                for b in 0..=a {
                    info[(a, b)] += v * x[i][a] * x[i][b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                info[(b, a)] = info[(a, b)];
            }
        }
        (u, info)
    };

    let mut beta = DVector::zeros(p);
    let mut obj = objective(&beta);
    let mut iterations = 0;
    loop {
        let (u, info) = score_info(&beta);
        let max_score = u.amax();
        if max_score < SCORE_TOL {
            let robust_se = sandwich(x, y, w, groups, &beta, &info)?;
            return Ok(QuasiBinomialFit {
                beta: beta.iter().copied().collect(),
                robust_se,
                iterations,
                max_score,
            });
        }
        if iterations == MAX_ITER {
            return Err(EnsembleError::NoConvergence {
                iterations,
                max_score,
            });
        }
        iterations += 1;
        let chol = info.clone().cholesky().ok_or(EnsembleError::Collinear)?;
        let step = chol.solve(&u);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand = &beta + &step * t;
            let c_obj = objective(&cand);
            if c_obj >= obj - 1e-12 * obj.abs().max(1.0) {
                beta = cand;
                obj = c_obj.max(obj);
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(EnsembleError::NoConvergence {
                iterations,
                max_score,
            });
        }
        let max_eta = x
            .iter()
            .map(|xi| {
                xi.iter()
                    .zip(beta.iter())
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    .abs()
            })
            .fold(0.0, f64::max);
        if max_eta > SATURATION {
            return Err(EnsembleError::Separation { max_eta });
        }
    }
}

fn sandwich(
    x: &[Vec<f64>],
    y: &[f64],
    w: &[f64],
    groups: &[usize],
    beta: &DVector<f64>,
    info: &DMatrix<f64>,
) -> Result<Vec<f64>, EnsembleError> {
    let p = beta.len();
    let mut meat = DMatrix::zeros(p, p);
    let mut cluster = DVector::<f64>::zeros(p);
    let mut current: Option<usize> = None;
    // Rows of one group may be scattered; order them by group first.
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by_key(|&i| groups[i]);
    for &i in &order {
        if current.is_some_and(|g| g != groups[i]) {
            meat += &cluster * cluster.transpose();
            cluster.fill(0.0);
        }
        current = Some(groups[i]);
        let eta: f64 = x[i].iter().zip(beta.iter()).map(|(a, b)| a * b).sum();
        let r = w[i] * (y[i] - logistic(eta));
        for a in 0..p {
            cluster[a] += r * x[i][a];
        }
    }
    meat += &cluster * cluster.transpose();
    let bread = info.clone().try_inverse().ok_or(EnsembleError::Collinear)?;
    let v = &bread * meat * &bread;
    Ok((0..p).map(|a| v[(a, a)].max(0.0).sqrt()).collect())
}

fn fit(
    frame: &TrainingFrame,
    kind: EnsembleKind,
    keep: &[usize],
) -> Result<FittedEnsemble, EnsembleError> {
    let rows: &[FrameRow] = &frame.rows;
    if rows.is_empty() {
        return Err(EnsembleError::Input("training frame has no rows".into()));
    }
    let first = rows[0].y;
    if rows.iter().all(|r| r.y == first) {
        return Err(EnsembleError::Input(
            "pseudo-outcome has a single level".into(),
        ));
    }
    let x: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let full = design(kind, r.p1, r.p2, r.tau);
            keep.iter().map(|&j| full[j]).collect()
        })
        .collect();
    let y: Vec<f64> = rows.iter().map(|r| r.y).collect();
    let w: Vec<f64> = rows.iter().map(|r| r.weight).collect();
    let groups: Vec<usize> = rows.iter().map(|r| r.group).collect();
    let qb = fit_quasi_binomial(&x, &y, &w, &groups)?;

    let n_coef = kind.n_coefficients();
    let mut coefficients = vec![0.0; n_coef];
    let mut se = vec![0.0; n_coef];
    for (k, &j) in keep.iter().enumerate() {
        coefficients[j] = qb.beta[k];
        se[j] = qb.robust_se[k];
    }
    let dropped = (0..n_coef).filter(|j| !keep.contains(j)).collect();
    Ok(FittedEnsemble {
        schema_version: ENSEMBLE_SCHEMA_VERSION,
        kind,
        coefficients,
        robust_se: Some(se),
        transform: frame.transform,
        tau_grid: frame.tau_grid.clone(),
        provenance: Provenance {
            training_hash: None,
            created: None,
            n_rows: rows.len(),
            n_groups: frame.n_groups,
            iterations: qb.iterations,
            dropped_columns: dropped,
        },
    })
}

/// Fixed-horizon stack (1, p₁, p₂, p₁p₂) on a single-τ frame.
pub fn fit_ensemble_fixed(frame: &TrainingFrame) -> Result<FittedEnsemble, EnsembleError> {
    if frame.tau_grid.len() != 1 {
        return Err(EnsembleError::Input(format!(
            "fixed-horizon fit needs one τ, frame has {}",
            frame.tau_grid.len()
        )));
    }
    fit(frame, EnsembleKind::FixedHorizon, &[0, 1, 2, 3])
}

/// Time-interaction stack over all horizons in the frame, independence
/// working correlation, robust variances clustered by proband. With a single
/// horizon the τ columns are constant multiples of the base columns, so they
/// are dropped and reported as zero.
pub fn fit_ensemble_time(frame: &TrainingFrame) -> Result<FittedEnsemble, EnsembleError> {
    let keep: Vec<usize> = if frame.tau_grid.len() == 1 {
        (0..4).collect()
    } else {
        (0..8).collect()
    };
    fit(frame, EnsembleKind::TimeVarying, &keep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coefficients_predict_half() {
        let m = FittedEnsemble::from_coefficients(
            EnsembleKind::FixedHorizon,
            vec![0.0; 4],
            Transform::Sqrt,
            vec![5],
        )
        .unwrap();
        assert_eq!(predict_ensemble(&m, 0.3, 0.01, 5).unwrap(), 0.5);
    }

    #[test]
    fn unsupported_horizon() {
        let m = FittedEnsemble::from_coefficients(
            EnsembleKind::FixedHorizon,
            vec![0.0; 4],
            Transform::Sqrt,
            vec![5],
        )
        .unwrap();
        assert!(matches!(
            predict_ensemble(&m, 0.3, 0.01, 6),
            Err(EnsembleError::UnsupportedHorizon { .. })
        ));
        let t = FittedEnsemble::from_coefficients(
            EnsembleKind::TimeVarying,
            vec![0.0; 8],
            Transform::Sqrt,
            vec![1, 2, 3],
        )
        .unwrap();
        assert!(predict_ensemble(&t, 0.3, 0.01, 3).is_ok());
        assert!(predict_ensemble(&t, 0.3, 0.01, 4).is_err());
    }

    #[test]
    fn coefficient_count_checked() {
        assert!(FittedEnsemble::from_coefficients(
            EnsembleKind::TimeVarying,
            vec![0.0; 4],
            Transform::Sqrt,
            vec![5]
        )
        .is_err());
    }
}
