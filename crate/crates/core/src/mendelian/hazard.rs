//! Conversion between per-year penetrance and cause-specific hazard under
//! competing mortality, and discrete-time cumulative incidence.

use super::MendelianError;

/// Cause-specific hazard from per-year penetrance:
/// λ(t) = pen(t) / Π_{u<t} (1 − λ(u) − λ_D(u)).
///
/// Index 0 of every array is age 1.
pub fn hazard_from_penetrance(pen: &[f64], mortality: &[f64]) -> Result<Vec<f64>, MendelianError> {
    if pen.len() != mortality.len() {
        return Err(MendelianError::Integrity {
            age: 0,
            message: format!(
                "penetrance has {} ages, mortality {}",
                pen.len(),
                mortality.len()
            ),
        });
    }
    let mut out = Vec::with_capacity(pen.len());
    let mut surv = 1.0;
    for (i, (&p, &d)) in pen.iter().zip(mortality).enumerate() {
        let age = (i + 1) as u32;
        if surv <= 0.0 {
            if p == 0.0 {
                // Nobody left at risk; any hazard is consistent. Keep zero.
                out.push(0.0);
                continue;
            }
            return Err(MendelianError::Integrity {
                age,
                message: "survivor product reached zero with positive penetrance".into(),
            });
        }
        let h = p / surv;
        if !(0.0..=1.0).contains(&h) || h + d > 1.0 + 1e-12 {
            return Err(MendelianError::Integrity {
                age,
                message: format!("hazard {h} with mortality {d} is not a valid probability"),
            });
        }
        out.push(h);
        surv *= 1.0 - h - d;
    }
    Ok(out)
}

/// Inverse of [`hazard_from_penetrance`]: pen(t) = λ(t) Π_{u<t} (1 − λ(u) − λ_D(u)).
pub fn penetrance_from_hazard(hazard: &[f64], mortality: &[f64]) -> Vec<f64> {
    let mut surv = 1.0;
    hazard
        .iter()
        .zip(mortality)
        .map(|(&h, &d)| {
            let p = h * surv;
            surv *= 1.0 - h - d;
            p
        })
        .collect()
}

/// Σ_{t=a+1}^{a+τ} λ(t) Π_{u=a+1}^{t−1} (1 − λ(u) − λ_D(u)) with hazards
/// supplied per age by closures. Returns an error if the survivor factor
/// turns negative.
pub fn cumulative_incidence(
    a: u32,
    tau: u32,
    hazard: impl Fn(u32) -> f64,
    survival_step: impl Fn(u32) -> f64,
) -> Result<f64, MendelianError> {
    let mut surv = 1.0;
    let mut risk = 0.0;
    for t in a + 1..=a + tau {
        risk += hazard(t) * surv;
        let s = survival_step(t);
        if s < 0.0 {
            return Err(MendelianError::Integrity {
                age: t,
                message: format!("per-year survivor factor {s} is negative"),
            });
        }
        surv *= s;
    }
    Ok(risk)
}
