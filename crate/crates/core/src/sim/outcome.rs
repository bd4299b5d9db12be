//! Future breast cancer or death for a proband under the combined model.

use rand::Rng;

use crate::cohort::EventType;
use crate::combine::{normalized_relative_hazard, CombineOptions};
use crate::mendelian::{check_horizon, Genotype, MendelianError};
use crate::params::{ParamError, ParameterSet};
use crate::pedigree::{Race, RiskFactors};
use crate::relhaz::AgeBand;

/// Yearly event probabilities (breast, death) for ages a+1..=a+τ.
pub fn outcome_hazards(
    params: &ParameterSet,
    genotype: Genotype,
    race: Race,
    x: &RiskFactors,
    a: u32,
    tau: u32,
    opts: &CombineOptions,
) -> Result<Vec<(f64, f64)>, MendelianError> {
    check_horizon(a, tau)?;
    let hb = params.penetrance.breast_hazard(genotype, race)?;
    let hd = params.penetrance.mortality(race)?;
    let mut x = *x;
    if !opts.include_family_history {
        x.affected_first_degree = 0;
    }
    let r0 = |band: AgeBand| -> Result<f64, ParamError> {
        let coeffs = params.relhaz.for_race(race)?;
        normalized_relative_hazard(
            band.representative_age(),
            &x,
            coeffs,
            &params.normalization,
            race,
        )
    };
    let (lo, hi) = (r0(AgeBand::Under50)?, r0(AgeBand::From50)?);
    Ok((a + 1..=a + tau)
        .map(|t| {
            let i = (t - 1) as usize;
            let b = if genotype == Genotype::NonCarrier {
                let r = if AgeBand::of(t as f64) == AgeBand::From50 {
                    hi
                } else {
                    lo
                };
                1.0 - (1.0 - hb[i]).powf(r)
            } else {
                hb[i]
            };
            (b, hd[i])
        })
        .collect())
}

/// Discrete yearly draws: breast cancer with probability λ_B, otherwise death
/// with probability λ_D. Returns (years from baseline, event); no event
/// within the horizon gives (τ, Censored).
pub fn simulate_outcome<R: Rng>(hazards: &[(f64, f64)], rng: &mut R) -> (f64, EventType) {
    for (k, &(b, d)) in hazards.iter().enumerate() {
        let u: f64 = rng.random();
        if u < b {
            return ((k + 1) as f64, EventType::Breast);
        }
        if u < b + d {
            return ((k + 1) as f64, EventType::Death);
        }
    }
    (hazards.len() as f64, EventType::Censored)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn degenerate_hazards() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        assert_eq!(
            simulate_outcome(&[(0.0, 0.0); 5], &mut rng),
            (5.0, EventType::Censored)
        );
        assert_eq!(
            simulate_outcome(&[(1.0, 0.0), (0.0, 0.0)], &mut rng),
            (1.0, EventType::Breast)
        );
    }
}
