//! Relative-hazard (Gail-type) model: covariate relative hazard, population
//! attributable risk and absolute risk over a piecewise-constant hazard grid.
//!
//! Coefficient indices (1-based, stored 0-based):
//!
//! | β | active when |
//! |---|-------------|
//! | 1, 2 | menarche 12–13, < 12 |
//! | 3, 4 | one biopsy, two or more |
//! | 5 | age ≥ 50 and one biopsy |
//! | 6 | age ≥ 50 and any biopsy |
//! | 7, 8, 9 | first live birth 20–24, 25–29, ≥ 30 |
//! | 10, 11 | one, two or more affected first-degree relatives |
//! | 12–14 | one affected relative × first birth 20–24 / 25–29 / ≥ 30 |
//! | 15–17 | two or more affected × first birth 20–24 / 25–29 / ≥ 30 |
//! | 18, 19 | any biopsy with hyperplasia absent / present |

use serde::{Deserialize, Serialize};

use crate::params::{HazardInterval, ParamError, ParameterSet};
use crate::pedigree::{Biopsies, Hyperplasia, Race, RiskFactors};

#[derive(Debug, thiserror::Error)]
pub enum RelHazError {
    #[error("projection window [{a}, {a} + {tau}] outside the supported ages 20..90")]
    AgeOutOfRange { a: f64, tau: f64 },
    #[error("covariate distribution: {0}")]
    Distribution(String),
    #[error(transparent)]
    Param(#[from] ParamError),
}

pub const MIN_AGE: f64 = 20.0;
pub const MAX_AGE: f64 = 90.0;
/// Age at which the relative hazard and (1 − AR) switch bands.
pub const BAND_BREAK: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgeBand {
    Under50 = 0,
    From50 = 1,
}

impl AgeBand {
    pub fn of(t: f64) -> AgeBand {
        if t >= BAND_BREAK {
            AgeBand::From50
        } else {
            AgeBand::Under50
        }
    }

    /// An age inside the band, for evaluating band-constant quantities.
    pub fn representative_age(self) -> f64 {
        match self {
            AgeBand::Under50 => 40.0,
            AgeBand::From50 => 60.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MenarcheCategory {
    AtLeast14,
    From12To13,
    Under12,
}

impl MenarcheCategory {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ge14" => Some(MenarcheCategory::AtLeast14),
            "12_13" => Some(MenarcheCategory::From12To13),
            "lt12" => Some(MenarcheCategory::Under12),
            _ => None,
        }
    }

    pub fn representative(self) -> u32 {
        match self {
            MenarcheCategory::AtLeast14 => 14,
            MenarcheCategory::From12To13 => 12,
            MenarcheCategory::Under12 => 11,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FirstBirthCategory {
    Under20,
    From20To24,
    From25To29,
    AtLeast30,
}

impl FirstBirthCategory {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lt20" => Some(FirstBirthCategory::Under20),
            "20_24" => Some(FirstBirthCategory::From20To24),
            "25_29" => Some(FirstBirthCategory::From25To29),
            "ge30" => Some(FirstBirthCategory::AtLeast30),
            _ => None,
        }
    }

    pub fn of(age: u32) -> Self {
        match age {
            0..=19 => FirstBirthCategory::Under20,
            20..=24 => FirstBirthCategory::From20To24,
            25..=29 => FirstBirthCategory::From25To29,
            _ => FirstBirthCategory::AtLeast30,
        }
    }

    pub fn representative(self) -> u32 {
        match self {
            FirstBirthCategory::Under20 => 19,
            FirstBirthCategory::From20To24 => 22,
            FirstBirthCategory::From25To29 => 27,
            FirstBirthCategory::AtLeast30 => 30,
        }
    }
}

/// Covariate distribution for one (race, band): independent menarche, biopsy
/// and hyperplasia factors and a joint (first birth, affected relatives)
/// block. Affected-relative counts are capped at 2.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CovariateTable {
    pub menarche: Vec<(MenarcheCategory, f64)>,
    pub biopsies: Vec<(Biopsies, f64)>,
    pub hyperplasia: Vec<(Hyperplasia, f64)>,
    pub joint: Vec<(FirstBirthCategory, u32, f64)>,
}

impl CovariateTable {
    pub fn check_normalized(&self) -> Result<(), RelHazError> {
        let sums = [
            (
                "menarche",
                self.menarche.iter().map(|e| e.1).collect::<Vec<_>>(),
            ),
            ("biopsies", self.biopsies.iter().map(|e| e.1).collect()),
            (
                "hyperplasia",
                self.hyperplasia.iter().map(|e| e.1).collect(),
            ),
            (
                "first_birth_x_affected",
                self.joint.iter().map(|e| e.2).collect(),
            ),
        ];
        for (name, ps) in sums {
            if ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(RelHazError::Distribution(format!(
                    "{name} has a probability outside [0,1]"
                )));
            }
            let s: f64 = ps.iter().sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(RelHazError::Distribution(format!(
                    "{name} probabilities sum to {s}"
                )));
            }
        }
        Ok(())
    }
}

/// 0/1 design of the 19 indicators at age t.
pub fn indicators(t: f64, x: &RiskFactors) -> [f64; 19] {
    let mut z = [0.0; 19];
    let mut on = |i: usize| z[i - 1] = 1.0;
    match x.age_at_menarche {
        Some(12..=13) => on(1),
        Some(m) if m < 12 => on(2),
        _ => {}
    }
    let older = t >= BAND_BREAK;
    let biopsies = match x.num_biopsies {
        Biopsies::Zero | Biopsies::Unknown => 0,
        Biopsies::One => 1,
        Biopsies::TwoOrMore => 2,
    };
    match biopsies {
        1 => on(3),
        2 => on(4),
        _ => {}
    }
    if older && biopsies == 1 {
        on(5);
    }
    if older && biopsies >= 1 {
        on(6);
    }
    let fb = FirstBirthCategory::of(x.age_first_live_birth);
    let fb_offset = match fb {
        FirstBirthCategory::Under20 => None,
        FirstBirthCategory::From20To24 => Some(0),
        FirstBirthCategory::From25To29 => Some(1),
        FirstBirthCategory::AtLeast30 => Some(2),
    };
    if let Some(k) = fb_offset {
        on(7 + k);
    }
    match x.affected_first_degree.min(2) {
        1 => {
            on(10);
            if let Some(k) = fb_offset {
                on(12 + k);
            }
        }
        2 => {
            on(11);
            if let Some(k) = fb_offset {
                on(15 + k);
            }
        }
        _ => {}
    }
    if biopsies > 0 {
        match x.atypical_hyperplasia {
            Hyperplasia::No => on(18),
            Hyperplasia::Yes => on(19),
            Hyperplasia::Unknown => {}
        }
    }
    z
}

/// r(t, X) = exp(Σ βᵢ zᵢ(t, X)).
pub fn relative_hazard(t: f64, x: &RiskFactors, coeffs: &[f64; 19]) -> f64 {
    let z = indicators(t, x);
    z.iter().zip(coeffs).map(|(z, b)| z * b).sum::<f64>().exp()
}

/// E[r(t, X)] over a factorized covariate distribution.
pub fn expected_relative_hazard(
    dist: &CovariateTable,
    coeffs: &[f64; 19],
    band: AgeBand,
) -> Result<f64, RelHazError> {
    dist.check_normalized()?;
    let t = band.representative_age();
    let mut total = 0.0;
    for &(m, pm) in &dist.menarche {
        for &(b, pb) in &dist.biopsies {
            for &(h, ph) in &dist.hyperplasia {
                for &(fb, aff, pj) in &dist.joint {
                    let x = RiskFactors {
                        age_at_menarche: Some(m.representative()),
                        num_biopsies: b,
                        age_first_live_birth: fb.representative(),
                        affected_first_degree: aff,
                        atypical_hyperplasia: h,
                    };
                    total += pm * pb * ph * pj * relative_hazard(t, &x, coeffs);
                }
            }
        }
    }
    Ok(total)
}

/// AR = 1 − 1 / E[r(t, X)].
pub fn attributable_fraction(
    dist: &CovariateTable,
    coeffs: &[f64; 19],
    band: AgeBand,
) -> Result<f64, RelHazError> {
    Ok(1.0 - 1.0 / expected_relative_hazard(dist, coeffs, band)?)
}

/// Risk of breast cancer in [a, a + τ) and all-cause survival to a + τ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub risk: f64,
    pub survivor: f64,
}

/// Closed-form projection over a piecewise-constant grid. The individual
/// breast hazard on each piece is λ̃_B(t)·(1 − AR(t))·r(t, X); `one_minus_ar`
/// is indexed by [`AgeBand`].
pub fn project_on_grid(
    grid: &[HazardInterval],
    one_minus_ar: [f64; 2],
    coeffs: &[f64; 19],
    x: &RiskFactors,
    a: f64,
    tau: f64,
) -> Result<Projection, RelHazError> {
    let first = grid.first().map_or(MIN_AGE, |g| g.start).max(MIN_AGE);
    let last = grid.last().map_or(MAX_AGE, |g| g.end).min(MAX_AGE);
    if !(a >= first && tau >= 0.0 && a + tau <= last + 1e-12) {
        return Err(RelHazError::AgeOutOfRange { a, tau });
    }
    let end = a + tau;
    let mut surv = 1.0;
    let mut risk = 0.0;
    for iv in grid {
        // Split every interval at the band break so r and (1 − AR) are constant.
        let mut cuts = vec![iv.start];
        if iv.start < BAND_BREAK && BAND_BREAK < iv.end {
            cuts.push(BAND_BREAK);
        }
        cuts.push(iv.end);
        for w in cuts.windows(2) {
            let lo = w[0].max(a);
            let hi = w[1].min(end);
            if hi <= lo {
                continue;
            }
            let band = AgeBand::of(lo);
            let hb = iv.breast * one_minus_ar[band as usize] * relative_hazard(lo, x, coeffs);
            let h = hb + iv.competing;
            let decay = (-h * (hi - lo)).exp();
            if h > 0.0 {
                risk += surv * hb / h * (1.0 - decay);
            }
            surv *= decay;
        }
    }
    Ok(Projection {
        risk,
        survivor: surv,
    })
}

fn one_minus_ar_pair(params: &ParameterSet, race: Race) -> Result<[f64; 2], RelHazError> {
    Ok([
        params.normalization.one_minus_ar(race, AgeBand::Under50)?,
        params.normalization.one_minus_ar(race, AgeBand::From50)?,
    ])
}

/// Absolute risk of breast cancer in [ã, ã + τ) for a woman free of breast
/// cancer at ã, with the shipped baseline grid and normalization.
pub fn bcrat_absolute_risk(
    params: &ParameterSet,
    race: Race,
    x: &RiskFactors,
    a: f64,
    tau: f64,
) -> Result<f64, RelHazError> {
    let grid = params.baseline.for_race(race)?;
    let coeffs = params.relhaz.for_race(race)?;
    Ok(project_on_grid(grid, one_minus_ar_pair(params, race)?, coeffs, x, a, tau)?.risk)
}
