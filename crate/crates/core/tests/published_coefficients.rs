//! Published normalization factors and ensemble coefficients, evaluated
//! against hand arithmetic.

mod common;

use riskfuse_core::ensemble::{predict_ensemble, EnsembleKind, FittedEnsemble, Transform};
use riskfuse_core::{normalized_relative_hazard, Race, RiskFactors};

#[test]
fn baseline_profile_returns_the_published_factor() {
    let params = common::params();
    let coeffs = params.relhaz.for_race(Race::White).unwrap();
    let x = RiskFactors::baseline();
    for t in [20.0, 35.0, 40.0, 49.9] {
        assert_eq!(
            normalized_relative_hazard(t, &x, coeffs, &params.normalization, Race::White).unwrap(),
            1.81
        );
    }
    for t in [50.0, 60.0, 89.0] {
        assert_eq!(
            normalized_relative_hazard(t, &x, coeffs, &params.normalization, Race::White).unwrap(),
            1.96
        );
    }
}

#[test]
fn every_race_carries_the_published_pair() {
    let params = common::params();
    let x = RiskFactors::baseline();
    let table = [
        (Race::White, 1.81, 1.96),
        (Race::Black, 1.41, 1.44),
        (Race::Hispanic, 1.37, 1.41),
        (Race::Asian, 2.10, 2.43),
        (Race::NativeAmerican, 1.55, 1.94),
    ];
    for (race, young, old) in table {
        let coeffs = params.relhaz.for_race(race).unwrap();
        assert_eq!(
            normalized_relative_hazard(40.0, &x, coeffs, &params.normalization, race).unwrap(),
            young
        );
        assert_eq!(
            normalized_relative_hazard(60.0, &x, coeffs, &params.normalization, race).unwrap(),
            old
        );
    }
}

fn logit(p: f64) -> f64 {
    p.ln() - (-p).ln_1p()
}

#[test]
fn fixed_horizon_weights_reproduce_hand_logit() {
    let m = FittedEnsemble::from_coefficients(
        EnsembleKind::FixedHorizon,
        vec![2.55, 0.86, 1.21, 0.11],
        Transform::Sqrt,
        vec![5],
    )
    .unwrap();
    // √0.04 = 0.2, √0.09 = 0.3: 2.55 + 0.172 + 0.363 + 0.0066
    let p = predict_ensemble(&m, 0.04, 0.09, 5).unwrap();
    assert!((logit(p) - 3.0916).abs() < 1e-12, "logit {}", logit(p));
    // √0.25 = 0.5, √0.01 = 0.1: 2.55 + 0.43 + 0.121 + 0.0055
    let p = predict_ensemble(&m, 0.25, 0.01, 5).unwrap();
    assert!((logit(p) - 3.1065).abs() < 1e-12, "logit {}", logit(p));
}

#[test]
fn time_varying_weights_reproduce_hand_logit() {
    let beta = vec![-10.28, 43.11, 38.30, 0.35, -257.23, -3.21, -2.42, 22.98];
    let m = FittedEnsemble::from_coefficients(
        EnsembleKind::TimeVarying,
        beta,
        Transform::Sqrt,
        (1..=8).collect(),
    )
    .unwrap();
    // τ = 1, √p = (0.2, 0.3):
    // −10.28 + 8.622 + 11.49 + 0.021 − 257.23 − 0.642 − 0.726 + 1.3788
    let p = predict_ensemble(&m, 0.04, 0.09, 1).unwrap();
    assert!((logit(p) - -247.3662).abs() < 1e-12, "logit {}", logit(p));
    // τ = 2, √p = (0.5, 0.1):
    // −10.28 + 21.555 + 3.83 + 0.0175 − 514.46 − 3.21 − 0.484 + 2.298
    let p = predict_ensemble(&m, 0.25, 0.01, 2).unwrap();
    assert!((logit(p) - -500.7335).abs() < 1e-12, "logit {}", logit(p));
}
