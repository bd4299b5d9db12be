//! Acceptance suite: one PASS/FAIL line per criterion, then a non-zero exit
//! if any failed. Runs without a test harness so the lines always print.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use riskfuse_cli::commands::{cmd_simulate, SimulateArgs};
use riskfuse_cli::replica::{run_replica, ReplicaOptions};
use riskfuse_core::ensemble::censoring::stratum_key;
use riskfuse_core::ensemble::{
    build_training_frame, fit_ensemble_fixed, fit_ensemble_time, km_censoring, predict_ensemble,
    CensoringModel, EnsembleKind, FittedEnsemble, FrameOptions, Transform,
};
use riskfuse_core::eval::{
    auc_ipcw, bootstrap_compare, brier_ipcw, log_score, oe_ratio, prepare_records, snb, uno_c,
    BootstrapConfig, Metric,
};
use riskfuse_core::mendelian::hazard::{hazard_from_penetrance, penetrance_from_hazard};
use riskfuse_core::mendelian::MendelianError;
use riskfuse_core::params::NormalizationTable;
use riskfuse_core::sim::{simulate_cohort, SimConfig};
use riskfuse_core::{
    brcapro_risk, carrier_posterior, combined_risk_m, normalized_relative_hazard, CombineOptions,
    Race, RiskFactors,
};

use common::cohorts::uncensored_cohort;
use common::irls::logistic_irls;
use common::metric_fixture::{censored_cohort, close, fixture, records};
use common::peeling::{enumerate, non_skeleton};
use common::tables::{max_diff, random_hazard_table, random_penetrance_table};

type Check = Result<String, String>;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn sim_config() -> SimConfig {
    serde_json::from_slice(&std::fs::read(root().join("configs/sim_study.json")).unwrap()).unwrap()
}

fn require(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn peeling_oracle() -> Check {
    let params = common::params();
    let table = &params.penetrance;
    let mut rng = ChaCha20Rng::seed_from_u64(0xb1a5);
    let start = Instant::now();
    let (mut checked, mut worst) = (0, 0.0f64);
    while checked < 500 {
        let size = rng.random_range(1..=6);
        let p = common::random_pedigree(&mut rng, size);
        if non_skeleton(&p) > 3 {
            continue;
        }
        match (carrier_posterior(&p, table), enumerate(&p, table)) {
            (Ok(post), Some(o)) => {
                for g in 0..4 {
                    worst = worst.max((post.probs[g] - o[g]).abs());
                }
            }
            (Err(MendelianError::InconsistentEvidence), None) => {}
            (got, want) => return Err(format!("disagreement: {got:?} vs {want:?}")),
        }
        checked += 1;
    }
    let t = start.elapsed();
    require(
        worst < 1e-10 && t < Duration::from_secs(60),
        format!("500 pedigrees, max |diff| {worst:.2e}, {t:.1?}"),
    )
}

fn hazard_round_trip() -> Check {
    let mut rng = ChaCha20Rng::seed_from_u64(0x4a2a);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (h, d) = random_hazard_table(&mut rng);
        worst = worst.max(max_diff(
            &h,
            &hazard_from_penetrance(&penetrance_from_hazard(&h, &d), &d).unwrap(),
        ));
        let (pen, d) = random_penetrance_table(&mut rng);
        worst = worst.max(max_diff(
            &pen,
            &penetrance_from_hazard(&hazard_from_penetrance(&pen, &d).unwrap(), &d),
        ));
    }
    require(
        worst < 1e-12,
        format!("100 tables each way, max |diff| {worst:.2e}"),
    )
}

fn projection_oracle() -> Check {
    let params = common::params();
    let start = Instant::now();
    let failures = common::projection::check_configs(&params, 0x5eed + 1);
    let t = start.elapsed();
    require(
        failures.is_empty() && t < Duration::from_secs(300),
        format!("10 configurations x 2 projections, 1e7 lifetimes each, {} outside 3 SE, {t:.1?} {failures:?}", failures.len()),
    )
}

fn reductions() -> Check {
    let mut params = common::params();
    params.normalization = NormalizationTable::unit();
    let x = RiskFactors::baseline();
    let mut rng = ChaCha20Rng::seed_from_u64(71);
    let (mut worst, mut compared) = (0.0f64, 0);
    for _ in 0..600 {
        let n = rng.random_range(1..=10);
        let p = common::random_pedigree(&mut rng, n);
        let a = p.proband().age();
        let tau = rng.random_range(1..=(94 - a).min(30));
        match (
            combined_risk_m(&p, &x, a, tau, &params, &CombineOptions::default()),
            brcapro_risk(&p, &params.penetrance, a, tau),
        ) {
            (Ok(m), Ok(b)) => {
                worst = worst.max((m - b).abs());
                compared += 1;
            }
            (Err(_), Err(_)) => {}
            (m, b) => return Err(format!("outcomes disagree: {m:?} vs {b:?}")),
        }
    }

    let mut fit_worst = 0.0f64;
    for (taus, n, seed) in [(vec![5], 4000, 73), (vec![1, 2, 3, 4, 5], 3000, 74)] {
        let (cohort, preds) = uncensored_cohort(n, &taus, seed);
        let frame = build_training_frame(
            &cohort,
            &preds,
            &taus,
            &CensoringModel::none(),
            None,
            FrameOptions::default(),
        )
        .map_err(|e| e.to_string())?;
        let time = taus.len() > 1;
        let fitted = if time {
            fit_ensemble_time(&frame)
        } else {
            fit_ensemble_fixed(&frame)
        }
        .map_err(|e| e.to_string())?;
        let x: Vec<Vec<f64>> = frame
            .rows
            .iter()
            .map(|r| {
                let base = [1.0, r.p1, r.p2, r.p1 * r.p2];
                let mut v = base.to_vec();
                if time {
                    v.extend(base.iter().map(|b| b * r.tau));
                }
                v
            })
            .collect();
        let y: Vec<f64> = frame.rows.iter().map(|r| r.y).collect();
        fit_worst = fit_worst.max(max_diff(&fitted.coefficients, &logistic_irls(&x, &y)));
    }

    let mut half = true;
    for transform in [Transform::Sqrt, Transform::None] {
        let fixed = FittedEnsemble::from_coefficients(
            EnsembleKind::FixedHorizon,
            vec![0.0; 4],
            transform,
            vec![5],
        )
        .unwrap();
        let time = FittedEnsemble::from_coefficients(
            EnsembleKind::TimeVarying,
            vec![0.0; 8],
            transform,
            (1..=10).collect(),
        )
        .unwrap();
        for (p1, p2) in [(0.0, 0.0), (0.01, 0.3), (0.5, 0.5), (1.0, 1.0)] {
            half &= predict_ensemble(&fixed, p1, p2, 5).unwrap() == 0.5;
            half &= (1..=10).all(|t| predict_ensemble(&time, p1, p2, t).unwrap() == 0.5);
        }
    }
    require(
        compared >= 250 && worst < 1e-12 && fit_worst < 1e-6 && half,
        format!(
            "combined vs brcapro max |diff| {worst:.2e} on {compared}; fit vs IRLS max |diff| {fit_worst:.2e}; zero coefficients give 0.5: {half}"
        ),
    )
}

fn replica() -> Check {
    let cfg = sim_config();
    let opts = ReplicaOptions {
        families: 100_000,
        seed: 20240601,
        bootstrap: 1000,
        tau: cfg.tau,
        tau_grid: (1..=cfg.tau).collect(),
    };
    let start = Instant::now();
    let r = run_replica(common::params(), &cfg, &opts).map_err(|e| e.to_string())?;
    let oe = |m: &str| r.oe[m];
    let a = (0.90..=1.10).contains(&oe("combined_m"));
    let b = r.auc_m_not_worse_share >= 0.90;
    let c = (0.90..=1.10).contains(&oe("lr1")) && (0.90..=1.10).contains(&oe("lr2"));
    let d = oe("brcapro") > 1.05 && oe("bcrat") > 1.05;
    require(
        a && b && c && d,
        format!(
            "{} probands, {} validation, {:.1} cases; (a) O/E M {:.3} {}; (b) AUC share {:.3} {}; (c) O/E LR1 {:.3} LR2 {:.3} {}; (d) O/E BRCAPRO {:.3} BCRAT {:.3} {}; {:.1?}",
            r.summary.probands,
            r.n_validation,
            r.validation_cases,
            oe("combined_m"),
            verdict(a),
            r.auc_m_not_worse_share,
            verdict(b),
            oe("lr1"),
            oe("lr2"),
            verdict(c),
            oe("brcapro"),
            oe("bcrat"),
            verdict(d),
            start.elapsed()
        ),
    )
}

fn metric_fixtures() -> Check {
    let (p, recs) = fixture();
    let l = |x: f64| -x.ln();
    let hand = [
        ("O/E", oe_ratio(&p, &recs), 72.0 / 49.0),
        ("AUC", auc_ipcw(&p, &recs), 71.0 / 171.0),
        ("Brier", brier_ipcw(&p, &recs), 1417.0 / 5600.0),
        (
            "log score",
            log_score(&p, &recs),
            (8.0 / 7.0 * (l(0.30) + l(0.75))
                + 10.0 / 7.0 * (l(0.15) + l(0.95) + l(0.70) + l(0.60)))
                / 8.0,
        ),
        ("SNB", snb(&p, &recs, 0.2), 1.0 / 18.0),
        ("Uno C", uno_c(&p, &recs, 5.0), 97.0 / 171.0),
    ];
    let wrong: Vec<String> = hand
        .iter()
        .filter(|(_, got, want)| !got.as_ref().is_ok_and(|g| close(*g, *want)))
        .map(|(name, got, want)| format!("{name} {got:?} vs {want}"))
        .collect();

    let (cohort, risk) = censored_cohort(10_000, 81);
    let recs = records(&cohort);
    let mut rng = ChaCha20Rng::seed_from_u64(82);
    let permuted = |rng: &mut ChaCha20Rng| {
        let mut p = risk.clone();
        rand::seq::SliceRandom::shuffle(p.as_mut_slice(), rng);
        uno_c(&p, &recs, 10.0).unwrap()
    };
    let c = permuted(&mut rng);
    let reference: Vec<f64> = (0..200).map(|_| permuted(&mut rng)).collect();
    let mean = reference.iter().sum::<f64>() / reference.len() as f64;
    let se = (reference.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
        / (reference.len() - 1) as f64)
        .sqrt();
    let null_ok = (c - 0.5).abs() <= 3.0 * se;
    require(
        wrong.is_empty() && null_ok,
        format!(
            "{} of 6 fixture values exact {wrong:?}; permuted Uno C {c:.4} (SE {se:.4})",
            6 - wrong.len()
        ),
    )
}

fn logit(p: f64) -> f64 {
    p.ln() - (-p).ln_1p()
}

fn published_coefficients() -> Check {
    let params = common::params();
    let coeffs = params.relhaz.for_race(Race::White).unwrap();
    let r = normalized_relative_hazard(
        40.0,
        &RiskFactors::baseline(),
        coeffs,
        &params.normalization,
        Race::White,
    )
    .map_err(|e| e.to_string())?;
    let fixed = FittedEnsemble::from_coefficients(
        EnsembleKind::FixedHorizon,
        vec![2.55, 0.86, 1.21, 0.11],
        Transform::Sqrt,
        vec![5],
    )
    .unwrap();
    let time = FittedEnsemble::from_coefficients(
        EnsembleKind::TimeVarying,
        vec![-10.28, 43.11, 38.30, 0.35, -257.23, -3.21, -2.42, 22.98],
        Transform::Sqrt,
        (1..=8).collect(),
    )
    .unwrap();
    let cases = [
        (predict_ensemble(&fixed, 0.04, 0.09, 5).unwrap(), 3.0916),
        (predict_ensemble(&fixed, 0.25, 0.01, 5).unwrap(), 3.1065),
        (predict_ensemble(&time, 0.04, 0.09, 1).unwrap(), -247.3662),
        (predict_ensemble(&time, 0.25, 0.01, 2).unwrap(), -500.7335),
    ];
    let worst = cases
        .iter()
        .map(|(p, want)| (logit(*p) - want).abs())
        .fold(0.0, f64::max);
    require(
        r == 1.81 && worst < 1e-12,
        format!("baseline White <50 factor {r}; max logit error {worst:.2e}"),
    )
}

fn simulate_to(dir: &Path, name: &str) -> Result<Vec<u8>, String> {
    let out = dir.join(name);
    cmd_simulate(&SimulateArgs {
        params: common::params_dir(),
        config: root().join("configs/sim_study.json"),
        n: 5_000,
        seed: 20240601,
        out: out.clone(),
        split: false,
    })
    .map_err(|e| e.to_string())?;
    std::fs::read(out).map_err(|e| e.to_string())
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (
        simulate_to(dir.path(), "a.jsonl")?,
        simulate_to(dir.path(), "b.jsonl")?,
    );
    let sim_same = a == b;

    let params = common::params();
    let (cohort, _) =
        simulate_cohort(5_000, &sim_config(), &params, 20240602).map_err(|e| e.to_string())?;
    let records_: Vec<_> = cohort.into_iter().map(|p| p.record).collect();
    let g = km_censoring(&records_, stratum_key).map_err(|e| e.to_string())?;
    let recs = prepare_records(&records_, |i| records_[i].id.clone(), 5.0, &g)
        .map_err(|e| e.to_string())?;
    let preds: Vec<Vec<f64>> = [0.02, 0.03]
        .iter()
        .map(|s| {
            records_
                .iter()
                .map(|r| s * (1.0 + r.baseline_age as f64 / 100.0))
                .collect()
        })
        .collect();
    let cfg = BootstrapConfig {
        replicates: 200,
        seed: 20240601,
        ..Default::default()
    };
    let run = || {
        bootstrap_compare(
            &["a".into(), "b".into()],
            &preds,
            &recs,
            &[Metric::Auc, Metric::Brier, Metric::Oe],
            &cfg,
        )
        .map(|r| serde_json::to_vec(&r).unwrap())
        .map_err(|e| e.to_string())
    };
    let boot_same = run()? == run()?;
    require(
        sim_same && boot_same,
        format!(
            "simulate {} bytes identical: {sim_same}; bootstrap report identical: {boot_same}",
            a.len()
        ),
    )
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("peeling oracle", peeling_oracle),
        ("hazard/penetrance round trip", hazard_round_trip),
        ("risk projection oracle", projection_oracle),
        ("reduction identities", reductions),
        ("simulation study replica", replica),
        ("metric fixtures", metric_fixtures),
        ("published-coefficient fixtures", published_coefficients),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
