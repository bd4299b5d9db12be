//! The `riskfuse` subcommands. Each takes its parsed arguments and returns
//! the paths it wrote; errors carry a machine-readable JSON form.

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::{Path, PathBuf};

use riskfuse_core::ensemble::{km_censoring, CensoredRows, FittedEnsemble, FrameOptions};
use riskfuse_core::eval::bootstrap::{compute_metric, MetricReport};
use riskfuse_core::eval::{
    bootstrap_compare, calibration_deciles, prepare_records, BootstrapConfig, CalibrationBin,
    Metric,
};
use riskfuse_core::mendelian::Genotype;
use riskfuse_core::pedigree::{pedigree_from_value, stratify_family_history};
use riskfuse_core::relhaz::AgeBand;
use riskfuse_core::sim::{simulate_cohort, SimConfig};
use riskfuse_core::{CohortRecord, FollowUp, ParameterSet, Race};

use crate::error::CliError;
use crate::fmt17::{fmt17, to_string_17};
use crate::manifest::ManifestBuilder;
use crate::pipeline::{
    apply_strata, base_predictions, fit_from_predictions, stratum_label, FitKind, StrataKey,
};
use crate::request::{ModelResult, ScoreRequest};
use crate::scoring::{ModelName, RiskFactorsInput, Scorer};

#[derive(Debug, Parser)]
#[command(
    name = "riskfuse",
    version,
    about = "Combined Mendelian and relative-hazard breast cancer risk models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score probands with one or more models.
    Score(ScoreArgs),
    /// Simulate a cohort under the combined model.
    Simulate(SimulateArgs),
    /// Fit a stacked ensemble on a cohort.
    Fit(FitArgs),
    /// Compare models' predictions against observed outcomes.
    Evaluate(EvaluateArgs),
    /// Export per-age hazards of both base models.
    Hazards(HazardsArgs),
    /// Run the local JSON scoring service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub params: PathBuf,
    /// brcapro, bcrat, combined_m or ensemble:<path>; comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub model: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "5")]
    pub tau: Vec<u32>,
    /// Newline-delimited score requests or cohort records.
    #[arg(long, conflicts_with = "pedigree")]
    pub input: Option<PathBuf>,
    /// Pedigree document(s); each is one proband.
    #[arg(long)]
    pub pedigree: Vec<PathBuf>,
    /// Risk-factor document applied to every `--pedigree`.
    #[arg(long)]
    pub risk_factors: Option<PathBuf>,
    /// Age at assessment; defaults to each proband's current age.
    #[arg(long)]
    pub age: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub config: PathBuf,
    /// Number of families to simulate.
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write `<out>.train.jsonl` and `<out>.validation.jsonl`.
    #[arg(long)]
    pub split: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub cohort: PathBuf,
    /// `fixed` (one horizon) or `time` (horizon interactions).
    #[arg(long, default_value = "fixed")]
    pub kind: String,
    #[arg(long, value_delimiter = ',', default_value = "5")]
    pub tau: Vec<u32>,
    /// Requests or cohort records from the population the model will serve.
    #[arg(long)]
    pub importance_target: Option<PathBuf>,
    /// Censoring strata: none, family_history or record.
    #[arg(long, default_value = "none")]
    pub strata: String,
    /// Censored-before-horizon rows: `zero` (kept with outcome 0) or `omit`.
    #[arg(long, default_value = "zero")]
    pub censored_rows: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub params: PathBuf,
    /// Prediction files written by `score`; repeatable.
    #[arg(long, required = true)]
    pub predictions: Vec<PathBuf>,
    /// Cohort records or outcome rows (id, followup, event).
    #[arg(long)]
    pub outcomes: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub tau: u32,
    #[arg(long, default_value_t = 1000)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "none")]
    pub strata: String,
    #[arg(long, default_value_t = 0.0167)]
    pub snb_threshold: f64,
    #[arg(long, default_value_t = 10.0)]
    pub uno_tau: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct HazardsArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long, default_value = "white")]
    pub race: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: String,
    /// `name=path` of a fitted ensemble; repeatable.
    #[arg(long)]
    pub ensemble: Vec<String>,
}

pub fn load_params(dir: &Path) -> Result<ParameterSet, CliError> {
    ParameterSet::load(dir).map_err(|e| CliError::field("params", e.to_string()))
}

pub fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::io(path, e))
}

/// Non-blank lines of a newline-delimited JSON file, parsed.
fn json_lines(path: &Path, bytes: &[u8]) -> Result<Vec<Value>, CliError> {
    let text = std::str::from_utf8(bytes).map_err(|e| CliError::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| {
                CliError::field(format!("{}:{}", path.display(), i + 1), e.to_string())
            })
        })
        .collect()
}

fn parse_lines<T: serde::de::DeserializeOwned>(
    path: &Path,
    bytes: &[u8],
) -> Result<Vec<T>, CliError> {
    json_lines(path, bytes)?
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            serde_json::from_value(v).map_err(|e| {
                CliError::field(
                    format!("{}:record {}", path.display(), i + 1),
                    e.to_string(),
                )
            })
        })
        .collect()
}

fn load_ensemble(path: &Path) -> Result<FittedEnsemble, CliError> {
    let m: FittedEnsemble = serde_json::from_slice(&read(path)?)
        .map_err(|e| CliError::field(path.display().to_string(), e.to_string()))?;
    m.validate()
        .map_err(|e| CliError::field(path.display().to_string(), e.to_string()))?;
    Ok(m)
}

/// Emits to `out` (with a manifest) or to stdout.
fn emit(builder: &ManifestBuilder, out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => builder.write_artifact(p, bytes).map(|_| ()),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

#[derive(Debug, Serialize)]
struct PredictionRow<'a> {
    id: &'a str,
    #[serde(flatten)]
    result: &'a ModelResult,
}

pub fn cmd_score(args: &ScoreArgs) -> Result<(), CliError> {
    let params = load_params(&args.params)?;
    let mut builder = ManifestBuilder::new(
        "score",
        format!("{:?}", (&args.model, &args.tau, args.age)).as_bytes(),
        &params,
    );
    let mut scorer = Scorer::new(params);
    for m in &args.model {
        if let Some(path) = m.strip_prefix("ensemble:") {
            let bytes = read(Path::new(path))?;
            builder.input(Path::new(path), &bytes);
            scorer = scorer.with_ensemble(path, load_ensemble(Path::new(path))?);
        } else if ModelName::parse(m).is_none() {
            return Err(CliError::field("--model", format!("unknown model `{m}`")));
        }
    }

    let mut requests: Vec<ScoreRequest> = Vec::new();
    if let Some(input) = &args.input {
        let bytes = read(input)?;
        builder.input(input, &bytes);
        requests = parse_lines(input, &bytes)?;
    } else {
        if args.pedigree.is_empty() {
            return Err(CliError::field(
                "--pedigree",
                "give --input or at least one --pedigree",
            ));
        }
        let rf: Option<RiskFactorsInput> = match &args.risk_factors {
            Some(p) => {
                let bytes = read(p)?;
                builder.input(p, &bytes);
                Some(
                    serde_json::from_slice(&bytes)
                        .map_err(|e| CliError::field("risk_factors", e.to_string()))?,
                )
            }
            None => None,
        };
        for p in &args.pedigree {
            let bytes = read(p)?;
            builder.input(p, &bytes);
            let pedigree: Value = serde_json::from_slice(&bytes)
                .map_err(|e| CliError::field(p.display().to_string(), e.to_string()))?;
            let id = p.file_stem().map(|s| s.to_string_lossy().into_owned());
            requests.push(ScoreRequest {
                schema_version: crate::request::API_SCHEMA_VERSION,
                id,
                pedigree,
                risk_factors: rf,
                age: None,
                taus: vec![],
                models: vec![],
            });
        }
    }
    for r in &mut requests {
        r.taus = args.tau.clone();
        r.models = args.model.clone();
        if args.age.is_some() {
            r.age = args.age;
        }
    }

    let scored: Vec<String> = requests
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            let resp = r
                .resolve(&scorer)
                .and_then(|res| res.score(&scorer))
                .map_err(|e| match e {
                    CliError::Invalid { field, message } => CliError::Invalid {
                        field: format!("record {}: {field}", i + 1),
                        message,
                    },
                    e => e,
                })?;
            let id = resp.id.clone().unwrap_or_else(|| format!("{}", i + 1));
            Ok(resp
                .results
                .iter()
                .map(|result| {
                    serde_json::to_string(&PredictionRow { id: &id, result })
                        .expect("row serializes")
                        + "\n"
                })
                .collect::<String>())
        })
        .collect::<Result<_, CliError>>()?;
    emit(&builder, args.out.as_deref(), scored.concat().as_bytes())
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<riskfuse_core::sim::SimSummary, CliError> {
    let params = load_params(&args.params)?;
    let cfg_bytes = read(&args.config)?;
    let cfg: SimConfig =
        serde_json::from_slice(&cfg_bytes).map_err(|e| CliError::field("config", e.to_string()))?;
    let mut builder = ManifestBuilder::new("simulate", &cfg_bytes, &params).seed(args.seed);
    builder.input(&args.config, &cfg_bytes);
    let (cohort, summary) = simulate_cohort(args.n, &cfg, &params, args.seed)
        .map_err(|e| CliError::field("config", e.to_string()))?;
    let lines: Vec<String> = cohort
        .par_iter()
        .map(|p| serde_json::to_string(p).expect("record serializes") + "\n")
        .collect();
    builder.write_artifact(&args.out, lines.concat().as_bytes())?;
    if args.split {
        let k = summary.train as usize;
        builder.write_artifact(
            &with_suffix(&args.out, "train.jsonl"),
            lines[..k].concat().as_bytes(),
        )?;
        builder.write_artifact(
            &with_suffix(&args.out, "validation.jsonl"),
            lines[k..].concat().as_bytes(),
        )?;
    }
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    builder.write_artifact(&with_suffix(&args.out, "summary.json"), text.as_bytes())?;
    Ok(summary)
}

/// `dir/cohort.jsonl` + `train.jsonl` → `dir/cohort.train.jsonl`.
pub fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn load_cohort(
    path: &Path,
    builder: &mut ManifestBuilder,
) -> Result<(Vec<CohortRecord>, Vec<u8>), CliError> {
    let bytes = read(path)?;
    builder.input(path, &bytes);
    let records = parse_lines(path, &bytes)?;
    Ok((records, bytes))
}

fn parse_strata(s: &str) -> Result<StrataKey, CliError> {
    StrataKey::parse(s).ok_or_else(|| {
        CliError::field(
            "--strata",
            format!("unknown strata key `{s}` (none, family_history, record)"),
        )
    })
}

pub fn cmd_fit(args: &FitArgs) -> Result<FittedEnsemble, CliError> {
    let params = load_params(&args.params)?;
    let kind = FitKind::parse(&args.kind).ok_or_else(|| {
        CliError::field(
            "--kind",
            format!("unknown kind `{}` (fixed, time)", args.kind),
        )
    })?;
    let strata = parse_strata(&args.strata)?;
    let censored_rows = match args.censored_rows.as_str() {
        "zero" => CensoredRows::PseudoZero,
        "omit" => CensoredRows::Omit,
        o => {
            return Err(CliError::field(
                "--censored-rows",
                format!("unknown option `{o}` (zero, omit)"),
            ))
        }
    };
    let mut taus = args.tau.clone();
    taus.sort_unstable();
    taus.dedup();
    let config = format!(
        "{:?}",
        (&args.kind, &taus, &args.strata, &args.censored_rows)
    );
    let mut builder = ManifestBuilder::new("fit", config.as_bytes(), &params);
    let rules = params.stratum_rules.clone();
    let scorer = Scorer::new(params);
    let (mut records, bytes) = load_cohort(&args.cohort, &mut builder)?;
    apply_strata(&mut records, strata, &rules);
    let preds = base_predictions(&scorer, &records, &taus)?;
    let target = match &args.importance_target {
        Some(p) => {
            let tb = read(p)?;
            builder.input(p, &tb);
            let reqs: Vec<ScoreRequest> = parse_lines(p, &tb)?;
            let last = *taus.last().expect("non-empty tau list");
            let rows: Vec<Vec<f64>> = reqs
                .par_iter()
                .map(|r| {
                    let res = r.resolve(&scorer)?;
                    let x = res
                        .risk_factors
                        .ok_or_else(|| {
                            CliError::field("importance_target.risk_factors", "required")
                        })?
                        .resolve(&res.pedigree)?;
                    let p1 = scorer.brcapro(&res.pedigree, res.age, last)?;
                    let p2 = scorer.bcrat(&res.pedigree, &x, res.age, last)?;
                    Ok(vec![res.age as f64, p1.sqrt(), p2.sqrt()])
                })
                .collect::<Result<_, CliError>>()?;
            Some(rows)
        }
        None => None,
    };
    let opts = FrameOptions {
        censored_rows,
        ..FrameOptions::default()
    };
    let mut model = fit_from_predictions(&records, &preds, &taus, kind, target.as_deref(), opts)?;
    model.provenance.training_hash = Some(riskfuse_core::params::sha256_hex(&bytes));
    model.provenance.created = Some(crate::manifest::now());
    let text = serde_json::to_string_pretty(&model).expect("model serializes") + "\n";
    builder.write_artifact(&args.out, text.as_bytes())?;
    Ok(model)
}

#[derive(Debug, Serialize)]
pub struct StratumPoint {
    pub stratum: String,
    pub n_records: usize,
    pub cases: f64,
    /// `estimates[metric][model]`; `None` where undefined.
    pub estimates: BTreeMap<String, Vec<Option<f64>>>,
}

#[derive(Debug, Serialize)]
pub struct EvaluationReport {
    pub schema_version: u32,
    pub tau: u32,
    pub n_outcomes: usize,
    /// Outcome rows without an eligible prediction from every model.
    pub n_excluded: usize,
    pub cases: f64,
    pub report: MetricReport,
    /// Percent improvement in Brier and log score over each model, by
    /// metric then `[model][reference]`.
    pub relative_improvement: BTreeMap<String, Vec<Vec<f64>>>,
    pub calibration: BTreeMap<String, Vec<CalibrationBin>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub strata: Vec<StratumPoint>,
}

const ALL_METRICS: [Metric; 6] = [
    Metric::Oe,
    Metric::Auc,
    Metric::Brier,
    Metric::LogScore,
    Metric::Snb,
    Metric::UnoC,
];

fn outcome_rows(
    path: &Path,
    bytes: &[u8],
    strata: StrataKey,
    params: &ParameterSet,
) -> Result<Vec<FollowUp>, CliError> {
    json_lines(path, bytes)?
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let at = || format!("{}:record {}", path.display(), i + 1);
            let mut fu: FollowUp = serde_json::from_value(v.clone())
                .map_err(|e| CliError::field(at(), e.to_string()))?;
            match strata {
                StrataKey::None => fu.stratum = None,
                StrataKey::Record => {}
                StrataKey::FamilyHistory => {
                    let p = v.get("pedigree").ok_or_else(|| {
                        CliError::field(at(), "family_history strata need a pedigree")
                    })?;
                    let p = pedigree_from_value(p)?;
                    fu.stratum = Some(
                        stratum_label(stratify_family_history(&p, &params.stratum_rules)).into(),
                    );
                }
            }
            Ok(fu)
        })
        .collect()
}

/// Predictions by model name, then id, at horizon `tau`; ineligible rows
/// are `None`.
fn prediction_table(
    path: &Path,
    bytes: &[u8],
    tau: u32,
) -> Result<BTreeMap<String, HashMap<String, Option<f64>>>, CliError> {
    let mut out: BTreeMap<String, HashMap<String, Option<f64>>> = BTreeMap::new();
    for (i, v) in json_lines(path, bytes)?.into_iter().enumerate() {
        let at = || format!("{}:record {}", path.display(), i + 1);
        let field = |k: &str| {
            v.get(k)
                .ok_or_else(|| CliError::field(at(), format!("missing `{k}`")))
        };
        if field("tau")?.as_u64() != Some(tau as u64) {
            continue;
        }
        let id = field("id")?
            .as_str()
            .ok_or_else(|| CliError::field(at(), "id must be a string"))?
            .to_string();
        let model = field("model")?
            .as_str()
            .ok_or_else(|| CliError::field(at(), "model must be a string"))?
            .to_string();
        let risk = field("risk")?.as_f64();
        if out
            .entry(model.clone())
            .or_default()
            .insert(id.clone(), risk)
            .is_some()
        {
            return Err(CliError::field(
                at(),
                format!("duplicate prediction for {id} / {model}"),
            ));
        }
    }
    Ok(out)
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<EvaluationReport, CliError> {
    let params = load_params(&args.params)?;
    let strata = parse_strata(&args.strata)?;
    let config = format!(
        "{:?}",
        (
            args.tau,
            args.bootstrap,
            &args.strata,
            args.snb_threshold,
            args.uno_tau
        )
    );
    let mut builder = ManifestBuilder::new("evaluate", config.as_bytes(), &params).seed(args.seed);
    let ob = read(&args.outcomes)?;
    builder.input(&args.outcomes, &ob);
    let outcomes = outcome_rows(&args.outcomes, &ob, strata, &params)?;
    if outcomes.is_empty() {
        return Err(CliError::field("--outcomes", "file holds no outcome rows"));
    }
    let g = km_censoring(&outcomes, riskfuse_core::ensemble::censoring::stratum_key)
        .map_err(|e| CliError::field("outcomes", e.to_string()))?;

    let mut table: BTreeMap<String, HashMap<String, Option<f64>>> = BTreeMap::new();
    for p in &args.predictions {
        let bytes = read(p)?;
        builder.input(p, &bytes);
        for (model, rows) in prediction_table(p, &bytes, args.tau)? {
            if table.insert(model.clone(), rows).is_some() {
                return Err(CliError::field(
                    "--predictions",
                    format!("model {model} appears in more than one file"),
                ));
            }
        }
    }
    if table.is_empty() {
        return Err(CliError::field(
            "--predictions",
            format!("no predictions at tau = {}", args.tau),
        ));
    }
    let models: Vec<String> = table.keys().cloned().collect();
    let kept: Vec<&FollowUp> = outcomes
        .iter()
        .filter(|o| {
            table
                .values()
                .all(|m| matches!(m.get(&o.id), Some(Some(_))))
        })
        .collect();
    let kept_owned: Vec<FollowUp> = kept.iter().map(|o| (*o).clone()).collect();
    let preds: Vec<Vec<f64>> = models
        .iter()
        .map(|m| {
            kept_owned
                .iter()
                .map(|o| table[m][&o.id].expect("filtered"))
                .collect()
        })
        .collect();
    let recs = prepare_records(
        &kept_owned,
        |i| kept_owned[i].id.clone(),
        args.tau as f64,
        &g,
    )
    .map_err(|e| CliError::field("outcomes", e.to_string()))?;
    let cfg = BootstrapConfig {
        replicates: args.bootstrap,
        seed: args.seed,
        snb_threshold: args.snb_threshold,
        uno_tau: args.uno_tau,
    };
    let report = bootstrap_compare(&models, &preds, &recs, &ALL_METRICS, &cfg)
        .map_err(|e| CliError::field("evaluate", e.to_string()))?;

    let mut relative_improvement = BTreeMap::new();
    for m in [Metric::Brier, Metric::LogScore] {
        let s = report
            .metrics
            .iter()
            .find(|s| s.metric == m)
            .expect("metric computed");
        let rows = s
            .estimates
            .iter()
            .map(|a| {
                s.estimates
                    .iter()
                    .map(|b| riskfuse_core::eval::relative_improvement(a.estimate, b.estimate))
                    .collect()
            })
            .collect();
        relative_improvement.insert(m.as_str().to_string(), rows);
    }

    let mut calibration = BTreeMap::new();
    let mut csv = String::from(
        "model,bin,lower,upper,n,mean_prediction,observed,expected,oe,ci_lower,ci_upper\n",
    );
    for (m, p) in models.iter().zip(&preds) {
        let bins = calibration_deciles(p, &recs)
            .map_err(|e| CliError::field("evaluate", e.to_string()))?;
        for (i, b) in bins.iter().enumerate() {
            csv.push_str(&format!(
                "{m},{},{},{},{},{},{},{},{},{},{}\n",
                i + 1,
                fmt17(b.lower),
                fmt17(b.upper),
                b.n,
                fmt17(b.mean_prediction),
                fmt17(b.observed),
                fmt17(b.expected),
                fmt17(b.oe),
                fmt17(b.ci_lower),
                fmt17(b.ci_upper)
            ));
        }
        calibration.insert(m.clone(), bins);
    }

    let mut strata_points = Vec::new();
    if strata != StrataKey::None {
        let mut labels: Vec<String> = recs.iter().filter_map(|r| r.stratum.clone()).collect();
        labels.sort();
        labels.dedup();
        for label in labels {
            let idx: Vec<usize> = (0..recs.len())
                .filter(|&i| recs[i].stratum.as_deref() == Some(&label))
                .collect();
            let sub: Vec<_> = idx.iter().map(|&i| recs[i].clone()).collect();
            let mut estimates = BTreeMap::new();
            for m in ALL_METRICS {
                let v = preds
                    .iter()
                    .map(|p| {
                        let pp: Vec<f64> = idx.iter().map(|&i| p[i]).collect();
                        compute_metric(m, &pp, &sub, &cfg).ok()
                    })
                    .collect();
                estimates.insert(m.as_str().to_string(), v);
            }
            strata_points.push(StratumPoint {
                stratum: label,
                n_records: sub.len(),
                cases: sub.iter().map(|r| r.outcome).sum(),
                estimates,
            });
        }
    }

    let out = EvaluationReport {
        schema_version: 1,
        tau: args.tau,
        n_outcomes: outcomes.len(),
        n_excluded: outcomes.len() - kept.len(),
        cases: recs.iter().map(|r| r.outcome).sum(),
        report,
        relative_improvement,
        calibration,
        strata: strata_points,
    };
    let text = to_string_17(&out).map_err(|e| CliError::internal(e.to_string()))? + "\n";
    builder.write_artifact(&args.out, text.as_bytes())?;
    builder.write_artifact(&with_suffix(&args.out, "calibration.csv"), csv.as_bytes())?;
    Ok(out)
}

pub fn cmd_hazards(args: &HazardsArgs) -> Result<(), CliError> {
    let params = load_params(&args.params)?;
    let race = Race::parse(&args.race)
        .ok_or_else(|| CliError::field("--race", format!("unknown race `{}`", args.race)))?;
    let builder = ManifestBuilder::new("hazards", args.race.as_bytes(), &params);
    let nc = params
        .penetrance
        .breast_hazard(Genotype::NonCarrier, race)
        .map_err(|e| CliError::field("params", e.to_string()))?;
    let mort = params
        .penetrance
        .mortality(race)
        .map_err(|e| CliError::field("params", e.to_string()))?;
    let grid = params
        .baseline
        .for_race(race)
        .map_err(|e| CliError::field("params", e.to_string()))?;
    let mut csv = String::from(
        "age,brcapro_noncarrier,bcrat_composite,bcrat_baseline,brcapro_mortality,bcrat_competing\n",
    );
    for iv in grid {
        for age in iv.start as u32..iv.end as u32 {
            let band = AgeBand::of(age as f64);
            let f = params
                .normalization
                .one_minus_ar(race, band)
                .map_err(|e| CliError::field("params", e.to_string()))?;
            let i = (age - 1) as usize;
            csv.push_str(&format!(
                "{age},{},{},{},{},{}\n",
                fmt17(nc[i]),
                fmt17(iv.breast),
                fmt17(iv.breast * f),
                fmt17(mort[i]),
                fmt17(iv.competing)
            ));
        }
    }
    builder
        .write_artifact(&args.out, csv.as_bytes())
        .map(|_| ())
}

/// Builds the service's scorer from `--ensemble name=path` flags.
pub fn serve_scorer(args: &ServeArgs) -> Result<Scorer, CliError> {
    let mut scorer = Scorer::new(load_params(&args.params)?);
    for spec in &args.ensemble {
        let (name, path) = spec.split_once('=').ok_or_else(|| {
            CliError::field("--ensemble", format!("expected name=path, got `{spec}`"))
        })?;
        scorer = scorer.with_ensemble(name, load_ensemble(Path::new(path))?);
    }
    Ok(scorer)
}
