//! The HTTP/JSON service: routes, status codes and parity with the CLI.

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use std::path::PathBuf;
use tower::ServiceExt;

use riskfuse_cli::commands::{cmd_score, load_params, ScoreArgs};
use riskfuse_cli::service::{router, score_endpoint};
use riskfuse_cli::Scorer;

fn params_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../params/default")
}

fn scorer() -> Scorer {
    Scorer::new(load_params(&params_dir()).unwrap())
}

fn pedigree(proband_test: Option<&str>) -> Value {
    let mut proband = json!({"id": 0, "relation": "proband", "sex": "female", "current_age_or_death_age": 42,
        "alive": true, "race": "white"});
    if let Some(t) = proband_test {
        proband["genetic_test"] = json!(t);
    }
    json!({
        "schema_version": 1,
        "family_id": "fam-1",
        "members": [
            proband,
            {"id": 1, "relation": "mother", "sex": "female", "current_age_or_death_age": 68, "alive": false,
             "breast_cancer": 47, "race": "white"},
            {"id": 2, "relation": "sister", "sex": "female", "current_age_or_death_age": 45, "alive": true,
             "race": "white"},
            {"id": 3, "relation": "maternal_aunt", "sex": "female", "current_age_or_death_age": 71,
             "alive": true, "ovarian_cancer": 60, "race": "white"}
        ]
    })
}

fn risk_factors() -> Value {
    json!({"age_at_menarche": 12, "num_biopsies": "one", "age_first_live_birth": 31, "atypical_hyperplasia": "no"})
}

fn request() -> Value {
    json!({"pedigree": pedigree(None), "risk_factors": risk_factors(), "taus": [5, 10]})
}

async fn call(method: &str, uri: &str, body: Option<String>) -> (StatusCode, String) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, Body::from))
        .unwrap();
    let resp = router(scorer()).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn post(uri: &str, body: &Value) -> (StatusCode, Value) {
    let (s, text) = call("POST", uri, Some(body.to_string())).await;
    (s, serde_json::from_str(&text).unwrap())
}

#[tokio::test]
async fn health_reports_ok() {
    let (s, body) = call("GET", "/health", None).await;
    assert_eq!(s, StatusCode::OK);
    let v: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["status"], "ok");
}

#[tokio::test]
async fn models_lists_base_and_combined_models_with_parameters() {
    let (s, body) = call("GET", "/models", None).await;
    assert_eq!(s, StatusCode::OK);
    let v: Value = serde_json::from_str(&body).unwrap();
    let names: Vec<&str> = v["models"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["brcapro", "bcrat", "combined_m"]);
    assert_eq!(v["models"][0]["requires_risk_factors"], false);
    assert!(!v["parameters"]["checksums"].as_object().unwrap().is_empty());
}

#[tokio::test]
async fn score_returns_every_model_and_horizon() {
    let (s, v) = post("/score", &request()).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["id"], "fam-1");
    assert_eq!(v["age"], 42);
    assert_eq!(v["affected_first_degree"], 1);
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 6);
    for r in results {
        let p = r["risk"].as_f64().unwrap();
        assert!(p > 0.0 && p < 1.0, "{r}");
    }
    // Longer horizons carry more risk.
    for pair in results.chunks(2) {
        assert!(pair[1]["risk"].as_f64() > pair[0]["risk"].as_f64());
    }
}

#[tokio::test]
async fn http_body_equals_the_library_response() {
    let (s, text) = call("POST", "/score", Some(request().to_string())).await;
    assert_eq!(s, StatusCode::OK);
    let direct = score_endpoint(&scorer(), request().to_string().as_bytes()).unwrap();
    assert_eq!(text, serde_json::to_string(&direct).unwrap());
}

/// The CLI and the service print the same digits for the same proband.
#[tokio::test]
async fn service_risks_match_cli_output_as_strings() {
    let dir = tempfile::tempdir().unwrap();
    let ped = dir.path().join("fam-1.json");
    let rf = dir.path().join("rf.json");
    let out = dir.path().join("scores.jsonl");
    std::fs::write(&ped, pedigree(None).to_string()).unwrap();
    std::fs::write(&rf, risk_factors().to_string()).unwrap();
    cmd_score(&ScoreArgs {
        params: params_dir(),
        model: vec!["brcapro".into(), "bcrat".into(), "combined_m".into()],
        tau: vec![5, 10],
        input: None,
        pedigree: vec![ped],
        risk_factors: Some(rf),
        age: None,
        out: Some(out.clone()),
    })
    .unwrap();
    let cli = std::fs::read_to_string(&out).unwrap();
    let (_, http) = call("POST", "/score", Some(request().to_string())).await;

    let risk_text = |line: &str| {
        line.split("\"risk\":")
            .nth(1)
            .unwrap()
            .split([',', '}'])
            .next()
            .unwrap()
            .to_string()
    };
    let cli_risks: Vec<String> = cli.lines().map(risk_text).collect();
    let http_risks: Vec<String> = http
        .split("\"risk\":")
        .skip(1)
        .map(|s| s.split([',', '}']).next().unwrap().to_string())
        .collect();
    assert_eq!(cli_risks.len(), 6);
    assert_eq!(cli_risks, http_risks);
}

#[tokio::test]
async fn empty_whatif_equals_score() {
    let (_, score) = post("/score", &request()).await;
    let (s, w) = post("/whatif", &json!({"base": request(), "deltas": []})).await;
    assert_eq!(s, StatusCode::OK);
    let rows = w["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["delta"], Value::Null);
    assert_eq!(rows[0]["response"], score);
}

#[tokio::test]
async fn whatif_applies_each_delta_to_the_base() {
    let sister = json!({"id": 9, "relation": "sister", "sex": "female", "current_age_or_death_age": 40,
        "alive": true, "breast_cancer": 36, "race": "white"});
    let body = json!({
        "base": request(),
        "deltas": [
            {"op": "add_relative", "relative": sister},
            {"op": "remove_relative", "id": 1},
            {"op": "set_age", "age": 50}
        ]
    });
    let (s, w) = post("/whatif", &body).await;
    assert_eq!(s, StatusCode::OK, "{w}");
    let rows = w["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let combined5 = |row: &Value| row["response"]["results"][4]["risk"].as_f64().unwrap();
    assert_eq!(rows[1]["response"]["affected_first_degree"], 2);
    assert!(combined5(&rows[1]) > combined5(&rows[0]));
    assert_eq!(rows[2]["response"]["affected_first_degree"], 0);
    assert!(combined5(&rows[2]) < combined5(&rows[0]));
    assert_eq!(rows[3]["response"]["age"], 50);
}

#[tokio::test]
async fn malformed_input_is_400() {
    let (s, text) = call("POST", "/score", Some("{not json".into())).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["error"], "invalid_input");

    let mut bad = request();
    bad["schema_version"] = json!(7);
    assert_eq!(post("/score", &bad).await.0, StatusCode::BAD_REQUEST);

    let mut bad = request();
    bad["models"] = json!(["gail2000"]);
    let (s, v) = post("/score", &bad).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["field"], "models");

    let mut bad = request();
    bad["pedigree"]["members"][1]["breast_cancer"] = json!(80);
    assert_eq!(post("/score", &bad).await.0, StatusCode::BAD_REQUEST);

    // Past the end of the penetrance table.
    let mut bad = request();
    bad["models"] = json!(["brcapro"]);
    bad["taus"] = json!([60]);
    assert_eq!(post("/score", &bad).await.0, StatusCode::BAD_REQUEST);

    let bad = json!({"base": request(), "deltas": [{"op": "remove_relative", "id": 99}]});
    let (s, v) = post("/whatif", &bad).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["field"], "deltas[0].id");
}

#[tokio::test]
async fn explicitly_requested_ineligible_model_is_422() {
    let mut req = request();
    req["pedigree"] = pedigree(Some("brca1_positive"));
    req["models"] = json!(["bcrat"]);
    let (s, v) = post("/score", &req).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"], "ineligible");
    assert_eq!(v["model"], "bcrat");

    // With default models the same proband is scored, BCRAT reported inline.
    req["models"] = json!([]);
    let (s, v) = post("/score", &req).await;
    assert_eq!(s, StatusCode::OK);
    let bcrat: Vec<&Value> = v["results"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["model"] == "bcrat")
        .collect();
    assert!(bcrat
        .iter()
        .all(|r| r["risk"].is_null() && r["ineligible"].is_string()));
}

#[tokio::test]
async fn missing_risk_factors_are_invalid_for_bcrat() {
    let mut req = request();
    req.as_object_mut().unwrap().remove("risk_factors");
    req["models"] = json!(["brcapro"]);
    assert_eq!(post("/score", &req).await.0, StatusCode::OK);
    req["models"] = json!(["bcrat"]);
    let (s, v) = post("/score", &req).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["field"], "risk_factors");
}
