//! Local HTTP/JSON scoring service over a shared, immutable parameter set.

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::Serialize;
use std::sync::Arc;

use crate::error::CliError;
use crate::manifest::ParameterRef;
use crate::request::{whatif, ModelResult, ScoreRequest, WhatIfRequest, API_SCHEMA_VERSION};
use crate::scoring::{ModelName, Scorer};

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error_response(e: &CliError) -> Response {
    let status = StatusCode::from_u16(e.http_status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    json_response(status, e.to_json().to_string())
}

fn ok<T: Serialize>(body: &T) -> Response {
    json_response(
        StatusCode::OK,
        serde_json::to_string(body).expect("response serializes"),
    )
}

fn parse<T: serde::de::DeserializeOwned>(body: &[u8]) -> Result<T, CliError> {
    let mut de = serde_json::Deserializer::from_slice(body);
    T::deserialize(&mut de).map_err(|e| {
        let field = if e.is_syntax() || e.is_eof() {
            "body".to_string()
        } else {
            "request".to_string()
        };
        CliError::field(field, e.to_string())
    })
}

/// Scores one request; explicitly requested models that are ineligible for
/// this proband turn the whole request into a 422.
pub fn score_endpoint(
    scorer: &Scorer,
    body: &[u8],
) -> Result<crate::request::ScoreResponse, CliError> {
    let req: ScoreRequest = parse(body)?;
    let resolved = req.resolve(scorer)?;
    let resp = resolved.score(scorer)?;
    if resolved.explicit_models {
        if let Some(ModelResult {
            model,
            ineligible: Some(reason),
            ..
        }) = resp.results.iter().find(|r| r.ineligible.is_some())
        {
            return Err(CliError::Ineligible {
                model: model.clone(),
                reason: reason.clone(),
            });
        }
    }
    Ok(resp)
}

async fn score(State(s): State<Arc<Scorer>>, body: Bytes) -> Response {
    match tokio::task::spawn_blocking(move || score_endpoint(&s, &body)).await {
        Ok(Ok(r)) => ok(&r),
        Ok(Err(e)) => error_response(&e),
        Err(e) => error_response(&CliError::internal(e.to_string())),
    }
}

async fn whatif_handler(State(s): State<Arc<Scorer>>, body: Bytes) -> Response {
    let run = move || parse::<WhatIfRequest>(&body).and_then(|req| whatif(&s, &req));
    match tokio::task::spawn_blocking(run).await {
        Ok(Ok(r)) => ok(&r),
        Ok(Err(e)) => error_response(&e),
        Err(e) => error_response(&CliError::internal(e.to_string())),
    }
}

#[derive(Debug, Serialize)]
struct ModelInfo {
    name: String,
    requires_risk_factors: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau_grid: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<riskfuse_core::ensemble::EnsembleKind>,
}

#[derive(Debug, Serialize)]
struct ModelsResponse {
    schema_version: u32,
    models: Vec<ModelInfo>,
    parameters: ParameterRef,
}

async fn models(State(s): State<Arc<Scorer>>) -> Response {
    let models = s
        .models()
        .into_iter()
        .map(|m| {
            let e = match &m {
                ModelName::Ensemble(n) => s.ensembles.get(n),
                _ => None,
            };
            ModelInfo {
                requires_risk_factors: m != ModelName::Brcapro,
                tau_grid: e.map(|e| e.tau_grid.clone()),
                kind: e.map(|e| e.kind),
                name: m.as_string(),
            }
        })
        .collect();
    ok(&ModelsResponse {
        schema_version: API_SCHEMA_VERSION,
        models,
        parameters: ParameterRef {
            name: s.params.manifest.name.clone(),
            version: s.params.manifest.version.clone(),
            checksums: s.params.checksums().clone(),
        },
    })
}

async fn health() -> Response {
    ok(&serde_json::json!({"status": "ok", "version": env!("CARGO_PKG_VERSION")}))
}

pub fn router(scorer: Scorer) -> Router {
    Router::new()
        .route("/score", post(score))
        .route("/whatif", post(whatif_handler))
        .route("/models", get(models))
        .route("/health", get(health))
        .with_state(Arc::new(scorer))
}

pub async fn serve(scorer: Scorer, bind: &str) -> Result<(), CliError> {
    let listener = tokio::net::TcpListener::bind(bind)
        .await
        .map_err(|e| CliError::io(bind, e))?;
    log::info!(
        "listening on {}",
        listener.local_addr().map_err(|e| CliError::io(bind, e))?
    );
    axum::serve(listener, router(scorer))
        .await
        .map_err(|e| CliError::io(bind, e))
}
