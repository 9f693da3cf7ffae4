//! The JSON service, driven in-process through the router.

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use knowbase::semantics::OracleConfig;
use knowbase::workspace::{load_model, Workspace};
use knowbase_cli::service::{router, AppState};

const EM_MICRO: &str = include_str!("../../core/examples/em-micro.model");

const OFF_SCALE: &str = "id: rec_angle_b
title: Off-scale angles
conditions: material:Material
results: angle:AngleDeg
class: AngleKnowHow
bind: angle=edge_angle
---
material,angle
carbon_steel,99
";

fn app() -> Router {
    let ws = Workspace::new(load_model(EM_MICRO).unwrap()).unwrap();
    router(AppState::new(ws, OracleConfig::default()))
}

fn shared() -> (Arc<AppState>, Router) {
    let ws = Workspace::new(load_model(EM_MICRO).unwrap()).unwrap();
    let state = AppState::new(ws, OracleConfig::default());
    (Arc::clone(&state), router(state))
}

async fn call(app: &Router, method: &str, uri: &str, body: &str) -> (StatusCode, Value, String) {
    let req = Request::builder().method(method).uri(uri).body(Body::from(body.to_string())).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let text = String::from_utf8(bytes.to_vec()).unwrap();
    let json = serde_json::from_str(&text).unwrap_or(Value::Null);
    (status, json, text)
}

#[tokio::test]
async fn fixture_task_solves_with_one_solution() {
    let app = app();
    let (status, body, _) = call(&app, "POST", "/solve", r#"{"task":"demo"}"#).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["schemaVersion"], 1);
    let solutions = body["solutions"].as_array().unwrap();
    assert_eq!(solutions.len(), 1);
    assert_eq!(solutions[0]["values"], json!({"edge_angle": 12, "tool_life": 90}));

    let id = solutions[0]["id"].as_str().unwrap();
    let (status, body, _) = call(&app, "GET", &format!("/explanations/{id}"), "").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["explanation"]["solutionId"], id);
    assert!(!body["explanation"]["nodes"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn ad_hoc_request_overrides_stored_fields() {
    let app = app();
    let req = json!({
        "inputs": {"workpiece_material": "alloy_steel"},
        "outputs": ["edge_angle"],
        "criterion": {"kind": "none"},
    });
    let (status, body, _) = call(&app, "POST", "/solve", &req.to_string()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["solutions"][0]["values"], json!({"edge_angle": 8}));
}

#[tokio::test]
async fn identical_solves_return_identical_bodies() {
    let app = app();
    let (_, _, a) = call(&app, "POST", "/solve", r#"{"task":"demo"}"#).await;
    let (_, _, b) = call(&app, "POST", "/solve", r#"{"task":"demo"}"#).await;
    assert_eq!(a, b);
}

#[tokio::test]
async fn unknown_explanation_is_404() {
    let (status, body, _) = call(&app(), "GET", "/explanations/unknown", "").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["schemaVersion"], 1);
}

#[tokio::test]
async fn malformed_bodies_are_400() {
    let app = app();
    for body in ["{", r#"{"task": 3}"#, r#"{"bogus": true}"#] {
        let (status, json, _) = call(&app, "POST", "/solve", body).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
        assert_eq!(json["diagnostics"][0]["code"], "E-TYPE");
    }
    let (status, json, _) = call(&app, "POST", "/solve", r#"{"task":"missing"}"#).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(json["diagnostics"][0]["code"], "E-UNDECL");
}

#[tokio::test]
async fn off_scale_knowhow_is_422_with_scale_code() {
    let (state, app) = shared();
    let before = state.snapshot_hash();
    let (status, body, _) = call(&app, "POST", "/knowhow", OFF_SCALE).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["diagnostics"][0]["code"], "E-SCALE");
    assert_eq!(state.snapshot_hash(), before, "rejected tables leave the model alone");
}

#[tokio::test]
async fn knowhow_swap_changes_the_model() {
    let (state, app) = shared();
    let before = state.snapshot_hash();
    let (_, model, _) = call(&app, "GET", "/model", "").await;
    let tables = model["tables"].as_array().unwrap().len();
    let req = json!({ "table": OFF_SCALE.replace("99", "8").replace("carbon_steel", "alloy_steel") });
    let (status, body, _) = call(&app, "POST", "/knowhow", &req.to_string()).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["delta"]["facts"], 2);
    assert_ne!(state.snapshot_hash(), before);
    let (_, model, _) = call(&app, "GET", "/model", "").await;
    assert_eq!(model["modelHash"], body["modelHash"]);
    assert_eq!(model["tables"].as_array().unwrap().len(), tables + 1);
}

#[tokio::test]
async fn racing_swap_is_409() {
    let (state, app) = shared();
    let _held = state.hold_swap_slot().await;
    let (status, _, _) = call(&app, "POST", "/knowhow", &OFF_SCALE.replace("99", "12")).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn validate_reports_and_probes() {
    let app = app();
    let (status, body, _) = call(&app, "POST", "/validate", "").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["diagnostics"], json!([]));
    let probe = json!({"probe": {"task": "demo", "criterion": {"kind": "predicate", "formula": "edge_angle = 40"}}});
    let (status, body, _) = call(&app, "POST", "/validate", &probe.to_string()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["diagnostics"][0]["code"], "E-NOSOL");
    assert!(body["diagnostics"][0]["witness"].is_string());
}

#[tokio::test]
async fn session_records_solves() {
    let app = app();
    call(&app, "POST", "/solve", r#"{"task":"demo"}"#).await;
    let (status, body, _) = call(&app, "GET", "/session", "").await;
    assert_eq!(status, StatusCode::OK);
    let entries = body["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 1);
    assert!(entries[0]["task"].as_str().unwrap().starts_with("task demo "));
}

#[tokio::test]
async fn model_summary_lists_unknowns_and_tasks() {
    let (status, body, _) = call(&app(), "GET", "/model", "").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["schemaVersion"], 1);
    assert_eq!(body["unknowns"].as_array().unwrap().len(), 3);
    assert_eq!(body["tasks"][0]["name"], "demo");
}
