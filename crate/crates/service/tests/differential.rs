//! The service and `twistc` give the same answers on the same sources.

use std::path::Path;

use axum::body::Body;
use axum::http::Request;
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;
use twist_service::{app, AppState, Config};

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> Value {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .body(body.map(|b| Body::from(b.to_string())).unwrap_or_else(Body::empty))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    serde_json::from_slice(&resp.into_body().collect().await.unwrap().to_bytes()).unwrap()
}

fn twistc(args: &[&str], stdin: &str) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("twistc").chain(args.iter().copied());
    let code = twist_cli::run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

fn sources() -> Vec<String> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut v: Vec<String> = ["pqor.tw", "xor.tw", "frame_axioms.tw", "takuzu.tw", "unsat.tw", "chain.tw"]
        .iter()
        .map(|n| std::fs::read_to_string(dir.join(n)).unwrap())
        .collect();
    v.push("exact 2, $i in (1..5): P($i) end".into());
    v.push("bigor $i in (1..4): Q($i) and not Q($i + 1) end".into());
    v
}

/// All models of a source via the service: solve, then next until done.
async fn service_models(app: &Router, source: &str, seed: u64, limit: usize) -> (String, Vec<Value>) {
    let v = call(app, "POST", "/solve", Some(json!({ "source": source, "seed": seed }))).await;
    let status = v["status"].as_str().unwrap().to_string();
    let mut models = Vec::new();
    if status != "sat" {
        return (status, models);
    }
    models.push(v["model"].clone());
    let uri = format!("/sessions/{}/next", v["session_id"].as_str().unwrap());
    while models.len() < limit {
        let n = call(app, "POST", &uri, None).await;
        match n["status"].as_str().unwrap() {
            "sat" => models.push(n["model"].clone()),
            "exhausted" => break,
            other => panic!("{other}"),
        }
    }
    (status, models)
}

#[tokio::test]
async fn same_model_sequence() {
    let app = app(AppState::new(Config::default()));
    for src in sources() {
        for seed in [0, 7] {
            let (_, out) = twistc(&["solve", "-", "--json", "--limit", "50", "--seed", &seed.to_string()], &src);
            let cli: Value = serde_json::from_str(&out).unwrap();
            let cli_models: Vec<Value> = cli["models"].as_array().unwrap().iter().map(|m| m["rows"].clone()).collect();
            let (status, svc_models) = service_models(&app, &src, seed, 50).await;
            assert_eq!(cli["status"], status, "{src}");
            assert_eq!(cli_models, svc_models, "{src}");
        }
    }
}

#[tokio::test]
async fn same_stats() {
    let app = app(AppState::new(Config::default()));
    for src in sources() {
        let (code, out) = twistc(&["check", "-"], &src);
        assert_eq!(code, 0);
        let v = call(&app, "POST", "/compile", Some(json!({ "source": src }))).await;
        let s = &v["stats"];
        let want = format!("ok: {} atoms, {} clauses, {} variables\n", s["n_atoms"], s["n_clauses"], s["n_vars"]);
        assert_eq!(out, want);
    }
}

#[tokio::test]
async fn same_filtering() {
    let app = app(AppState::new(Config::default()));
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/sudoku.tw")).unwrap();
    let v = call(&app, "POST", "/solve", Some(json!({ "source": src }))).await;
    let id = v["session_id"].as_str().unwrap();
    for (filter, pol, flag) in [(r"^P\(1,", "true", "--true-only"), (r"9\)$", "false", "--false-only"), ("3,3", "all", "")] {
        let mut args = vec!["solve", "-", "--json", "--filter", filter];
        if !flag.is_empty() {
            args.push(flag);
        }
        let (_, out) = twistc(&args, &src);
        let cli: Value = serde_json::from_str(&out).unwrap();
        let q: String = filter.bytes().map(|b| format!("%{b:02X}")).collect();
        let svc = call(&app, "GET", &format!("/sessions/{id}/model?filter={q}&polarity={pol}"), None).await;
        assert_eq!(cli["models"][0]["rows"], svc["model"], "{filter} {pol}");
    }
}
