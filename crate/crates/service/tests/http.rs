//! The HTTP API exercised in-process, including differential runs against
//! the command-line tool on identical sources.

use std::path::Path;
use std::time::Duration;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;
use twist_service::{app, AppState, Config};

fn service(config: Config) -> Router {
    app(AppState::new(config))
}

fn default_service() -> Router {
    service(Config::default())
}

async fn send(app: &Router, method: &str, uri: &str, body: Option<String>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()));
    (status, v)
}

async fn post(app: &Router, uri: &str, body: Value) -> (StatusCode, Value) {
    send(app, "POST", uri, Some(body.to_string())).await
}

fn corpus(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)).unwrap()
}

async fn solve_id(app: &Router, source: &str) -> (String, Value) {
    let (s, v) = post(app, "/solve", json!({ "source": source })).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["status"], "sat");
    (v["session_id"].as_str().unwrap().to_string(), v)
}

#[tokio::test]
async fn healthz() {
    let (s, v) = send(&default_service(), "GET", "/healthz", None).await;
    assert_eq!((s, v), (StatusCode::OK, Value::String("ok".into())));
}

#[tokio::test]
async fn compile_reports_stats_and_diagnostics() {
    let app = default_service();
    let (s, v) = post(&app, "/compile", json!({ "source": corpus("sudoku.tw") })).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["ok"], true);
    assert_eq!(v["stats"]["n_vars"], 729);
    assert_eq!(v["stats"]["n_atoms"], 729);
    assert!(v["latex"].as_str().unwrap().contains("\\bigwedge"));

    let (s, v) = post(&app, "/compile", json!({ "source": "P and" })).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["ok"], false);
    let d = v["diagnostics"].as_array().unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d[0]["severity"], "error");
    assert!(d[0]["span"]["start"].is_u64() && d[0]["span"]["end"].is_u64());
}

#[tokio::test]
async fn bad_bodies() {
    let app = default_service();
    let (s, _) = send(&app, "POST", "/compile", None).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = send(&app, "POST", "/compile", Some("not json".into())).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = post(&app, "/compile", json!({ "text": "p" })).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let big = "p and ".repeat(200_000);
    let (s, _) = post(&app, "/compile", json!({ "source": big })).await;
    assert_eq!(s, StatusCode::PAYLOAD_TOO_LARGE);
    let (s, _) = send(&app, "POST", "/solve", None).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn next_until_exhausted() {
    let app = default_service();
    let (id, first) = solve_id(&app, "p or q").await;
    assert_eq!(id.len(), 32);
    assert_eq!(first["model"].as_array().unwrap().len(), 2);
    let uri = format!("/sessions/{id}/next");
    let mut seen = vec![first["model"].clone()];
    for _ in 0..2 {
        let (s, v) = send(&app, "POST", &uri, None).await;
        assert_eq!((s, &v["status"]), (StatusCode::OK, &json!("sat")));
        assert!(!seen.contains(&v["model"]));
        seen.push(v["model"].clone());
    }
    let (_, v) = send(&app, "POST", &uri, None).await;
    assert_eq!(v, json!({ "status": "exhausted" }));
    let (_, v) = send(&app, "POST", &uri, None).await;
    assert_eq!(v["status"], "exhausted");
}

#[tokio::test]
async fn model_filtering() {
    let app = default_service();
    let (id, _) = solve_id(&app, "A(1) and B(1) and not A(2)").await;
    let get = |q: &str| {
        let (app, uri) = (app.clone(), format!("/sessions/{id}/model{q}"));
        async move { send(&app, "GET", &uri, None).await }
    };
    let (s, v) = get("").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["model"].as_array().unwrap().len(), 3);
    let (_, v) = get("?filter=%5EA&polarity=true").await;
    assert_eq!(v["model"], json!([{ "atom": "A(1)", "value": true }]));
    let (_, v) = get("?filter=%5EA").await;
    assert_eq!(v["model"].as_array().unwrap().len(), 2);
    let (s, v) = get("?filter=(%5B").await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(v["error"].as_str().unwrap().contains("invalid filter pattern"));
    let (s, _) = get("?polarity=maybe").await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn unknown_and_expired_sessions() {
    let app = service(Config {
        session_ttl: Duration::from_millis(100),
        ..Config::default()
    });
    let (s, _) = send(&app, "POST", "/sessions/0123/next", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = send(&app, "GET", "/sessions/0123/model", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (id, _) = solve_id(&app, "p or q").await;
    let (s, _) = send(&app, "POST", &format!("/sessions/{id}/next"), None).await;
    assert_eq!(s, StatusCode::OK);
    tokio::time::sleep(Duration::from_millis(150)).await;
    let (s, _) = send(&app, "POST", &format!("/sessions/{id}/next"), None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn session_cap() {
    let app = service(Config {
        max_sessions: 2,
        ..Config::default()
    });
    solve_id(&app, "p").await;
    solve_id(&app, "p").await;
    let (s, _) = post(&app, "/solve", json!({ "source": "p" })).await;
    assert_eq!(s, StatusCode::TOO_MANY_REQUESTS);
    // Unsatisfiable sources open no session, so the cap does not matter
    // for them once there is room again; here there is none.
    let (s, _) = post(&app, "/solve", json!({ "source": "p and not p" })).await;
    assert_eq!(s, StatusCode::TOO_MANY_REQUESTS);
}

#[tokio::test]
async fn solve_errors_and_unsat() {
    let app = default_service();
    let (s, v) = post(&app, "/solve", json!({ "source": "P and" })).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["diagnostics"].as_array().unwrap().len(), 1);
    let (s, _) = post(&app, "/solve", json!({ "source": "p", "encoding": "unary" })).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    let (s, v) = post(&app, "/solve", json!({ "source": corpus("unsat.tw"), "encoding": "seqcounter" })).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v, json!({ "status": "unsat" }));
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_next_calls_serialize() {
    let app = default_service();
    // exact 2 of 6: 15 models, one served by /solve.
    let (id, first) = solve_id(&app, "exact 2, $i in (1..6): P($i) end").await;
    let uri = format!("/sessions/{id}/next");
    let calls: Vec<_> = (0..20)
        .map(|_| {
            let app = app.clone();
            let uri = uri.clone();
            tokio::spawn(async move { send(&app, "POST", &uri, None).await })
        })
        .collect();
    let mut models = vec![first["model"].clone()];
    let mut exhausted = 0;
    for c in calls {
        let (s, v) = c.await.unwrap();
        assert_eq!(s, StatusCode::OK);
        match v["status"].as_str().unwrap() {
            "sat" => {
                assert!(!models.contains(&v["model"]), "model served twice");
                models.push(v["model"].clone());
            }
            "exhausted" => exhausted += 1,
            other => panic!("{other}"),
        }
    }
    assert_eq!((models.len(), exhausted), (15, 6));
}

#[tokio::test]
async fn static_ui() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<html>ui</html>").unwrap();
    let app = service(Config {
        ui_dir: Some(dir.path().to_path_buf()),
        ..Config::default()
    });
    let (s, v) = send(&app, "GET", "/ui/index.html", None).await;
    assert_eq!((s, v), (StatusCode::OK, Value::String("<html>ui</html>".into())));
    let (s, _) = send(&default_service(), "GET", "/ui/index.html", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn smt_values_through_the_service() {
    let z3 = std::process::Command::new("z3").arg("-version").output().is_ok_and(|o| o.status.success());
    if !z3 {
        eprintln!("z3 not found; skipping");
        return;
    }
    let app = default_service();
    let (id, v) = solve_id(&app, &corpus("kamaji_sum.tw")).await;
    let values = v["values"].as_array().unwrap();
    assert_eq!(values.len(), 3);
    let sum: i64 = values.iter().map(|x| x["value"].as_str().unwrap().parse::<i64>().unwrap()).sum();
    assert_eq!(sum, 5);
    let (_, m) = send(&app, "GET", &format!("/sessions/{id}/model?polarity=true"), None).await;
    assert_eq!(m["values"], json!([]));
}
