use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use bbn_explain::service::router;
use bbn_explain::session::SessionStore;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

async fn call(app: &Router, method: Method, uri: &str, body: Option<String>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, value)
}

fn network() -> String {
    std::fs::read_to_string(format!("{FIXTURES}/worked_network.json")).unwrap()
}

async fn new_session(app: &Router) -> String {
    let (status, body) = call(app, Method::POST, "/api/sessions", Some(network())).await;
    assert_eq!(status, StatusCode::CREATED);
    body["session_id"].as_str().unwrap().to_string()
}

fn grounding(node: &str, state: &str) -> Option<String> {
    Some(json!({"node": node, "state": state}).to_string())
}

#[tokio::test]
async fn session_lifecycle() {
    let app = router(SessionStore::in_memory());
    let (status, body) = call(&app, Method::POST, "/api/sessions", Some(network())).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(body["snapshot"]["t"], 0);
    assert_eq!(body["nodes"].as_array().unwrap().len(), 4);
    let id = body["session_id"].as_str().unwrap();

    let (status, snap) = call(&app, Method::POST, &format!("/api/sessions/{id}/ground"), grounding("C", "c_1")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(snap["t"], 1);

    let (status, history) = call(&app, Method::GET, &format!("/api/sessions/{id}/history"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(history["snapshots"].as_array().unwrap().len(), 2);

    let (status, _) = call(&app, Method::DELETE, &format!("/api/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (status, err) = call(&app, Method::GET, &format!("/api/sessions/{id}/history"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(err["code"], "unknown_session");
}

#[tokio::test]
async fn preview_leaves_history_untouched() {
    let app = router(SessionStore::in_memory());
    let id = new_session(&app).await;
    let (_, before) = call(&app, Method::GET, &format!("/api/sessions/{id}/history"), None).await;
    let (status, preview) = call(&app, Method::POST, &format!("/api/sessions/{id}/preview"), grounding("C", "c_1")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(preview["t"], 1);
    let (_, after) = call(&app, Method::GET, &format!("/api/sessions/{id}/history"), None).await;
    assert_eq!(before, after);

    let (_, committed) = call(&app, Method::POST, &format!("/api/sessions/{id}/ground"), grounding("C", "c_1")).await;
    assert_eq!(committed, preview);
}

#[tokio::test]
async fn explain_text_matches_cli() {
    let app = router(SessionStore::in_memory());
    let id = new_session(&app).await;
    call(&app, Method::POST, &format!("/api/sessions/{id}/ground"), grounding("C", "c_1")).await;
    call(&app, Method::POST, &format!("/api/sessions/{id}/ground"), grounding("D", "d_1")).await;
    let (status, body) = call(
        &app,
        Method::GET,
        &format!("/api/sessions/{id}/explain?focal=B%3Db_1&from=1&to=2&support=auto"),
        None,
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["plan"]["steps"][0]["case"], "ReduceToBinary");

    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = bbn_explain::cli::run_with(
        [
            "bbnx",
            "explain",
            "--network",
            &format!("{FIXTURES}/worked_network.json"),
            "--scenario",
            &format!("{FIXTURES}/worked_scenario.json"),
            "--focal",
            "B=b_1",
        ],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0);
    assert_eq!(String::from_utf8(out).unwrap(), format!("{}\n", body["text"].as_str().unwrap()));

    let (status, split) = call(
        &app,
        Method::GET,
        &format!("/api/sessions/{id}/explain?node=B&state=b_1"),
        None,
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(split["text"], body["text"]);
}

#[tokio::test]
async fn error_statuses() {
    let app = router(SessionStore::in_memory());
    let (status, err) = call(&app, Method::POST, "/api/sessions", Some("{not json".into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["code"], "parse_error");

    let bad = json!({"nodes": [{"id": "A", "states": ["x", "y"], "prior": [0.5, 0.6]}]});
    let (status, err) = call(&app, Method::POST, "/api/sessions", Some(bad.to_string())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["code"], "not_normalized");

    let (status, _) = call(&app, Method::GET, "/api/sessions/not-a-uuid/history", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let id = new_session(&app).await;
    let ground = format!("/api/sessions/{id}/ground");
    let (status, err) = call(&app, Method::POST, &ground, grounding("Z", "z")).await;
    assert_eq!((status, err["code"].as_str().unwrap()), (StatusCode::BAD_REQUEST, "unknown_node"));

    call(&app, Method::POST, &ground, grounding("C", "c_1")).await;
    let (status, err) = call(&app, Method::POST, &ground, grounding("C", "c_2")).await;
    assert_eq!((status, err["code"].as_str().unwrap()), (StatusCode::CONFLICT, "already_grounded"));

    let (status, err) = call(&app, Method::GET, &format!("/api/sessions/{id}/explain?focal=B%3Db_1&rho=abc"), None).await;
    assert_eq!((status, err["code"].as_str().unwrap()), (StatusCode::BAD_REQUEST, "invalid_argument"));

    let (status, err) = call(&app, Method::GET, &format!("/api/sessions/{id}/explain?focal=B%3Db_1&from=0&to=5"), None).await;
    assert_eq!((status, err["code"].as_str().unwrap()), (StatusCode::BAD_REQUEST, "unknown_timestep"));
}

#[tokio::test]
async fn zero_probability_grounding_is_422() {
    let app = router(SessionStore::in_memory());
    let net = json!({"nodes": [
        {"id": "A", "states": ["a1", "a2"], "prior": [1.0, 0.0]},
        {"id": "B", "states": ["b1", "b2"], "parent": "A", "cpt": [[1.0, 0.0], [0.5, 0.5]]}
    ]});
    let (_, body) = call(&app, Method::POST, "/api/sessions", Some(net.to_string())).await;
    let id = body["session_id"].as_str().unwrap();
    let (status, err) = call(&app, Method::POST, &format!("/api/sessions/{id}/ground"), grounding("B", "b2")).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(err["code"], "zero_probability_evidence");
}

#[tokio::test]
async fn persisted_sessions_survive_a_restart() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(SessionStore::persistent(dir.path()).unwrap());
    let id = new_session(&app).await;
    call(&app, Method::POST, &format!("/api/sessions/{id}/ground"), grounding("C", "c_1")).await;
    let (_, before) = call(&app, Method::GET, &format!("/api/sessions/{id}/history"), None).await;

    let restarted = router(SessionStore::persistent(dir.path()).unwrap());
    let (status, after) = call(&restarted, Method::GET, &format!("/api/sessions/{id}/history"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(before, after);
}
