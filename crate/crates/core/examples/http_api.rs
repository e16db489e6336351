//! Drive the HTTP API in-process. `bbnx serve --port 8080` exposes the same router.

use axum::body::Body;
use axum::http::Request;
use bbn_explain::service::router;
use bbn_explain::session::SessionStore;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

async fn send(app: &axum::Router, method: &str, uri: &str, body: Option<Value>) -> Value {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map(|b| Body::from(b.to_string())).unwrap_or_else(Body::empty))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    println!("{method} {uri} -> {status}");
    serde_json::from_slice(&bytes).unwrap_or(Value::Null)
}

#[tokio::main]
async fn main() {
    let app = router(SessionStore::in_memory());
    let network: Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{FIXTURES}/worked_network.json")).unwrap()).unwrap();

    let created = send(&app, "POST", "/api/sessions", Some(network)).await;
    let id = created["session_id"].as_str().unwrap().to_string();

    send(&app, "POST", &format!("/api/sessions/{id}/ground"), Some(json!({"node": "C", "state": "c_1"}))).await;
    send(&app, "POST", &format!("/api/sessions/{id}/ground"), Some(json!({"node": "D", "state": "d_1"}))).await;
    let again = send(&app, "POST", &format!("/api/sessions/{id}/ground"), Some(json!({"node": "D", "state": "d_2"}))).await;
    println!("  {}", again["code"]);

    let explained = send(&app, "GET", &format!("/api/sessions/{id}/explain?node=B&state=b_1"), None).await;
    println!("\n{}", explained["text"].as_str().unwrap());
}
