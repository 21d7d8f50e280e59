//! HTTP/JSON service over the graph registry.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use apulse_core::graph::GraphDoc;
use apulse_core::solver::{budget_sweep, solve_query};
use apulse_core::{generate_terrain, Graph};
use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use serde::de::DeserializeOwned;
use serde::Serialize;
use tower_http::services::ServeDir;

use crate::api::{
    replan_json, solve_outcome, sweep_json, Problem, ReplanRequest, SolveRequest, SweepRequest, UploadRequest,
};
use crate::registry::Registry;

pub type AppState = Arc<Registry>;

type Reply = Result<(StatusCode, String), Problem>;

fn json(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn finish(reply: Reply) -> Response {
    match reply {
        Ok((status, body)) => json(status, body),
        Err(p) => {
            let status = StatusCode::from_u16(p.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
            json(status, p.to_json())
        }
    }
}

fn parse<T: DeserializeOwned>(body: &[u8]) -> Result<T, Problem> {
    serde_json::from_slice(body).map_err(|e| Problem::bad_request(format!("malformed request: {e}")))
}

fn to_body<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("response serializes")
}

async fn blocking<T: Send + 'static>(work: impl FnOnce() -> T + Send + 'static) -> Result<T, Problem> {
    tokio::task::spawn_blocking(work)
        .await
        .map_err(|e| Problem::new(500, "internal", format!("solver task failed: {e}")))
}

fn resolve_graph(
    registry: &Registry,
    graph_id: Option<String>,
    inline: Option<GraphDoc>,
) -> Result<Arc<Graph>, Problem> {
    match (graph_id, inline) {
        (Some(id), None) => registry
            .get(&id)
            .map(|e| e.graph)
            .ok_or_else(|| Problem::not_found(format!("no graph registered as {id:?}"))),
        (None, Some(doc)) => Ok(Arc::new(doc.into_graph()?)),
        _ => Err(Problem::bad_request("exactly one of graph_id and graph must be given")),
    }
}

async fn solve(State(registry): State<AppState>, body: Bytes) -> Response {
    finish(solve_reply(registry, body).await)
}

async fn solve_reply(registry: AppState, body: Bytes) -> Reply {
    let req: SolveRequest = parse(&body)?;
    let graph = resolve_graph(&registry, req.graph_id, req.graph)?;
    let sol = blocking(move || solve_query(&graph, req.start, req.goal, req.budget, &req.config)).await?;
    Ok((StatusCode::OK, solve_outcome(sol)?.to_json()))
}

async fn sweep(State(registry): State<AppState>, body: Bytes) -> Response {
    finish(sweep_reply(registry, body).await)
}

async fn sweep_reply(registry: AppState, body: Bytes) -> Reply {
    let req: SweepRequest = parse(&body)?;
    if req.budgets.is_empty() {
        return Err(Problem::bad_request("budgets must not be empty"));
    }
    let graph = resolve_graph(&registry, req.graph_id, req.graph)?;
    let entries = blocking(move || budget_sweep(&graph, req.start, req.goal, &req.budgets, &req.config)).await??;
    Ok((StatusCode::OK, sweep_json(entries)))
}

async fn replan(State(registry): State<AppState>, body: Bytes) -> Response {
    finish(replan_reply(registry, body).await)
}

async fn replan_reply(registry: AppState, body: Bytes) -> Reply {
    let req: ReplanRequest = parse(&body)?;
    let updates: Vec<_> = req.patch.iter().map(|u| (u.node, u.risk)).collect();
    let (revision, entry) = registry
        .patch(&req.graph_id, &updates)?
        .ok_or_else(|| Problem::not_found(format!("no graph registered as {:?}", req.graph_id)))?;
    let graph = entry.graph;
    let sol = blocking(move || solve_query(&graph, req.start, req.goal, req.budget, &req.config)).await?;
    Ok((StatusCode::OK, replan_json(&revision, &solve_outcome(sol)?)))
}

async fn list_graphs(State(registry): State<AppState>) -> Response {
    json(StatusCode::OK, format!("{{\"graphs\":{}}}", to_body(&registry.list())))
}

async fn upload_graph(State(registry): State<AppState>, body: Bytes) -> Response {
    finish(upload_reply(registry, body).await)
}

async fn upload_reply(registry: AppState, body: Bytes) -> Reply {
    let req: UploadRequest = parse(&body)?;
    let graph = match (req.graph, req.grid) {
        (Some(doc), None) => doc.into_graph()?,
        (None, Some(spec)) => blocking(move || generate_terrain(&spec)).await??,
        _ => return Err(Problem::bad_request("exactly one of graph and grid must be given")),
    };
    let summary = match req.id {
        Some(id) if registry.get(&id).is_some() => {
            return Err(Problem::new(409, "conflict", format!("graph id {id:?} is already registered")))
        }
        Some(id) => registry.insert(id, graph)?,
        None => registry.insert_anonymous(graph)?,
    };
    Ok((StatusCode::CREATED, to_body(&summary)))
}

async fn graph_grid(State(registry): State<AppState>, Path(id): Path<String>) -> Response {
    finish(match registry.grid(&id) {
        None => Err(Problem::not_found(format!("no graph registered as {id:?}"))),
        Some(Err(e)) => Err(Problem::new(422, "not_a_grid", e.to_string())),
        Some(Ok(view)) => Ok((StatusCode::OK, to_body(&view))),
    })
}

async fn not_found() -> Response {
    finish(Err(Problem::new(404, "not_found", "no such endpoint")))
}

pub fn router(registry: AppState, ui_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/solve", axum::routing::post(solve))
        .route("/api/sweep", axum::routing::post(sweep))
        .route("/api/replan", axum::routing::post(replan))
        .route("/api/graphs", get(list_graphs).post(upload_graph))
        .route("/api/graphs/{id}/grid", get(graph_grid))
        .with_state(registry);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(not_found),
    }
}

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub port: u16,
    pub graph_dir: Option<PathBuf>,
    pub ui_dir: Option<PathBuf>,
}

/// Registry with the demo grid plus every graph in `graph_dir`.
pub fn startup_registry(graph_dir: Option<&std::path::Path>) -> apulse_core::Result<Registry> {
    let registry = Registry::with_demo();
    if let Some(dir) = graph_dir {
        registry.load_dir(dir)?;
    }
    Ok(registry)
}

pub async fn serve(config: ServeConfig) -> std::io::Result<()> {
    let registry = startup_registry(config.graph_dir.as_deref()).map_err(std::io::Error::other)?;
    let app = router(Arc::new(registry), config.ui_dir);
    let addr = SocketAddr::from(([0, 0, 0, 0], config.port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
