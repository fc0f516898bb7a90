//! Local HTTP+JSON service over a directory of `.hria.json` assessment files.
//!
//! Writers are serialized per assessment and guarded by optimistic
//! concurrency: send the revision you last saw as `If-Match`, and a stale
//! revision gets `409 Conflict`. Every successful mutation is on disk before
//! the response is sent.

mod error;
mod routes;
mod store;

use std::io;
use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::sync::Arc;

use axum::routing::{get, post, put};
use axum::Router;
use hria_core::Catalog;
use tokio::net::TcpListener;
use tower_http::services::ServeDir;

pub use error::{ApiError, ErrorBody};
pub use store::{Store, Summary};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub root: PathBuf,
    pub catalog: Catalog,
    pub host: IpAddr,
    pub port: u16,
    /// Static files served for paths not matched by the API.
    pub console_dir: Option<PathBuf>,
}

impl ServiceConfig {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self {
            root: root.into(),
            catalog: Catalog::builtin(),
            host: IpAddr::V4(Ipv4Addr::LOCALHOST),
            port: 8787,
            console_dir: None,
        }
    }
}

pub fn router(store: Arc<Store>, console_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/assessments", get(routes::list).post(routes::create))
        .route("/assessments/{id}", get(routes::get))
        .route("/assessments/{id}/scoping", put(routes::put_scoping))
        .route("/assessments/{id}/risks", post(routes::add_risk))
        .route("/assessments/{id}/risks/{rid}/ratings", put(routes::rate_risk))
        .route("/assessments/{id}/risks/{rid}/rounds", post(routes::add_round))
        .route("/assessments/{id}/risks/{rid}/precautionary", post(routes::flag))
        .route("/assessments/{id}/risks/{rid}/precautionary/accept", post(routes::accept))
        .route("/assessments/{id}/risks/{rid}/precautionary/resolve", post(routes::resolve))
        .route("/assessments/{id}/stage", post(routes::advance))
        .route("/assessments/{id}/checklist/{stage}/complete", post(routes::complete_tasks))
        .route("/assessments/{id}/checklist/{stage}/{item}", put(routes::set_task))
        .route("/assessments/{id}/rights", post(routes::register_right))
        .route("/assessments/{id}/notes", post(routes::add_note))
        .route("/assessments/{id}/report", get(routes::report))
        .route("/assessments/{id}/chart.svg", get(routes::chart))
        .route("/whatif", get(routes::whatif))
        .route("/integrate", post(routes::integrate_components))
        .route("/catalog", get(routes::catalog))
        .with_state(store);
    match console_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Binds the configured address. Loopback unless configured otherwise.
pub async fn bind(config: &ServiceConfig) -> io::Result<TcpListener> {
    TcpListener::bind(SocketAddr::new(config.host, config.port)).await
}

pub async fn run(listener: TcpListener, config: ServiceConfig) -> io::Result<()> {
    if !config.root.is_dir() {
        return Err(io::Error::new(
            io::ErrorKind::NotFound,
            format!("{} is not a directory", config.root.display()),
        ));
    }
    let store = Arc::new(Store::new(config.root, config.catalog));
    axum::serve(listener, router(store, config.console_dir)).await
}

pub async fn serve(config: ServiceConfig) -> io::Result<()> {
    let listener = bind(&config).await?;
    run(listener, config).await
}
