//! HTTP ingestion service.
//!
//! Routes:
//!
//! - `GET|POST /GravarMastiteServices.do` legacy query-parameter insert
//! - `POST /api/v1/readings`
//! - `GET /api/v1/readings/last`
//! - `GET /api/v1/animals/{id}/readings?from=YYYY-MM-DD&to=YYYY-MM-DD`
//! - `GET /healthz`

pub mod api;
pub mod error;
pub mod legacy;

use std::future::Future;
use std::io;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::routing::{get, post};
use axum::Router;
use mastite_core::{ReadingStore, SqliteStore, StoreError, ThresholdTable};
use thiserror::Error;
use tokio::net::TcpListener;

pub use api::DiagnosisResponse;
pub use error::{ApiError, ErrorBody, FieldError};

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<dyn ReadingStore>,
    pub thresholds: ThresholdTable,
    /// Apply the thermometer range to legacy inserts as well.
    pub legacy_strict: bool,
}

impl AppState {
    pub fn new(store: Arc<dyn ReadingStore>) -> Self {
        Self {
            store,
            thresholds: ThresholdTable::default(),
            legacy_strict: false,
        }
    }

    /// Runs a store call off the async workers.
    pub(crate) async fn blocking<T, F>(&self, f: F) -> Result<T, StoreError>
    where
        F: FnOnce() -> Result<T, StoreError> + Send + 'static,
        T: Send + 'static,
    {
        tokio::task::spawn_blocking(f)
            .await
            .map_err(|e| StoreError::Storage(format!("store task failed: {e}")))?
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route(
            legacy::LEGACY_PATH,
            get(legacy::handle).post(legacy::handle),
        )
        .route("/api/v1/readings", post(api::post_reading))
        .route("/api/v1/readings/last", get(api::get_last_reading))
        .route(
            "/api/v1/animals/{id}/readings",
            get(api::get_animal_readings),
        )
        .route("/healthz", get(api::health_check))
        .fallback(legacy::fallback)
        .with_state(state)
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub bind: SocketAddr,
    pub store_path: PathBuf,
    pub legacy_strict: bool,
    pub thresholds: ThresholdTable,
}

impl ServiceConfig {
    pub const DEFAULT_PORT: u16 = 8080;

    pub fn new(store_path: impl Into<PathBuf>) -> Self {
        Self {
            bind: SocketAddr::from(([0, 0, 0, 0], Self::DEFAULT_PORT)),
            store_path: store_path.into(),
            legacy_strict: false,
            thresholds: ThresholdTable::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("cannot open store: {0}")]
    Store(#[from] StoreError),
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: SocketAddr, source: io::Error },
    #[error("server error: {0}")]
    Serve(io::Error),
}

/// A store opened and a socket bound, ready to serve.
pub struct Service {
    listener: TcpListener,
    state: AppState,
}

impl Service {
    pub async fn bind(config: &ServiceConfig) -> Result<Self, ServiceError> {
        let store = SqliteStore::open(&config.store_path)?;
        let listener =
            TcpListener::bind(config.bind)
                .await
                .map_err(|source| ServiceError::Bind {
                    addr: config.bind,
                    source,
                })?;
        let state = AppState {
            store: Arc::new(store),
            thresholds: config.thresholds,
            legacy_strict: config.legacy_strict,
        };
        Ok(Self { listener, state })
    }

    pub fn from_parts(listener: TcpListener, state: AppState) -> Self {
        Self { listener, state }
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Serves until `shutdown` resolves, then drains in-flight requests.
    pub async fn run(
        self,
        shutdown: impl Future<Output = ()> + Send + 'static,
    ) -> Result<(), ServiceError> {
        axum::serve(self.listener, router(self.state))
            .with_graceful_shutdown(shutdown)
            .await
            .map_err(ServiceError::Serve)
    }
}

/// Resolves on Ctrl-C, or SIGTERM on unix.
pub async fn shutdown_signal() {
    let ctrl_c = async {
        if let Err(e) = tokio::signal::ctrl_c().await {
            tracing::error!(error = %e, "cannot listen for ctrl-c");
            std::future::pending::<()>().await;
        }
    };
    #[cfg(unix)]
    let terminate = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let terminate = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = terminate => {},
    }
    tracing::info!("shutdown requested");
}
