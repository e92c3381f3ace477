//! Local HTTP/JSON service over loaded NRDF files.
//!
//! Loaded reactors are immutable for the life of a [`Session`]; the only
//! mutable state is the analysis result map. Every JSON response carries
//! `schema_version: 1`, has its object keys sorted and writes floats in
//! shortest round-trip form, so responses for a fixed file are byte-stable.

mod api;
mod error;
mod json;
mod session;

use std::net::{Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::sync::Arc;

use axum::http::{header, HeaderValue, Method};
use axum::routing::{get, post};
use axum::Router;
use tower_http::cors::{AllowOrigin, CorsLayer};

pub use error::{ApiError, ServerError};
pub use session::{LoadedFile, Session};

pub const SCHEMA_VERSION: u64 = 1;

/// Every route, with CORS open to local origins only.
pub fn router(session: Arc<Session>) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(AllowOrigin::predicate(|origin: &HeaderValue, _| {
            origin.to_str().is_ok_and(is_local_origin)
        }))
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE]);
    Router::new()
        .route("/", get(api::index))
        .route("/api/files", get(api::files))
        .route("/api/reactors/{fid}", get(api::reactors))
        .route("/api/reactors/{fid}/{rname}/core", get(api::core))
        .route("/api/reactors/{fid}/{rname}/assembly/{atype}/{row}/{col}", get(api::assembly))
        .route("/api/reactors/{fid}/{rname}/rod/{arow}/{acol}/{prow}/{pcol}", get(api::rod))
        .route("/api/reactors/{fid}/{rname}/svg/core", get(api::core_svg))
        .route("/api/reactors/{fid}/{rname}/svg/assembly/{atype}/{row}/{col}", get(api::assembly_svg))
        .route("/api/tools", get(api::tools))
        .route("/api/tools/{name}", post(api::run_tool))
        .route("/api/results", get(api::results))
        .route("/api/results/{id}", get(api::result))
        .fallback(api::not_found)
        .layer(cors)
        .with_state(session)
}

/// `http(s)://localhost`, `127.0.0.1` or `[::1]`, any port.
pub fn is_local_origin(origin: &str) -> bool {
    let Some(rest) = origin.strip_prefix("http://").or_else(|| origin.strip_prefix("https://")) else {
        return false;
    };
    let host = if let Some(v6) = rest.strip_prefix('[') {
        match v6.split_once(']') {
            Some((h, tail)) if tail.is_empty() || tail.starts_with(':') => return h == "::1",
            _ => return false,
        }
    } else {
        rest.split(':').next().unwrap_or_default()
    };
    matches!(host, "localhost" | "127.0.0.1")
}

/// Loads `files` and serves them on `127.0.0.1:port` until the process
/// exits. `ready` is called with the bound address once listening.
pub async fn serve(files: &[PathBuf], port: u16, ready: impl FnOnce(SocketAddr)) -> Result<(), ServerError> {
    let session = Arc::new(Session::load(files)?);
    let listener = tokio::net::TcpListener::bind((Ipv4Addr::LOCALHOST, port)).await?;
    ready(listener.local_addr()?);
    axum::serve(listener, router(session)).await?;
    Ok(())
}

/// [`serve`] on a fresh multi-threaded runtime.
pub fn serve_blocking(files: &[PathBuf], port: u16, ready: impl FnOnce(SocketAddr)) -> Result<(), ServerError> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?
        .block_on(serve(files, port, ready))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_origins() {
        for ok in ["http://localhost", "http://localhost:5173", "https://127.0.0.1:8443", "http://[::1]:80"] {
            assert!(is_local_origin(ok), "{ok}");
        }
        for bad in ["http://example.com", "http://localhost.evil.com", "file://localhost", "http://[::2]", "localhost"] {
            assert!(!is_local_origin(bad), "{bad}");
        }
    }
}
