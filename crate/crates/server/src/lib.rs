//! Read-only HTTP API over a generated world.
//!
//! Every world fragment is rendered to canonical JSON once at startup, so
//! identical requests get byte-identical answers. Only the context endpoint
//! does work per request, and it runs on the blocking pool.

mod state;

use std::collections::HashMap;
use std::future::Future;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use serde::Serialize;
use tower_http::cors::{AllowOrigin, CorsLayer};

use libraria_core::context::{get_context, ContextKind};
use libraria_core::error::WorldError;
use libraria_core::pagination::Page;
use libraria_core::world::fragment_bytes;

pub use state::{load_texts, AppState, ServerConfig, DEFAULT_SEARCH_LIMIT, MAX_SEARCH_LIMIT};

#[derive(Debug, thiserror::Error)]
pub enum ServerError {
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("book texts do not match the catalog: {0}")]
    Texts(String),
    #[error("invalid server configuration: {0}")]
    Config(String),
}

type Shared = Arc<AppState>;

pub fn router(state: Shared) -> Router {
    let origin = match &state.cors_origin {
        Some(o) => match HeaderValue::from_str(o) {
            Ok(v) => AllowOrigin::exact(v),
            Err(_) => {
                log::warn!("ignoring invalid CORS origin {o:?}");
                AllowOrigin::any()
            }
        },
        None => AllowOrigin::any(),
    };
    let cors = CorsLayer::new().allow_origin(origin).allow_methods([Method::GET]);
    Router::new()
        .route("/healthz", get(healthz))
        .route("/api/layout", get(layout))
        .route("/api/map", get(map))
        .route("/api/rooms/{id}", get(room))
        .route("/api/rooms/{id}/visible", get(visible))
        .route("/api/books/{id}", get(book))
        .route("/api/books/{id}/pages/{n}", get(page))
        .route("/api/books/{id}/context", get(context))
        .route("/api/search", get(search))
        .fallback(|| async { ApiError::not_found("no such endpoint".into()) })
        .layer(cors)
        .with_state(state)
}

/// Serve until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    state: Shared,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await
}

fn json(status: StatusCode, body: Bytes) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn not_found(message: String) -> Self {
        ApiError { status: StatusCode::NOT_FOUND, message }
    }

    fn bad_request(message: String) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, message }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        #[derive(Serialize)]
        struct Body<'a> {
            error: &'a str,
            status: u16,
        }
        let body = fragment_bytes(&Body { error: &self.message, status: self.status.as_u16() });
        json(self.status, body.into())
    }
}

type ApiResult = Result<Response, ApiError>;

fn room_id(state: &AppState, raw: &str) -> Result<usize, ApiError> {
    let id: usize =
        raw.parse().map_err(|_| ApiError::bad_request(format!("room id {raw:?} is not a non-negative integer")))?;
    if id >= state.rooms.len() {
        return Err(ApiError::not_found(format!("unknown room {id}")));
    }
    Ok(id)
}

fn book_entry<'a>(state: &'a AppState, id: &str) -> Result<&'a state::BookEntry, ApiError> {
    state.books.get(id).ok_or_else(|| ApiError::not_found(format!("unknown book {id:?}")))
}

async fn healthz() -> Response {
    json(StatusCode::OK, Bytes::from_static(b"{\n  \"status\": \"ok\"\n}\n"))
}

async fn layout(State(s): State<Shared>) -> Response {
    json(StatusCode::OK, s.layout.clone())
}

async fn map(State(s): State<Shared>) -> Response {
    json(StatusCode::OK, s.map.clone())
}

async fn room(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult {
    let id = room_id(&s, &id)?;
    Ok(json(StatusCode::OK, s.rooms[id].clone()))
}

async fn visible(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult {
    let id = room_id(&s, &id)?;
    Ok(json(StatusCode::OK, s.visible[id].clone()))
}

async fn book(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult {
    Ok(json(StatusCode::OK, book_entry(&s, &id)?.meta.clone()))
}

async fn page(State(s): State<Shared>, Path((id, n)): Path<(String, String)>) -> ApiResult {
    let entry = book_entry(&s, &id)?;
    let n: usize =
        n.parse().map_err(|_| ApiError::bad_request(format!("page number {n:?} is not a non-negative integer")))?;
    let total = entry.pages.len();
    let &(a, b) = entry
        .pages
        .get(n)
        .ok_or_else(|| ApiError::not_found(format!("book {id:?} has {total} pages; page {n} does not exist")))?;
    let page = Page { book_id: id, index: n, text: entry.text[a..b].to_string(), total_pages: total };
    Ok(json(StatusCode::OK, fragment_bytes(&page).into()))
}

const PLACEHOLDER: &str = "This information is not available right now. Please try again later.";

async fn context(
    State(s): State<Shared>,
    Path(id): Path<String>,
    Query(q): Query<HashMap<String, String>>,
) -> ApiResult {
    let entry = book_entry(&s, &id)?;
    let raw = q.get("kind").ok_or_else(|| ApiError::bad_request("missing query parameter kind".into()))?;
    let kind: ContextKind = raw.parse().map_err(ApiError::bad_request)?;
    let record = entry.record.clone();
    let (backend, cache) = (s.backend.clone(), s.cache.clone());
    let result = tokio::task::spawn_blocking(move || get_context(&record, kind, backend.as_ref(), cache.as_ref()))
        .await
        .map_err(|e| ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            message: format!("context task failed: {e}"),
        })?;
    match result {
        Ok(r) => Ok(json(StatusCode::OK, fragment_bytes(&r).into())),
        Err(e) => {
            log::warn!("context for {id} ({}) failed: {e}", kind.as_str());
            #[derive(Serialize)]
            struct Failed<'a> {
                book_id: &'a str,
                kind: ContextKind,
                text: &'a str,
                error: String,
            }
            let body = Failed { book_id: &id, kind, text: PLACEHOLDER, error: e.to_string() };
            Ok(json(StatusCode::BAD_GATEWAY, fragment_bytes(&body).into()))
        }
    }
}

#[derive(Serialize)]
struct SearchMatch<'a> {
    book_id: &'a str,
    title: &'a str,
    category: &'a str,
    room: usize,
}

#[derive(Serialize)]
struct SearchBody<'a> {
    query: &'a str,
    category: &'a str,
    total: usize,
    matches: Vec<SearchMatch<'a>>,
}

/// Case-insensitive substring match over title and category, optionally
/// restricted to one category. Results keep catalog order.
async fn search(State(s): State<Shared>, Query(q): Query<HashMap<String, String>>) -> ApiResult {
    let query = q.get("q").map(|v| v.trim()).unwrap_or("");
    let category = q.get("category").map(|v| v.trim()).unwrap_or("");
    if query.is_empty() && category.is_empty() {
        return Err(ApiError::bad_request("give a non-empty q or category".into()));
    }
    let limit = match q.get("limit") {
        None => DEFAULT_SEARCH_LIMIT,
        Some(v) => match v.parse::<usize>() {
            Ok(n) if (1..=MAX_SEARCH_LIMIT).contains(&n) => n,
            _ => {
                return Err(ApiError::bad_request(format!(
                    "limit must be an integer in 1..={MAX_SEARCH_LIMIT}, got {v:?}"
                )))
            }
        },
    };
    let (q_lc, cat_lc) = (query.to_lowercase(), category.to_lowercase());
    let mut total = 0;
    let mut matches = Vec::new();
    for row in s.search.iter().filter(|r| r.matches(&q_lc, &cat_lc)) {
        total += 1;
        if matches.len() < limit {
            matches.push(SearchMatch {
                book_id: &row.book_id,
                title: &row.title,
                category: &row.category,
                room: row.room,
            });
        }
    }
    let body = SearchBody { query, category, total, matches };
    Ok(json(StatusCode::OK, fragment_bytes(&body).into()))
}
