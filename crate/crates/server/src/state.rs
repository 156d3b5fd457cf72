//! Everything the handlers read, rendered once at startup.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use axum::body::Bytes;
use serde::Serialize;

use libraria_core::catalog::{FsTextSource, TextSource};
use libraria_core::context::{CompletionBackend, ContextCache, MemoryCache, MockBackend};
use libraria_core::error::TextError;
use libraria_core::layoutgen::{BBox, Connection};
use libraria_core::navmap::{MapModel, Signboard};
use libraria_core::pagination::page_ranges;
use libraria_core::roomgen::RoomPlan;
use libraria_core::scene::visible_set;
use libraria_core::world::{fragment_bytes, WorldFile};
use libraria_core::BookRecord;

use crate::ServerError;

pub const DEFAULT_SEARCH_LIMIT: usize = 50;
pub const MAX_SEARCH_LIMIT: usize = 1000;

pub struct ServerConfig {
    /// Overrides the page size recorded in the world.
    pub chars_per_page: Option<usize>,
    pub backend: Arc<dyn CompletionBackend>,
    pub cache: Arc<dyn ContextCache>,
    /// Allowed CORS origin; `None` allows any.
    pub cors_origin: Option<String>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            chars_per_page: None,
            backend: Arc::new(MockBackend::new()),
            cache: Arc::new(MemoryCache::new()),
            cors_origin: None,
        }
    }
}

pub(crate) struct BookEntry {
    pub record: BookRecord,
    pub text: String,
    pub pages: Vec<(usize, usize)>,
    pub meta: Bytes,
}

pub(crate) struct SearchRow {
    pub book_id: String,
    pub title: String,
    pub category: String,
    pub room: usize,
    title_lc: String,
    category_lc: String,
}

impl SearchRow {
    pub fn matches(&self, q: &str, category: &str) -> bool {
        (category.is_empty() || self.category_lc == category)
            && (self.title_lc.contains(q) || self.category_lc.contains(q))
    }
}

#[derive(Serialize)]
struct LayoutBody<'a> {
    rooms: &'a [RoomPlan],
    connections: &'a [Connection],
    bbox: &'a BBox,
}

#[derive(Serialize)]
struct MapBody<'a> {
    #[serde(flatten)]
    map: &'a MapModel,
    signboards: &'a [Signboard],
}

#[derive(Serialize)]
struct BookMeta<'a> {
    id: &'a str,
    title: &'a str,
    author: &'a str,
    publication_year: i32,
    category: &'a str,
    room: usize,
    total_pages: usize,
    text_length: usize,
}

/// Immutable after construction; shared by all request handlers.
pub struct AppState {
    pub(crate) layout: Bytes,
    pub(crate) map: Bytes,
    pub(crate) rooms: Vec<Bytes>,
    pub(crate) visible: Vec<Bytes>,
    pub(crate) books: HashMap<String, BookEntry>,
    pub(crate) search: Vec<SearchRow>,
    pub(crate) chars_per_page: usize,
    pub(crate) backend: Arc<dyn CompletionBackend>,
    pub(crate) cache: Arc<dyn ContextCache>,
    pub(crate) cors_origin: Option<String>,
}

impl AppState {
    /// `texts` holds the normalized text of each catalog book, in catalog order.
    pub fn new(world: WorldFile, texts: Vec<String>, config: ServerConfig) -> Result<Self, ServerError> {
        world.verify()?;
        if texts.len() != world.catalog.books.len() {
            return Err(ServerError::Texts(format!("{} texts for {} books", texts.len(), world.catalog.books.len())));
        }
        let chars_per_page = config.chars_per_page.unwrap_or(world.pagination.chars_per_page);
        if chars_per_page == 0 {
            return Err(ServerError::Config("chars_per_page must be > 0".into()));
        }
        let layout = &world.layout;
        let rooms = world.chunks.iter().map(|c| Bytes::from(fragment_bytes(c))).collect();
        let visible = (0..layout.rooms.len())
            .map(|r| Bytes::from(fragment_bytes(&visible_set(layout, r).expect("room ids are dense"))))
            .collect();
        let mut room_of = HashMap::new();
        for room in &layout.rooms {
            for a in room.shelves.iter().flat_map(|s| &s.assigned) {
                room_of.insert(a.book_id.clone(), room.id);
            }
        }
        let mut books = HashMap::with_capacity(texts.len());
        let mut search = Vec::with_capacity(texts.len());
        for (record, text) in world.catalog.books.iter().zip(texts) {
            let room = room_of[&record.id];
            let pages = page_ranges(&text, chars_per_page);
            let meta = Bytes::from(fragment_bytes(&BookMeta {
                id: &record.id,
                title: &record.title,
                author: &record.author,
                publication_year: record.year,
                category: &record.category,
                room,
                total_pages: pages.len(),
                text_length: text.chars().count(),
            }));
            search.push(SearchRow {
                book_id: record.id.clone(),
                title: record.title.clone(),
                category: record.category.clone(),
                room,
                title_lc: record.title.to_lowercase(),
                category_lc: record.category.to_lowercase(),
            });
            books.insert(record.id.clone(), BookEntry { record: record.clone(), text, pages, meta });
        }
        Ok(AppState {
            layout: Bytes::from(fragment_bytes(&LayoutBody {
                rooms: &layout.rooms,
                connections: &layout.connections,
                bbox: &layout.bbox,
            })),
            map: Bytes::from(fragment_bytes(&MapBody { map: &world.map, signboards: &world.signboards })),
            rooms,
            visible,
            books,
            search,
            chars_per_page,
            backend: config.backend,
            cache: config.cache,
            cors_origin: config.cors_origin,
        })
    }

    pub fn room_count(&self) -> usize {
        self.rooms.len()
    }

    pub fn book_count(&self) -> usize {
        self.books.len()
    }

    pub fn chars_per_page(&self) -> usize {
        self.chars_per_page
    }
}

/// Normalized texts of the world's books, resolved against `root`.
pub fn load_texts(world: &WorldFile, root: &Path) -> Result<Vec<String>, TextError> {
    let source = FsTextSource::new(root);
    world.catalog.books.iter().map(|b| source.load(b)).collect()
}
