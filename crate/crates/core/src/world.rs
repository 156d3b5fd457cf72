//! The world file: everything the server and viewer need, in one canonical
//! JSON document.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::canonical::{to_canonical, value_to_canonical};
use crate::catalog::{group_by_category, validate_catalog, BookRecord, Catalog};
use crate::error::{CatalogError, WorldError};
use crate::layoutgen::{generate_layout, Layout};
use crate::navmap::{build_map, MapModel, Signboard};
use crate::pagination::page_count;
use crate::params::GenParams;
use crate::roomgen::DoorLink;
use crate::scene::{instantiate_room, SceneChunk};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaginationIndex {
    pub chars_per_page: usize,
    /// Book id to page count.
    pub pages: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldFile {
    pub format_version: u64,
    pub seed: u64,
    pub params: GenParams,
    pub layout: Layout,
    pub map: MapModel,
    pub signboards: Vec<Signboard>,
    pub chunks: Vec<SceneChunk>,
    pub pagination: PaginationIndex,
    pub catalog: Catalog,
}

pub fn book_index(catalog: &Catalog) -> HashMap<&str, &BookRecord> {
    catalog.books.iter().map(|b| (b.id.as_str(), b)).collect()
}

/// Run the whole pipeline. `texts` holds the normalized text of each
/// catalog book, in catalog order.
pub fn generate_world(
    catalog: &Catalog,
    texts: &[String],
    params: &GenParams,
    seed: u64,
) -> Result<WorldFile, WorldError> {
    params.validate()?;
    let report = validate_catalog(catalog);
    if let Some(first) = report.errors().next() {
        return Err(CatalogError::Invalid(format!("book {:?}: {}", first.book_id, first.message)).into());
    }
    if texts.len() != catalog.books.len() {
        return Err(WorldError::Dangling {
            kind: "text for book",
            id: format!("{} texts for {} books", texts.len(), catalog.books.len()),
        });
    }
    let categories = group_by_category(catalog)?;
    let layout = generate_layout(&categories, params, seed)?;
    let (map, signboards) = build_map(&layout);
    let books = book_index(catalog);
    let chunks = layout.rooms.iter().map(|r| instantiate_room(r, &layout.rooms, &books, params)).collect();
    let pages =
        catalog.books.iter().zip(texts).map(|(b, t)| (b.id.clone(), page_count(t, params.chars_per_page))).collect();
    let mut catalog = catalog.clone();
    for (b, t) in catalog.books.iter_mut().zip(texts) {
        b.text_length = t.chars().count();
    }
    let world = WorldFile {
        format_version: FORMAT_VERSION,
        seed,
        params: params.clone(),
        layout,
        map,
        signboards,
        chunks,
        pagination: PaginationIndex { chars_per_page: params.chars_per_page, pages },
        catalog,
    };
    Ok(world)
}

fn dangling(kind: &'static str, id: impl ToString) -> WorldError {
    WorldError::Dangling { kind, id: id.to_string() }
}

impl WorldFile {
    /// Check that every reference resolves inside the file and that each
    /// catalog book sits on exactly one shelf slot and one spine.
    pub fn verify(&self) -> Result<(), WorldError> {
        if self.format_version != FORMAT_VERSION {
            return Err(WorldError::UnsupportedVersion(self.format_version));
        }
        let mut books = HashSet::new();
        for b in &self.catalog.books {
            if !books.insert(b.id.as_str()) {
                return Err(WorldError::DuplicateBook(b.id.clone()));
            }
        }
        let n = self.layout.rooms.len();
        let room_ok = |r: usize| r < n;
        let capacity = self.params.shelf_capacity();
        let mut shelved = HashSet::new();
        for (i, room) in self.layout.rooms.iter().enumerate() {
            if room.id != i {
                return Err(dangling("room", room.id));
            }
            for shelf in &room.shelves {
                if shelf.assigned.len() > capacity {
                    return Err(WorldError::OverCapacity { room: i, count: shelf.assigned.len(), capacity });
                }
                for a in &shelf.assigned {
                    if !books.contains(a.book_id.as_str()) {
                        return Err(dangling("book", &a.book_id));
                    }
                    if !shelved.insert(a.book_id.as_str()) {
                        return Err(WorldError::DuplicateBook(a.book_id.clone()));
                    }
                }
            }
            for d in &room.doors {
                if let DoorLink::Rooms { a, b } = d.connects {
                    for r in [a, b] {
                        if !room_ok(r) {
                            return Err(dangling("room", r));
                        }
                    }
                }
                if let Some(c) = d.connection {
                    if c >= self.layout.connections.len() {
                        return Err(dangling("connection", c));
                    }
                }
            }
        }
        for (i, c) in self.layout.connections.iter().enumerate() {
            if c.id != i {
                return Err(dangling("connection", c.id));
            }
            for r in c.rooms {
                if !room_ok(r) {
                    return Err(dangling("room", r));
                }
            }
        }
        let map_rooms = self
            .map
            .outlines
            .iter()
            .map(|o| o.room)
            .chain(self.map.teleports.iter().map(|t| t.room))
            .chain(self.map.category_index.iter().map(|e| e.room))
            .chain(self.signboards.iter().map(|s| s.room))
            .chain(self.signboards.iter().flat_map(|s| s.entries.iter().filter_map(|e| e.neighbor)));
        for r in map_rooms {
            if !room_ok(r) {
                return Err(dangling("room", r));
            }
        }
        for m in &self.map.doors {
            if let Some(c) = m.door {
                if c >= self.layout.connections.len() {
                    return Err(dangling("connection", c));
                }
            }
        }
        let mut spines = HashSet::new();
        for chunk in &self.chunks {
            if !room_ok(chunk.room) {
                return Err(dangling("room", chunk.room));
            }
            for id in chunk.spine_book_ids() {
                if !books.contains(id) {
                    return Err(dangling("book", id));
                }
                if !spines.insert(id) {
                    return Err(WorldError::DuplicateBook(id.to_string()));
                }
            }
        }
        for b in &self.catalog.books {
            if !spines.contains(b.id.as_str()) || !shelved.contains(b.id.as_str()) {
                return Err(WorldError::MissingBook(b.id.clone()));
            }
            if !self.pagination.pages.contains_key(&b.id) {
                return Err(dangling("pagination entry for book", &b.id));
            }
        }
        for id in self.pagination.pages.keys() {
            if !books.contains(id.as_str()) {
                return Err(dangling("book", id));
            }
        }
        Ok(())
    }

    /// Canonical bytes of a verified world.
    pub fn to_bytes(&self) -> Result<Vec<u8>, WorldError> {
        self.verify()?;
        Ok(to_canonical(self)?)
    }

    /// Parse and verify. Unknown format versions are rejected before the
    /// rest of the document is interpreted.
    pub fn from_bytes(bytes: &[u8]) -> Result<WorldFile, WorldError> {
        let value: Value = serde_json::from_slice(bytes)?;
        let version = value.get("format_version").and_then(Value::as_u64).unwrap_or(0);
        if version != FORMAT_VERSION {
            return Err(WorldError::UnsupportedVersion(version));
        }
        let world: WorldFile = serde_json::from_value(value)?;
        world.verify()?;
        Ok(world)
    }

    pub fn to_value(&self) -> Result<Value, WorldError> {
        Ok(serde_json::to_value(self)?)
    }
}

/// Canonical bytes of the world; fails on any dangling reference.
pub fn export_world(world: &WorldFile) -> Result<Vec<u8>, WorldError> {
    world.to_bytes()
}

/// Canonical bytes of any serializable fragment.
pub fn fragment_bytes<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    to_canonical(value).expect("world fragments serialize")
}

pub fn canonical_value_bytes(value: &Value) -> Vec<u8> {
    value_to_canonical(value)
}
