use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("line {line}: {field} {message}")]
    Field { line: u64, field: String, message: String },
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("duplicate book id {0:?}")]
    DuplicateId(String),
    #[error("input is not valid UTF-8 (byte offset {0})")]
    NotUtf8(usize),
    #[error("no categories")]
    NoCategories,
    #[error("catalog has validation errors: {0}")]
    Invalid(String),
    #[error("unrecognized catalog format {0:?} (expected csv or jsonl)")]
    UnknownFormat(String),
}

#[derive(Debug, Error)]
pub enum ParamError {
    #[error("{0}")]
    Invariant(String),
    #[error("invalid value {value:?} for {key}")]
    Value { key: String, value: String },
    #[error("unknown parameter {0:?}")]
    UnknownKey(String),
    #[error("config line {line}: expected key=value, got {text:?}")]
    Syntax { line: usize, text: String },
}

#[derive(Debug, Error)]
pub enum RoomError {
    #[error("book count must be at least 1")]
    EmptyCategory,
    #[error("contract violation: {0}")]
    Contract(String),
}

#[derive(Debug, Error)]
pub enum LayoutError {
    #[error("no categories to lay out")]
    NoCategories,
    #[error(transparent)]
    Room(#[from] RoomError),
    #[error(transparent)]
    Params(#[from] ParamError),
}

#[derive(Debug, Error)]
pub enum NavError {
    #[error("unknown room id {0}")]
    UnknownRoom(usize),
}

#[derive(Debug, Error)]
pub enum TextError {
    #[error("text is not valid UTF-8 (byte offset {0})")]
    NotUtf8(usize),
    #[error("cannot read text {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("unsupported text location {0:?}; only local paths and file: URIs are loaded")]
    Unsupported(String),
}

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("dangling {kind} reference {id:?}")]
    Dangling { kind: &'static str, id: String },
    #[error("duplicate book id {0:?}")]
    DuplicateBook(String),
    #[error("book {0:?} is missing from the scene chunks")]
    MissingBook(String),
    #[error("shelf in room {room} holds {count} books, over capacity {capacity}")]
    OverCapacity { room: usize, count: usize, capacity: usize },
    #[error("unsupported world format_version {0}")]
    UnsupportedVersion(u64),
    #[error("world file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Params(#[from] ParamError),
}

#[derive(Debug, Error)]
pub enum ContextError {
    #[error("completion backend failed: {0}")]
    Backend(String),
    #[error("context cache error: {0}")]
    Cache(#[from] std::io::Error),
}
