//! Per-book reading context ("additional information" and "summary") from a
//! pluggable completion backend, with caching.

use std::collections::HashMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::catalog::BookRecord;
use crate::error::ContextError;

/// Bump when either prompt template changes; cached answers are keyed by it.
pub const TEMPLATE_VERSION: u32 = 1;
/// Environment variable holding the HTTP backend's bearer token.
pub const TOKEN_ENV: &str = "LIBRARIA_CONTEXT_TOKEN";

const SUMMARY_PREFIX: &str = "Summarize the book ";
const INFO_PREFIX: &str = "Provide background information about the book ";
const EMPTY_PROMPT_REPLY: &str = "No prompt was given, so there is nothing to say about this book yet.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContextKind {
    AdditionalInfo,
    Summary,
}

impl ContextKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ContextKind::AdditionalInfo => "additional_info",
            ContextKind::Summary => "summary",
        }
    }
}

impl std::str::FromStr for ContextKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "additional_info" => Ok(ContextKind::AdditionalInfo),
            "summary" => Ok(ContextKind::Summary),
            other => Err(format!("unknown context kind {other:?} (expected summary or additional_info)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextRequest {
    pub book_id: String,
    pub kind: ContextKind,
    pub prompt: String,
}

impl ContextRequest {
    pub fn for_book(book: &BookRecord, kind: ContextKind) -> Self {
        let prompt = match kind {
            ContextKind::AdditionalInfo => {
                format!("{INFO_PREFIX}{} by {} ({}).", book.title, book.author, book.year)
            }
            ContextKind::Summary => format!("{SUMMARY_PREFIX}{} by {}.", book.title, book.author),
        };
        ContextRequest { book_id: book.id.clone(), kind, prompt }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Mock,
    Http,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextResult {
    pub book_id: String,
    pub kind: ContextKind,
    pub text: String,
    pub backend: BackendKind,
    pub cached: bool,
    /// RFC 3339, UTC.
    pub fetched_at: String,
}

pub trait CompletionBackend: Send + Sync {
    fn kind(&self) -> BackendKind;
    fn complete(&self, prompt: &str) -> Result<String, ContextError>;
}

const THEMES: [&str; 16] = [
    "memory",
    "exile",
    "duty",
    "ambition",
    "grief",
    "faith",
    "the sea",
    "friendship",
    "power",
    "justice",
    "love",
    "nature",
    "time",
    "honour",
    "wonder",
    "home",
];

/// Deterministic stand-in for a completion model.
pub fn mock_completion(prompt: &str) -> String {
    if prompt.trim().is_empty() {
        return EMPTY_PROMPT_REPLY.to_string();
    }
    let head = if let Some(rest) = prompt.strip_prefix(SUMMARY_PREFIX) {
        format!("Summary of {}", rest.trim_end_matches('.'))
    } else if let Some(rest) = prompt.strip_prefix(INFO_PREFIX) {
        format!("Background on {}", rest.trim_end_matches('.'))
    } else {
        "Response".to_string()
    };
    let d = Sha256::digest(prompt.as_bytes());
    let pick = |i: usize| THEMES[(d[i] & 0x0f) as usize];
    format!(
        "{head}. Readers often note its attention to {}, {} and {} (reference {}).",
        pick(0),
        pick(1),
        pick(2),
        hex::encode(&d[..4])
    )
}

/// In-process mock that counts how often it was asked.
#[derive(Debug, Default)]
pub struct MockBackend {
    calls: AtomicUsize,
}

impl MockBackend {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl CompletionBackend for MockBackend {
    fn kind(&self) -> BackendKind {
        BackendKind::Mock
    }

    fn complete(&self, prompt: &str) -> Result<String, ContextError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        Ok(mock_completion(prompt))
    }
}

/// POSTs `{"prompt": ...}` to a URL and reads the answer from `text`,
/// `completion` or `choices[0].text`.
pub struct HttpBackend {
    url: String,
    token: Option<String>,
    agent: ureq::Agent,
}

impl HttpBackend {
    pub fn new(url: impl Into<String>, token: Option<String>, timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder().timeout_global(Some(timeout)).build();
        HttpBackend { url: url.into(), token, agent: ureq::Agent::new_with_config(config) }
    }

    /// Token from [`TOKEN_ENV`], if set.
    pub fn from_env(url: impl Into<String>) -> Self {
        Self::new(url, std::env::var(TOKEN_ENV).ok().filter(|t| !t.is_empty()), Duration::from_secs(30))
    }
}

fn extract_text(v: &Value) -> Option<String> {
    v.get("text")
        .or_else(|| v.get("completion"))
        .or_else(|| v.pointer("/choices/0/text"))
        .and_then(Value::as_str)
        .map(str::to_string)
}

impl CompletionBackend for HttpBackend {
    fn kind(&self) -> BackendKind {
        BackendKind::Http
    }

    fn complete(&self, prompt: &str) -> Result<String, ContextError> {
        let mut req = self.agent.post(&self.url);
        if let Some(t) = &self.token {
            req = req.header("Authorization", format!("Bearer {t}"));
        }
        let mut resp =
            req.send_json(serde_json::json!({ "prompt": prompt })).map_err(|e| ContextError::Backend(e.to_string()))?;
        let body: Value = resp.body_mut().read_json().map_err(|e| ContextError::Backend(e.to_string()))?;
        match extract_text(&body) {
            Some(t) if !t.trim().is_empty() => Ok(t),
            _ => Err(ContextError::Backend("response carries no text".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub book_id: String,
    pub kind: ContextKind,
    pub template_version: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CachedEntry {
    pub text: String,
    pub backend: BackendKind,
    pub fetched_at: String,
}

pub trait ContextCache: Send + Sync {
    fn get(&self, key: &CacheKey) -> Option<CachedEntry>;
    fn put(&self, key: &CacheKey, entry: &CachedEntry) -> Result<(), ContextError>;
}

#[derive(Debug, Default)]
pub struct MemoryCache {
    map: Mutex<HashMap<CacheKey, CachedEntry>>,
}

impl MemoryCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl ContextCache for MemoryCache {
    fn get(&self, key: &CacheKey) -> Option<CachedEntry> {
        self.map.lock().expect("cache lock").get(key).cloned()
    }

    fn put(&self, key: &CacheKey, entry: &CachedEntry) -> Result<(), ContextError> {
        self.map.lock().expect("cache lock").insert(key.clone(), entry.clone());
        Ok(())
    }
}

/// One JSON file per key. Writes go through a temp file and a rename, so
/// readers never see a torn entry; concurrent writers of one key race and the
/// last rename wins.
#[derive(Debug, Clone)]
pub struct DirCache {
    dir: PathBuf,
}

impl DirCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, ContextError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(DirCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &CacheKey) -> PathBuf {
        let mut name = String::new();
        for b in key.book_id.bytes() {
            if b.is_ascii_alphanumeric() || b == b'-' || b == b'_' {
                name.push(b as char);
            } else {
                name.push_str(&format!("%{b:02X}"));
            }
        }
        self.dir.join(format!("{name}.{}.v{}.json", key.kind.as_str(), key.template_version))
    }
}

impl ContextCache for DirCache {
    fn get(&self, key: &CacheKey) -> Option<CachedEntry> {
        let bytes = fs::read(self.path_for(key)).ok()?;
        serde_json::from_slice(&bytes).ok()
    }

    fn put(&self, key: &CacheKey, entry: &CachedEntry) -> Result<(), ContextError> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(&serde_json::to_vec(entry).map_err(std::io::Error::other)?)?;
        tmp.persist(self.path_for(key)).map_err(|e| e.error)?;
        Ok(())
    }
}

pub fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Cached context for `book`; calls `backend` only on a miss.
pub fn get_context(
    book: &BookRecord,
    kind: ContextKind,
    backend: &dyn CompletionBackend,
    cache: &dyn ContextCache,
) -> Result<ContextResult, ContextError> {
    let key = CacheKey { book_id: book.id.clone(), kind, template_version: TEMPLATE_VERSION };
    if let Some(hit) = cache.get(&key) {
        return Ok(ContextResult {
            book_id: book.id.clone(),
            kind,
            text: hit.text,
            backend: hit.backend,
            cached: true,
            fetched_at: hit.fetched_at,
        });
    }
    let req = ContextRequest::for_book(book, kind);
    let text = backend.complete(&req.prompt)?;
    if text.trim().is_empty() {
        return Err(ContextError::Backend("backend returned empty text".into()));
    }
    let entry = CachedEntry { text, backend: backend.kind(), fetched_at: now_rfc3339() };
    if let Err(e) = cache.put(&key, &entry) {
        log::warn!("could not cache context for {}: {e}", book.id);
    }
    Ok(ContextResult {
        book_id: book.id.clone(),
        kind,
        text: entry.text,
        backend: entry.backend,
        cached: false,
        fetched_at: entry.fetched_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hamlet() -> BookRecord {
        BookRecord {
            id: "pg100".into(),
            title: "Hamlet".into(),
            author: "Shakespeare".into(),
            year: 1603,
            category: "Harvard Classics".into(),
            text_uri: "pg100.txt".into(),
            text_length: 0,
        }
    }

    #[test]
    fn mock_summary_names_the_book() {
        let backend = MockBackend::new();
        let cache = MemoryCache::new();
        let r = get_context(&hamlet(), ContextKind::Summary, &backend, &cache).unwrap();
        assert!(r.text.starts_with("Summary of Hamlet by Shakespeare"), "{}", r.text);
        assert!(!r.cached);
        assert_eq!(r.backend, BackendKind::Mock);
        let again = get_context(&hamlet(), ContextKind::Summary, &backend, &cache).unwrap();
        assert!(again.cached);
        assert_eq!(again.text, r.text);
        assert_eq!(backend.calls(), 1);
    }

    #[test]
    fn mock_is_a_pure_function() {
        assert_eq!(mock_completion(""), EMPTY_PROMPT_REPLY);
        assert_eq!(mock_completion("abc"), mock_completion("abc"));
        assert_ne!(mock_completion("abc"), mock_completion("abd"));
    }

    struct Failing;
    impl CompletionBackend for Failing {
        fn kind(&self) -> BackendKind {
            BackendKind::Http
        }
        fn complete(&self, _: &str) -> Result<String, ContextError> {
            Err(ContextError::Backend("status 500".into()))
        }
    }

    #[test]
    fn failures_leave_the_cache_alone() {
        let cache = MemoryCache::new();
        let err = get_context(&hamlet(), ContextKind::Summary, &Failing, &cache).unwrap_err();
        assert!(err.to_string().contains("500"));
        assert!(cache.is_empty());
    }

    #[test]
    fn dir_cache_round_trips_awkward_ids() {
        let tmp = tempfile::tempdir().unwrap();
        let cache = DirCache::new(tmp.path()).unwrap();
        let key = CacheKey { book_id: "a/b c".into(), kind: ContextKind::AdditionalInfo, template_version: 1 };
        assert!(cache.get(&key).is_none());
        let entry = CachedEntry { text: "t".into(), backend: BackendKind::Mock, fetched_at: "x".into() };
        cache.put(&key, &entry).unwrap();
        assert_eq!(cache.get(&key), Some(entry));
        assert!(cache.path_for(&key).file_name().unwrap().to_str().unwrap().starts_with("a%2Fb%20c."));
    }
}
