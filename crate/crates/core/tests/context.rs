use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use libraria_core::context::{
    get_context, mock_completion, CacheKey, ContextCache, ContextKind, DirCache, HttpBackend, MemoryCache, MockBackend,
    TEMPLATE_VERSION,
};
use libraria_core::BookRecord;
use libraria_testkit::book;
use proptest::prelude::*;

fn hamlet() -> BookRecord {
    BookRecord {
        id: "pg100".into(),
        title: "Hamlet".into(),
        author: "Shakespeare".into(),
        year: 1603,
        category: "Harvard Classics".into(),
        text_uri: "texts/pg100.txt".into(),
        text_length: 0,
    }
}

/// Serves one canned HTTP response per connection and returns the bodies it received.
fn stub_server(status: &'static str, body: &'static str, requests: usize) -> (String, thread::JoinHandle<Vec<String>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/complete", listener.local_addr().unwrap());
    let handle = thread::spawn(move || {
        let mut seen = Vec::new();
        for stream in listener.incoming().take(requests) {
            let mut stream = stream.unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut len = 0;
            let mut headers = String::new();
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line == "\r\n" || line.is_empty() {
                    break;
                }
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
                headers.push_str(&line);
            }
            let mut buf = vec![0; len];
            reader.read_exact(&mut buf).unwrap();
            seen.push(format!("{headers}\n{}", String::from_utf8(buf).unwrap()));
            write!(stream, "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}", body.len()).unwrap();
        }
        seen
    });
    (url, handle)
}

#[test]
fn summary_for_hamlet() {
    let backend = MockBackend::new();
    let cache = MemoryCache::new();
    let r = get_context(&hamlet(), ContextKind::Summary, &backend, &cache).unwrap();
    assert!(r.text.starts_with("Summary of Hamlet by Shakespeare"), "{}", r.text);
    assert!(!r.cached);
    let again = get_context(&hamlet(), ContextKind::Summary, &backend, &cache).unwrap();
    assert_eq!(again.text, r.text);
    assert!(again.cached);
    assert_eq!(backend.calls(), 1);
}

#[test]
fn http_500_is_surfaced_and_not_cached() {
    let (url, server) = stub_server("500 Internal Server Error", r#"{"error":"boom"}"#, 1);
    let backend = HttpBackend::new(url, Some("secret".into()), Duration::from_secs(5));
    let cache = MemoryCache::new();
    let err = get_context(&hamlet(), ContextKind::Summary, &backend, &cache).unwrap_err();
    assert!(err.to_string().contains("500"), "{err}");
    assert!(cache.is_empty());
    server.join().unwrap();
}

#[test]
fn http_backend_posts_the_prompt_with_a_bearer_token() {
    let (url, server) = stub_server("200 OK", r#"{"choices":[{"text":"A play about a prince."}]}"#, 1);
    let backend = HttpBackend::new(url, Some("secret".into()), Duration::from_secs(5));
    let cache = MemoryCache::new();
    let r = get_context(&hamlet(), ContextKind::AdditionalInfo, &backend, &cache).unwrap();
    assert_eq!(r.text, "A play about a prince.");
    let seen = server.join().unwrap();
    let req = seen[0].to_ascii_lowercase();
    assert!(req.contains("authorization: bearer secret"));
    assert!(seen[0].contains("Provide background information about the book Hamlet by Shakespeare (1603)."));
}

#[test]
fn unreachable_backend_is_an_error() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let backend = HttpBackend::new(format!("http://127.0.0.1:{port}/"), None, Duration::from_secs(2));
    assert!(get_context(&hamlet(), ContextKind::Summary, &backend, &MemoryCache::new()).is_err());
}

#[test]
fn mock_outputs_differ_by_prompt_digest() {
    let a = mock_completion("Summarize the book A by B.");
    let b = mock_completion("Summarize the book C by D.");
    assert_ne!(a.split(". ").nth(1), b.split(". ").nth(1));
    assert_eq!(mock_completion("x"), mock_completion("x"));
    assert!(!mock_completion("").is_empty());
}

#[test]
fn dir_cache_survives_reopen() {
    let dir = tempfile::tempdir().unwrap();
    let backend = MockBackend::new();
    let b = BookRecord { id: "odd/id with spaces".into(), ..hamlet() };
    let first = get_context(&b, ContextKind::Summary, &backend, &DirCache::new(dir.path()).unwrap()).unwrap();
    let again = get_context(&b, ContextKind::Summary, &backend, &DirCache::new(dir.path()).unwrap()).unwrap();
    assert!(again.cached);
    assert_eq!(again.text, first.text);
    assert_eq!(backend.calls(), 1);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn concurrent_dir_cache_writes_never_tear() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Arc::new(DirCache::new(dir.path()).unwrap());
    let backend = Arc::new(MockBackend::new());
    let books: Vec<BookRecord> = (0..8).map(|i| book(format!("b{i}"), "C".into(), i)).collect();
    let handles: Vec<_> = (0..8)
        .map(|t| {
            let (cache, backend, books) = (cache.clone(), backend.clone(), books.clone());
            thread::spawn(move || {
                for round in 0..20 {
                    let b = &books[(t + round) % books.len()];
                    let r = get_context(b, ContextKind::Summary, backend.as_ref(), cache.as_ref()).unwrap();
                    assert_eq!(r.text, mock_completion(&format!("Summarize the book {} by {}.", b.title, b.author)));
                }
            })
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }
    // Same-key races may each miss once; never more than one call per thread and key.
    assert!(backend.calls() >= books.len() && backend.calls() <= books.len() * 8);
    for b in &books {
        let key = CacheKey { book_id: b.id.clone(), kind: ContextKind::Summary, template_version: TEMPLATE_VERSION };
        assert!(cache.get(&key).is_some());
    }
}

proptest! {
    /// After any request sequence the backend was called once per distinct key.
    #[test]
    fn cache_soundness(requests in prop::collection::vec((0usize..6, any::<bool>()), 0..60)) {
        let backend = MockBackend::new();
        let cache = MemoryCache::new();
        let books: Vec<BookRecord> = (0..6).map(|i| book(format!("b{i}"), "C".into(), i)).collect();
        let mut distinct = std::collections::HashSet::new();
        for (i, summary) in requests {
            let kind = if summary { ContextKind::Summary } else { ContextKind::AdditionalInfo };
            distinct.insert((i, summary));
            let r = get_context(&books[i], kind, &backend, &cache).unwrap();
            prop_assert!(!r.text.is_empty());
        }
        prop_assert_eq!(backend.calls(), distinct.len());
    }
}
