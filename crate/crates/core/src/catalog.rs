//! Book catalog ingestion: CSV/JSONL parsing, validation, grouping into
//! categories and plain-text normalization.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CatalogError, TextError};

/// Column order of the CSV schema; JSONL objects use the same names.
pub const FIELDS: [&str; 6] = ["id", "title", "author", "year", "category", "text_uri"];

const TAB_WIDTH: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BookRecord {
    pub id: String,
    pub title: String,
    pub author: String,
    /// Publication year.
    pub year: i32,
    pub category: String,
    pub text_uri: String,
    /// Characters in the normalized text, zero until the text is loaded.
    #[serde(default)]
    pub text_length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub source_name: String,
    pub books: Vec<BookRecord>,
}

/// Books of one category, in catalog order.
#[derive(Debug, Clone, PartialEq)]
pub struct Category<'a> {
    pub name: String,
    pub books: Vec<&'a BookRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogFormat {
    Csv,
    Jsonl,
}

impl CatalogFormat {
    /// Guess the format from a file extension.
    pub fn from_path(path: &Path) -> Result<Self, CatalogError> {
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or_default();
        ext.parse()
    }
}

impl std::str::FromStr for CatalogFormat {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(CatalogFormat::Csv),
            "jsonl" | "ndjson" => Ok(CatalogFormat::Jsonl),
            other => Err(CatalogError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub book_id: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }

    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }
}

fn decode(input: &[u8]) -> Result<&str, CatalogError> {
    std::str::from_utf8(input).map_err(|e| CatalogError::NotUtf8(e.valid_up_to()))
}

/// First entry of a `;`-separated category list.
fn primary_category(raw: &str) -> &str {
    raw.split(';').next().unwrap_or("").trim()
}

fn field_err(line: u64, field: &str, message: &str) -> CatalogError {
    CatalogError::Field { line, field: field.to_string(), message: message.to_string() }
}

struct RawRow<'a> {
    line: u64,
    id: &'a str,
    title: &'a str,
    author: &'a str,
    year: Result<i64, ()>,
    category: &'a str,
    text_uri: &'a str,
}

impl RawRow<'_> {
    fn into_record(self) -> Result<BookRecord, CatalogError> {
        let line = self.line;
        let id = self.id.trim();
        if id.is_empty() {
            return Err(field_err(line, "id", "empty"));
        }
        let year = self
            .year
            .ok()
            .and_then(|y| i32::try_from(y).ok())
            .ok_or_else(|| field_err(line, "year", "not an integer"))?;
        let category = primary_category(self.category);
        if category.is_empty() {
            return Err(field_err(line, "category", "empty"));
        }
        Ok(BookRecord {
            id: id.to_string(),
            title: self.title.trim().to_string(),
            author: self.author.trim().to_string(),
            year,
            category: category.to_string(),
            text_uri: self.text_uri.trim().to_string(),
            text_length: 0,
        })
    }
}

/// Parse a catalog, preserving input order.
pub fn parse_catalog(input: &[u8], format: CatalogFormat, source_name: &str) -> Result<Catalog, CatalogError> {
    let text = decode(input)?;
    let books = match format {
        CatalogFormat::Csv => parse_csv(text)?,
        CatalogFormat::Jsonl => parse_jsonl(text)?,
    };
    let mut seen = HashSet::new();
    for b in &books {
        if !seen.insert(b.id.as_str()) {
            return Err(CatalogError::DuplicateId(b.id.clone()));
        }
    }
    Ok(Catalog { source_name: source_name.to_string(), books })
}

fn parse_csv(text: &str) -> Result<Vec<BookRecord>, CatalogError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| CatalogError::Row { line: 1, message: e.to_string() })?.clone();
    let mut columns = [0usize; 6];
    for (slot, name) in columns.iter_mut().zip(FIELDS) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| field_err(1, name, "column missing from header"))?;
    }
    let mut books = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            CatalogError::Row { line, message: e.to_string() }
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let get = |i: usize| record.get(columns[i]).unwrap_or("");
        let row = RawRow {
            line,
            id: get(0),
            title: get(1),
            author: get(2),
            year: get(3).trim().parse::<i64>().map_err(|_| ()),
            category: get(4),
            text_uri: get(5),
        };
        books.push(row.into_record()?);
    }
    Ok(books)
}

fn parse_jsonl(text: &str) -> Result<Vec<BookRecord>, CatalogError> {
    let mut books = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx as u64 + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let value: Value =
            serde_json::from_str(raw).map_err(|e| CatalogError::Row { line, message: format!("invalid JSON: {e}") })?;
        let Value::Object(obj) = value else {
            return Err(CatalogError::Row { line, message: "expected a JSON object".into() });
        };
        let string = |name: &str| -> Result<&str, CatalogError> {
            match obj.get(name) {
                Some(Value::String(s)) => Ok(s.as_str()),
                Some(_) => Err(field_err(line, name, "not a string")),
                None => Err(field_err(line, name, "missing")),
            }
        };
        let category = match obj.get("category") {
            Some(Value::String(s)) => s.as_str(),
            Some(Value::Array(items)) => match items.first() {
                Some(Value::String(s)) => s.as_str(),
                None => "",
                Some(_) => return Err(field_err(line, "category", "not a string")),
            },
            Some(_) => return Err(field_err(line, "category", "not a string")),
            None => return Err(field_err(line, "category", "missing")),
        };
        let year = match obj.get("year") {
            Some(v) => v.as_i64().ok_or(()),
            None => return Err(field_err(line, "year", "missing")),
        };
        let row = RawRow {
            line,
            id: string("id")?,
            title: string("title")?,
            author: string("author")?,
            year,
            category,
            text_uri: string("text_uri")?,
        };
        books.push(row.into_record()?);
    }
    Ok(books)
}

#[derive(Serialize)]
struct WireBook<'a> {
    id: &'a str,
    title: &'a str,
    author: &'a str,
    year: i32,
    category: &'a str,
    text_uri: &'a str,
}

impl<'a> From<&'a BookRecord> for WireBook<'a> {
    fn from(b: &'a BookRecord) -> Self {
        WireBook {
            id: &b.id,
            title: &b.title,
            author: &b.author,
            year: b.year,
            category: &b.category,
            text_uri: &b.text_uri,
        }
    }
}

/// Write a catalog in the given input format.
pub fn serialize_catalog(catalog: &Catalog, format: CatalogFormat) -> Vec<u8> {
    match format {
        CatalogFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
            for b in &catalog.books {
                w.serialize(WireBook::from(b)).expect("in-memory csv write");
            }
            if catalog.books.is_empty() {
                w.write_record(FIELDS).expect("in-memory csv write");
            }
            w.into_inner().expect("in-memory csv flush")
        }
        CatalogFormat::Jsonl => {
            let mut out = Vec::new();
            for b in &catalog.books {
                serde_json::to_writer(&mut out, &WireBook::from(b)).expect("in-memory json write");
                out.push(b'\n');
            }
            out
        }
    }
}

/// Publication years outside this range are flagged as implausible.
const PLAUSIBLE_YEARS: std::ops::RangeInclusive<i32> = -3000..=2100;

/// Check a `text_uri`: a relative/absolute path or a `file`/`http(s)` URL.
pub fn check_text_uri(uri: &str) -> Result<(), String> {
    if uri.is_empty() {
        return Err("text_uri empty".into());
    }
    if uri.trim() != uri {
        return Err("text_uri has surrounding whitespace".into());
    }
    if uri.chars().any(char::is_control) {
        return Err("text_uri contains control characters".into());
    }
    // A scheme needs at least two letters so Windows drive letters stay paths.
    if let Some((scheme, _)) = uri.split_once(':') {
        let looks_like_scheme = scheme.len() >= 2
            && scheme.chars().all(|c| c.is_ascii_alphanumeric() || "+-.".contains(c))
            && scheme.starts_with(|c: char| c.is_ascii_alphabetic());
        if looks_like_scheme {
            let parsed = url::Url::parse(uri).map_err(|e| format!("text_uri is not a valid URL: {e}"))?;
            if !matches!(parsed.scheme(), "file" | "http" | "https") {
                return Err(format!("text_uri scheme {:?} unsupported", parsed.scheme()));
            }
        }
    }
    Ok(())
}

/// Report every invariant violation without touching the catalog.
pub fn validate_catalog(catalog: &Catalog) -> ValidationReport {
    let mut findings = Vec::new();
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for b in &catalog.books {
        *counts.entry(b.id.as_str()).or_default() += 1;
    }
    let mut reported = HashSet::new();
    for b in &catalog.books {
        let mut push = |severity, message: String| findings.push(Finding { severity, book_id: b.id.clone(), message });
        if b.id.trim().is_empty() {
            push(Severity::Error, "id empty".into());
        }
        if counts[b.id.as_str()] > 1 && reported.insert(b.id.as_str()) {
            push(Severity::Error, format!("id shared by {} books", counts[b.id.as_str()]));
        }
        if b.category.trim().is_empty() {
            push(Severity::Error, "category empty".into());
        }
        if b.title.trim().is_empty() {
            push(Severity::Warning, "title empty".into());
        }
        if b.year == 0 || !PLAUSIBLE_YEARS.contains(&b.year) {
            push(Severity::Warning, format!("year {} implausible", b.year));
        }
        if let Err(msg) = check_text_uri(&b.text_uri) {
            push(Severity::Error, msg);
        }
    }
    ValidationReport { findings }
}

/// Partition books by category in order of first appearance.
pub fn group_by_category(catalog: &Catalog) -> Result<Vec<Category<'_>>, CatalogError> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut out: Vec<Category<'_>> = Vec::new();
    for b in &catalog.books {
        let slot = *index.entry(b.category.as_str()).or_insert_with(|| {
            out.push(Category { name: b.category.clone(), books: Vec::new() });
            out.len() - 1
        });
        out[slot].books.push(b);
    }
    if out.is_empty() {
        return Err(CatalogError::NoCategories);
    }
    Ok(out)
}

/// Unify line endings to LF, expand tabs and strip trailing spaces per line.
pub fn normalize_text(raw: &str) -> String {
    let unified = raw.replace("\r\n", "\n").replace('\r', "\n");
    let mut out = String::with_capacity(unified.len());
    for (i, line) in unified.split('\n').enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let expanded = line.replace('\t', &" ".repeat(TAB_WIDTH));
        out.push_str(expanded.trim_end_matches(' '));
    }
    out
}

pub fn normalize_bytes(raw: &[u8]) -> Result<String, TextError> {
    let s = std::str::from_utf8(raw).map_err(|e| TextError::NotUtf8(e.valid_up_to()))?;
    Ok(normalize_text(s))
}

/// Where book texts come from.
pub trait TextSource {
    /// Normalized text of `book`.
    fn load(&self, book: &BookRecord) -> Result<String, TextError>;
}

impl<F> TextSource for F
where
    F: Fn(&BookRecord) -> Result<String, TextError>,
{
    fn load(&self, book: &BookRecord) -> Result<String, TextError> {
        self(book)
    }
}

/// Loads texts from disk, resolving relative paths against `root`.
#[derive(Debug, Clone)]
pub struct FsTextSource {
    root: PathBuf,
}

impl FsTextSource {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        FsTextSource { root: root.into() }
    }

    pub fn resolve(&self, uri: &str) -> Result<PathBuf, TextError> {
        if uri.starts_with("file:") {
            let url = url::Url::parse(uri).map_err(|_| TextError::Unsupported(uri.to_string()))?;
            return url.to_file_path().map_err(|_| TextError::Unsupported(uri.to_string()));
        }
        if uri.starts_with("http://") || uri.starts_with("https://") {
            return Err(TextError::Unsupported(uri.to_string()));
        }
        Ok(self.root.join(uri))
    }
}

impl TextSource for FsTextSource {
    fn load(&self, book: &BookRecord) -> Result<String, TextError> {
        let path = self.resolve(&book.text_uri)?;
        let bytes = std::fs::read(&path).map_err(|source| TextError::Io { path: path.clone(), source })?;
        normalize_bytes(&bytes)
    }
}

impl Catalog {
    /// Load every text, fill `text_length`, and return the texts in book order.
    pub fn load_texts(&mut self, source: &dyn TextSource) -> Result<Vec<String>, TextError> {
        let mut texts = Vec::with_capacity(self.books.len());
        for b in &mut self.books {
            let text = source.load(b)?;
            b.text_length = text.chars().count();
            texts.push(text);
        }
        Ok(texts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "id,title,author,year,category,text_uri\n";

    fn book(id: &str, cat: &str) -> BookRecord {
        BookRecord {
            id: id.into(),
            title: format!("Title {id}"),
            author: "Anon".into(),
            year: 1900,
            category: cat.into(),
            text_uri: format!("texts/{id}.txt"),
            text_length: 0,
        }
    }

    #[test]
    fn csv_single_row() {
        let input = format!("{HEADER}pg100,Hamlet,William Shakespeare,1603,Harvard Classics,texts/pg100.txt\n");
        let c = parse_catalog(input.as_bytes(), CatalogFormat::Csv, "t.csv").unwrap();
        assert_eq!(c.books.len(), 1);
        assert_eq!(c.books[0].category, "Harvard Classics");
        let cats = group_by_category(&c).unwrap();
        assert_eq!(cats.len(), 1);
        assert_eq!(cats[0].name, "Harvard Classics");
    }

    #[test]
    fn csv_header_only() {
        let c = parse_catalog(HEADER.as_bytes(), CatalogFormat::Csv, "t.csv").unwrap();
        assert!(c.books.is_empty());
        assert!(matches!(group_by_category(&c), Err(CatalogError::NoCategories)));
    }

    #[test]
    fn csv_missing_category_reports_line() {
        let input = format!("{HEADER}a,A,X,1900,Poetry,a.txt\nb,B,Y,1901,,b.txt\n");
        let err = parse_catalog(input.as_bytes(), CatalogFormat::Csv, "t.csv").unwrap_err();
        assert_eq!(err.to_string(), "line 3: category empty");
    }

    #[test]
    fn csv_bad_year_and_duplicate_id() {
        let input = format!("{HEADER}a,A,X,nineteen,Poetry,a.txt\n");
        let err = parse_catalog(input.as_bytes(), CatalogFormat::Csv, "t.csv").unwrap_err();
        assert_eq!(err.to_string(), "line 2: year not an integer");

        let input = format!("{HEADER}a,A,X,1900,Poetry,a.txt\na,B,Y,1901,Poetry,b.txt\n");
        let err = parse_catalog(input.as_bytes(), CatalogFormat::Csv, "t.csv").unwrap_err();
        assert!(matches!(err, CatalogError::DuplicateId(ref id) if id == "a"));
    }

    #[test]
    fn csv_first_category_wins_and_quotes() {
        let input = format!("{HEADER}a,\"Poems, Vol. 1\",X,1900,Poetry; Italy,a.txt\n");
        let c = parse_catalog(input.as_bytes(), CatalogFormat::Csv, "t.csv").unwrap();
        assert_eq!(c.books[0].title, "Poems, Vol. 1");
        assert_eq!(c.books[0].category, "Poetry");
    }

    #[test]
    fn jsonl_parsing() {
        let input = "{\"id\":\"a\",\"title\":\"A\",\"author\":\"X\",\"year\":1900,\"category\":[\"Italy\",\"Travel\"],\"text_uri\":\"a.txt\"}\n\n{\"id\":\"b\",\"title\":\"B\",\"author\":\"Y\",\"year\":1901,\"category\":\"Poetry\",\"text_uri\":\"b.txt\"}\n";
        let c = parse_catalog(input.as_bytes(), CatalogFormat::Jsonl, "t.jsonl").unwrap();
        assert_eq!(c.books.len(), 2);
        assert_eq!(c.books[0].category, "Italy");

        let bad = "{\"id\":\"a\",\"title\":\"A\",\"author\":\"X\",\"category\":\"P\",\"text_uri\":\"a\"}\n";
        let err = parse_catalog(bad.as_bytes(), CatalogFormat::Jsonl, "t.jsonl").unwrap_err();
        assert_eq!(err.to_string(), "line 1: year missing");
    }

    #[test]
    fn rejects_non_utf8() {
        let err = parse_catalog(&[0x69, 0x64, 0xff], CatalogFormat::Csv, "t").unwrap_err();
        assert!(matches!(err, CatalogError::NotUtf8(2)));
        assert!(normalize_bytes(&[0xc3]).is_err());
    }

    #[test]
    fn validation_findings() {
        let valid = Catalog { source_name: "t".into(), books: vec![book("a", "P"), book("b", "Q")] };
        assert!(validate_catalog(&valid).is_empty());

        let dup = Catalog { source_name: "t".into(), books: vec![book("pg1", "P"), book("pg1", "P")] };
        let report = validate_catalog(&dup);
        assert_eq!(report.findings.len(), 1);
        assert_eq!(report.findings[0].severity, Severity::Error);

        let mut zero = book("a", "P");
        zero.year = 0;
        let report = validate_catalog(&Catalog { source_name: "t".into(), books: vec![zero] });
        assert_eq!(report.findings.len(), 1);
        assert_eq!(report.findings[0].severity, Severity::Warning);
        assert!(!report.has_errors());
    }

    #[test]
    fn text_uri_forms() {
        assert!(check_text_uri("texts/a.txt").is_ok());
        assert!(check_text_uri("/abs/a.txt").is_ok());
        assert!(check_text_uri("C:\\books\\a.txt").is_ok());
        assert!(check_text_uri("https://www.gutenberg.org/ebooks/100.txt.utf-8").is_ok());
        assert!(check_text_uri("file:///tmp/a.txt").is_ok());
        assert!(check_text_uri("").is_err());
        assert!(check_text_uri(" a.txt").is_err());
        assert!(check_text_uri("ftp://host/a").is_err());
        assert!(check_text_uri("http://").is_err());
    }

    #[test]
    fn grouping_preserves_order() {
        let c =
            Catalog { source_name: "t".into(), books: vec![book("A", "cat1"), book("B", "cat2"), book("C", "cat1")] };
        let cats = group_by_category(&c).unwrap();
        let names: Vec<_> = cats.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["cat1", "cat2"]);
        let ids: Vec<_> = cats[0].books.iter().map(|b| b.id.as_str()).collect();
        assert_eq!(ids, ["A", "C"]);
        assert_eq!(cats[1].books[0].id, "B");
    }

    #[test]
    fn normalization_rules() {
        assert_eq!(normalize_text("a\r\nb"), "a\nb");
        assert_eq!(normalize_text(""), "");
        assert_eq!(normalize_text("x\t"), "x");
        assert_eq!(normalize_text("\tx  \ny\r"), "    x\ny\n");
        assert_eq!(normalize_text("  lead kept"), "  lead kept");
    }
}
