//! The `libraria` command: generate, validate, stats and serve.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use libraria_core::catalog::{parse_catalog, validate_catalog, FsTextSource, Severity};
use libraria_core::context::{CompletionBackend, ContextCache, DirCache, HttpBackend, MemoryCache, MockBackend};
use libraria_core::error::WorldError;
use libraria_core::world::{export_world, WorldFile};
use libraria_core::{generate_world, Catalog, CatalogFormat, GenParams};
use libraria_server::{load_texts, AppState, ServerConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "libraria", version, about = "Generate and serve walkable digital library worlds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a world file from a catalog.
    Generate(GenerateArgs),
    /// Check a catalog and report findings.
    Validate(ValidateArgs),
    /// Print per-room statistics of a world file.
    Stats(StatsArgs),
    /// Serve a world file over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Catalog file (.csv or .jsonl).
    #[arg(long)]
    pub catalog: PathBuf,
    /// Output world file.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Catalog format; guessed from the extension when omitted.
    #[arg(long)]
    pub format: Option<String>,
    /// Directory that relative text paths resolve against; defaults to the catalog's directory.
    #[arg(long)]
    pub texts_root: Option<PathBuf>,
    /// key=value file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub params: ParamFlags,
}

#[derive(Debug, Args, Default)]
pub struct ParamFlags {
    #[arg(long)]
    pub shelf_rows: Option<u32>,
    #[arg(long)]
    pub slots_per_row: Option<u32>,
    #[arg(long)]
    pub unit_width: Option<f64>,
    #[arg(long)]
    pub shelf_depth: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub corridor_width: Option<f64>,
    #[arg(long)]
    pub wall_margin: Option<f64>,
    #[arg(long)]
    pub min_room_length: Option<f64>,
    #[arg(long)]
    pub room_height: Option<f64>,
    #[arg(long)]
    pub door_width: Option<f64>,
    /// Turn the spiral counter-clockwise.
    #[arg(long)]
    pub ccw: bool,
    /// Skip inward compression.
    #[arg(long)]
    pub no_compression: bool,
    #[arg(long)]
    pub jitter: Option<f64>,
    #[arg(long)]
    pub chars_per_page: Option<usize>,
}

impl ParamFlags {
    fn apply(&self, p: &mut GenParams) {
        macro_rules! set {
            ($flag:ident => $field:ident) => {
                if let Some(v) = self.$flag {
                    p.$field = v;
                }
            };
        }
        set!(shelf_rows => shelf_rows);
        set!(slots_per_row => slots_per_row);
        set!(unit_width => unit_width_m);
        set!(shelf_depth => shelf_depth_m);
        set!(corridor_width => corridor_width_m);
        set!(wall_margin => wall_margin_m);
        set!(min_room_length => min_room_length_m);
        set!(room_height => room_height_m);
        set!(door_width => door_width_m);
        set!(jitter => placement_jitter_m);
        set!(chars_per_page => chars_per_page);
        if self.ccw {
            p.ccw = true;
        }
        if self.no_compression {
            p.compression = false;
        }
    }
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub catalog: PathBuf,
    #[arg(long)]
    pub format: Option<String>,
    /// Also load every text and report the ones that fail.
    #[arg(long)]
    pub check_texts: bool,
    #[arg(long)]
    pub texts_root: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub world: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub world: PathBuf,
    /// Directory that relative text paths resolve against.
    #[arg(long, default_value = ".")]
    pub texts_root: PathBuf,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long)]
    pub port: Option<u16>,
    #[arg(long)]
    pub chars_per_page: Option<usize>,
    /// mock or http.
    #[arg(long)]
    pub context_backend: Option<String>,
    /// Completion endpoint for the http backend.
    #[arg(long)]
    pub context_url: Option<String>,
    /// Persist context results here instead of in memory.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub cors_origin: Option<String>,
    /// key=value file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }

    fn internal(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INTERNAL, message: message.into() }
    }
}

type Outcome = Result<(), Failure>;

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Generate(a) => run_generate(&a),
        Command::Validate(a) => run_validate(&a),
        Command::Stats(a) => run_stats(&a),
        Command::Serve(a) => run_serve(&a),
    }
}

fn read(path: &Path, what: &str) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::input(format!("cannot read {what} {}: {e}", path.display())))
}

fn load_catalog(path: &Path, format: Option<&str>) -> Result<Catalog, Failure> {
    let format = match format {
        Some(f) => f.parse(),
        None => CatalogFormat::from_path(path),
    }
    .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let bytes = read(path, "catalog")?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    parse_catalog(&bytes, format, &name).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn parent_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

/// Settings from an optional key=value file. Parameter keys land in
/// `params`; the rest come back for the caller.
fn load_config(path: Option<&Path>, params: &mut GenParams) -> Result<Vec<(String, String)>, Failure> {
    let Some(path) = path else {
        return Ok(Vec::new());
    };
    let bytes = read(path, "config")?;
    let text = String::from_utf8(bytes).map_err(|_| Failure::input(format!("{}: not UTF-8", path.display())))?;
    params.apply_config(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn world_failure(e: WorldError) -> Failure {
    match e {
        WorldError::Catalog(_) | WorldError::Params(_) | WorldError::Text(_) => Failure::input(e.to_string()),
        other => Failure::internal(other.to_string()),
    }
}

/// Write `bytes` to `out` through a temp file in the same directory, so a
/// failure never leaves a partial file behind.
fn write_atomically(out: &Path, bytes: &[u8]) -> Outcome {
    let dir = parent_dir(out);
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)
        .map_err(|e| Failure::input(format!("cannot write into {}: {e}", dir.display())))?;
    tmp.write_all(bytes).map_err(|e| Failure::input(format!("cannot write {}: {e}", out.display())))?;
    tmp.persist(out).map_err(|e| Failure::input(format!("cannot write {}: {}", out.display(), e.error)))?;
    Ok(())
}

pub fn run_generate(a: &GenerateArgs) -> Outcome {
    let mut params = GenParams::default();
    let mut seed = 0;
    for (k, v) in load_config(a.config.as_deref(), &mut params)? {
        match k.as_str() {
            "seed" => seed = v.parse().map_err(|_| Failure::input(format!("config: invalid seed {v:?}")))?,
            _ => return Err(Failure::input(format!("config: unknown key {k:?}"))),
        }
    }
    a.params.apply(&mut params);
    if let Some(s) = a.seed {
        seed = s;
    }
    params.validate().map_err(|e| Failure::input(format!("invalid parameters: {e}")))?;
    let mut catalog = load_catalog(&a.catalog, a.format.as_deref())?;
    let root = a.texts_root.clone().unwrap_or_else(|| parent_dir(&a.catalog));
    let texts = catalog.load_texts(&FsTextSource::new(&root)).map_err(|e| Failure::input(e.to_string()))?;
    let world = generate_world(&catalog, &texts, &params, seed).map_err(world_failure)?;
    let bytes = export_world(&world).map_err(world_failure)?;
    write_atomically(&a.out, &bytes)?;
    println!(
        "rooms={} connections={} books={} bbox_area_m2={:.2}",
        world.layout.rooms.len(),
        world.layout.connections.len(),
        world.catalog.books.len(),
        world.layout.bbox.area()
    );
    Ok(())
}

pub fn run_validate(a: &ValidateArgs) -> Outcome {
    let mut catalog = load_catalog(&a.catalog, a.format.as_deref())?;
    let report = validate_catalog(&catalog);
    for f in &report.findings {
        let level = match f.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        eprintln!("{level}: book {:?}: {}", f.book_id, f.message);
    }
    let mut text_errors = 0;
    if a.check_texts {
        let source = FsTextSource::new(a.texts_root.clone().unwrap_or_else(|| parent_dir(&a.catalog)));
        for b in &mut catalog.books {
            use libraria_core::catalog::TextSource;
            if let Err(e) = source.load(b) {
                eprintln!("error: book {:?}: {e}", b.id);
                text_errors += 1;
            }
        }
    }
    let errors = report.errors().count() + text_errors;
    let mut categories: Vec<&str> = catalog.books.iter().map(|b| b.category.as_str()).collect();
    categories.sort_unstable();
    categories.dedup();
    println!(
        "books={} categories={} errors={} warnings={}",
        catalog.books.len(),
        categories.len(),
        errors,
        report.findings.len() - report.errors().count()
    );
    if errors > 0 {
        return Err(Failure::input(format!("{} has {errors} error(s)", a.catalog.display())));
    }
    Ok(())
}

fn load_world(path: &Path) -> Result<WorldFile, Failure> {
    let bytes = read(path, "world")?;
    WorldFile::from_bytes(&bytes).map_err(|e| {
        let code = match e {
            WorldError::Json(_) | WorldError::UnsupportedVersion(_) => EXIT_INPUT,
            _ => EXIT_INTERNAL,
        };
        Failure { code, message: format!("{}: {e}", path.display()) }
    })
}

/// Tab-separated per-room table, then totals and the bbox fill ratio.
pub fn stats_table(world: &WorldFile) -> String {
    let layout = &world.layout;
    let mut out = String::from("room\tcategory\tbooks\tarea_m2\tdegree\n");
    let mut area = 0.0;
    let mut books = 0;
    for r in &layout.rooms {
        let a = r.area();
        area += a;
        books += r.book_count();
        out.push_str(&format!("{}\t{}\t{}\t{:.2}\t{}\n", r.id, r.category, r.book_count(), a, layout.degree(r.id)));
    }
    out.push_str(&format!(
        "total\t{} rooms\t{books}\t{area:.2}\t{} connections\n",
        layout.rooms.len(),
        layout.connections.len()
    ));
    let bbox = layout.bbox.area();
    out.push_str(&format!("bbox_area_m2\t{bbox:.2}\n"));
    out.push_str(&format!("fill_ratio\t{:.4}\n", area / bbox));
    out
}

pub fn run_stats(a: &StatsArgs) -> Outcome {
    let world = load_world(&a.world)?;
    print!("{}", stats_table(&world));
    Ok(())
}

pub const DEFAULT_PORT: u16 = 8080;

struct ServeSettings {
    port: u16,
    backend: String,
    url: Option<String>,
    cache_dir: Option<PathBuf>,
}

pub fn run_serve(a: &ServeArgs) -> Outcome {
    let mut s = ServeSettings { port: DEFAULT_PORT, backend: "mock".into(), url: None, cache_dir: None };
    let mut file_params = GenParams::default();
    for (k, v) in load_config(a.config.as_deref(), &mut file_params)? {
        match k.as_str() {
            "port" => s.port = v.parse().map_err(|_| Failure::input(format!("config: invalid port {v:?}")))?,
            "context_backend" => s.backend = v,
            "context_url" => s.url = Some(v),
            "cache_dir" => s.cache_dir = Some(v.into()),
            "template_version" if v == libraria_core::context::TEMPLATE_VERSION.to_string() => {}
            "template_version" => return Err(Failure::input(format!("config: template_version {v} is not supported"))),
            _ => return Err(Failure::input(format!("config: unknown key {k:?}"))),
        }
    }
    if let Some(p) = a.port {
        s.port = p;
    }
    if let Some(b) = &a.context_backend {
        s.backend = b.clone();
    }
    if let Some(u) = &a.context_url {
        s.url = Some(u.clone());
    }
    if let Some(d) = &a.cache_dir {
        s.cache_dir = Some(d.clone());
    }
    let backend: Arc<dyn CompletionBackend> = match s.backend.as_str() {
        "mock" => Arc::new(MockBackend::new()),
        "http" => {
            let url = s.url.ok_or_else(|| Failure::input("the http context backend needs --context-url"))?;
            let mut b = HttpBackend::from_env(url.clone());
            if std::env::var(libraria_core::context::TOKEN_ENV).is_err() {
                log::warn!("{} is not set; calling {url} without a token", libraria_core::context::TOKEN_ENV);
                b = HttpBackend::new(url, None, Duration::from_secs(30));
            }
            Arc::new(b)
        }
        other => return Err(Failure::input(format!("unknown context backend {other:?} (expected mock or http)"))),
    };
    let cache: Arc<dyn ContextCache> = match &s.cache_dir {
        Some(d) => Arc::new(DirCache::new(d).map_err(|e| Failure::input(format!("cache dir {}: {e}", d.display())))?),
        None => Arc::new(MemoryCache::new()),
    };
    let world = load_world(&a.world)?;
    let texts = load_texts(&world, &a.texts_root).map_err(|e| Failure::input(e.to_string()))?;
    let from_file = Some(file_params.chars_per_page).filter(|&c| c != GenParams::default().chars_per_page);
    let config = ServerConfig {
        chars_per_page: a.chars_per_page.or(from_file),
        backend,
        cache,
        cors_origin: a.cors_origin.clone(),
    };
    let state = Arc::new(AppState::new(world, texts, config).map_err(|e| Failure::input(e.to_string()))?);
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Failure::internal(format!("cannot start runtime: {e}")))?;
    rt.block_on(async move {
        let addr = format!("{}:{}", a.host, s.port);
        let listener = tokio::net::TcpListener::bind(&addr)
            .await
            .map_err(|e| Failure::input(format!("cannot listen on {addr}: {e}")))?;
        let local = listener.local_addr().map_err(|e| Failure::internal(e.to_string()))?;
        log::info!("serving {} rooms and {} books", state.room_count(), state.book_count());
        // Scripts read the bound address from here, which matters with --port 0.
        println!("listening on http://{local}");
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        libraria_server::serve(listener, state, shutdown).await.map_err(|e| Failure::internal(e.to_string()))
    })
}
