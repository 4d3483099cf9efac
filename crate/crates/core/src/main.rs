use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use expertquest::config::{CliConfig, ConfigError, PartialConfig};
use expertquest::eval::{self, RunConfig, RunSummary};
use expertquest::search::{ExpertFinder, LanguageList, SearchError, DEFAULT_SEARCH_COUNT, DEFAULT_TIMELINE_COUNT};
use expertquest::service::{self, SearchResponse, ServiceConfig};
use expertquest::sources::{encode_file_stem, BackendKind};
use expertquest::textpipe::{cosine_similarity, TextPipeline, DEFAULT_VECTOR_SIZE};
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

#[derive(Parser)]
#[command(
    name = "expertquest",
    version,
    about = "Find programming-language experts across microblog, code host and Linked Data"
)]
struct Cli {
    /// JSON config file with defaults for the global options.
    #[arg(long, env = "EXPERTQUEST_CONFIG", global = true)]
    config: Option<PathBuf>,
    #[arg(long, env = "EXPERTQUEST_BACKEND", global = true, value_enum)]
    backend: Option<Backend>,
    /// Fixture corpus directory (fixture backend).
    #[arg(long, env = "EXPERTQUEST_FIXTURES", global = true)]
    fixtures: Option<PathBuf>,
    /// Credentials JSON (live backend).
    #[arg(long, env = "EXPERTQUEST_CREDENTIALS", global = true)]
    credentials: Option<PathBuf>,
    /// Language list JSON; the shipped 53-language list by default.
    #[arg(long, env = "EXPERTQUEST_LANGUAGES", global = true)]
    languages: Option<PathBuf>,
    #[arg(long, env = "EXPERTQUEST_VECTOR_SIZE", global = true)]
    vector_size: Option<usize>,
    /// Candidates scored concurrently per search.
    #[arg(long, env = "EXPERTQUEST_PARALLELISM", global = true)]
    parallelism: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Backend {
    Live,
    Fixture,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(clap::Args, Clone, Copy)]
struct Counts {
    #[arg(long, env = "EXPERTQUEST_SEARCH_COUNT", default_value_t = DEFAULT_SEARCH_COUNT)]
    search_count: usize,
    #[arg(long, env = "EXPERTQUEST_TIMELINE_COUNT", default_value_t = DEFAULT_TIMELINE_COUNT)]
    timeline_count: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Search for experts in one language and print the ranked candidates.
    Search {
        language: String,
        #[command(flatten)]
        counts: Counts,
        #[arg(long, env = "EXPERTQUEST_FORMAT", value_enum, default_value = "table")]
        format: Format,
        /// Shorthand for --format json.
        #[arg(long)]
        json: bool,
    },
    /// Search every configured language and write one JSON file per language.
    Dump {
        #[arg(long, env = "EXPERTQUEST_OUT")]
        out: PathBuf,
        #[command(flatten)]
        counts: Counts,
    },
    /// Precision/recall sweep, or replay of recorded per-language counts.
    Eval {
        /// Comma-separated SEARCHxTIMELINE settings.
        #[arg(long, value_delimiter = ',', default_value = "10x5,30x15,50x25")]
        runs: Vec<RunConfig>,
        /// CSV of language,candidates,experts rows; one per run, in --runs order.
        #[arg(long)]
        replay: Vec<PathBuf>,
        #[arg(long, env = "EXPERTQUEST_OUT", default_value = "reports")]
        out: PathBuf,
    },
    /// Print the feature vector of a text file.
    Vectorize { file: PathBuf },
    /// Cosine similarity between two text files.
    Cosine {
        a: String,
        b: String,
        /// Treat the arguments as literal text instead of file paths.
        #[arg(long)]
        inline: bool,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long, env = "EXPERTQUEST_BIND", default_value = "127.0.0.1:8080")]
        bind: String,
        #[arg(long, env = "EXPERTQUEST_CORS_ORIGIN")]
        cors_origin: Option<String>,
        #[arg(long, env = "EXPERTQUEST_TIMEOUT_SECS", default_value_t = 300)]
        timeout_secs: u64,
    },
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::MissingFixtures | ConfigError::MissingCredentials | ConfigError::NotPositive(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.into()),
        }
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::InvalidArgument(msg) => Failure::Usage(msg),
            other => Failure::Runtime(other.into()),
        }
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_ansi(std::io::stderr().is_terminal())
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_env("EXPERTQUEST_LOG")
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn")),
        )
        .init();

    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn partial_configs(cli: &Cli) -> Result<(PartialConfig, PartialConfig), Failure> {
    let overrides = PartialConfig {
        backend: cli.backend.map(|b| match b {
            Backend::Live => BackendKind::Live,
            Backend::Fixture => BackendKind::Fixture,
        }),
        fixtures: cli.fixtures.clone(),
        credentials: cli.credentials.clone(),
        languages: cli.languages.clone(),
        vector_size: cli.vector_size,
        parallelism: cli.parallelism,
    };
    let file = match &cli.config {
        Some(path) => PartialConfig::load(path)?,
        None => PartialConfig::default(),
    };
    Ok((overrides, file))
}

fn resolve_config(cli: &Cli) -> Result<CliConfig, Failure> {
    let (overrides, file) = partial_configs(cli)?;
    Ok(CliConfig::resolve(overrides, file)?)
}

/// Vector size for the text-only commands, which need no backend.
fn text_vector_size(cli: &Cli) -> Result<usize, Failure> {
    let (overrides, file) = partial_configs(cli)?;
    Ok(overrides.or(file).vector_size.unwrap_or(DEFAULT_VECTOR_SIZE))
}

/// Language list for replaying recorded counts, which needs no backend.
fn replay_languages(cli: &Cli) -> Result<LanguageList, Failure> {
    let (overrides, file) = partial_configs(cli)?;
    match overrides.or(file).languages {
        Some(path) => LanguageList::load(&path).map_err(|e| Failure::Runtime(e.into())),
        None => Ok(LanguageList::builtin()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Vectorize { file } => return vectorize(file, text_vector_size(&cli)?),
        Command::Cosine { a, b, inline } => return cosine(a, b, *inline, text_vector_size(&cli)?),
        Command::Eval { runs, replay, out } if !replay.is_empty() => {
            return replay_runs(&replay_languages(&cli)?, runs, replay, out)
        }
        _ => {}
    }
    let config = resolve_config(&cli)?;
    match cli.command {
        Command::Search { language, counts, format, json } => {
            let format = if json { Format::Json } else { format };
            search(&config, &language, counts, format)
        }
        Command::Dump { out, counts } => dump(&config, &out, counts),
        Command::Eval { runs, out, .. } => evaluate(&config, &runs, &out),
        Command::Serve { bind, cors_origin, timeout_secs } => serve(&config, &bind, cors_origin, timeout_secs),
        Command::Vectorize { .. } | Command::Cosine { .. } => unreachable!(),
    }
}

fn check_counts(counts: Counts) -> Result<(), Failure> {
    if counts.search_count == 0 || counts.timeline_count == 0 {
        return Err(Failure::Usage("search and timeline counts must be at least 1".into()));
    }
    Ok(())
}

fn search(config: &CliConfig, language: &str, counts: Counts, format: Format) -> Result<(), Failure> {
    check_counts(counts)?;
    let finder = config.finder()?;
    let params = finder
        .params_for(language)?
        .with_counts(counts.search_count, counts.timeline_count)
        .with_vector_size(config.vector_size);
    let started = Instant::now();
    let ranked = finder.find_experts(&params)?;
    let response = SearchResponse::new(&params.language.display_name, started.elapsed(), &ranked);
    let mut stdout = std::io::stdout().lock();
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut stdout, &response).context("writing json")?;
            writeln!(stdout).context("writing json")?;
        }
        Format::Table => print_table(&mut stdout, &response).context("writing table")?,
    }
    Ok(())
}

fn print_table(out: &mut impl Write, response: &SearchResponse) -> std::io::Result<()> {
    let header = ["#", "Name", "Handle", "Bytes of code", "Code followers", "Mentions", "Microblog followers", "Links"];
    let rows: Vec<[String; 8]> = response
        .results
        .iter()
        .map(|r| {
            [
                r.rank.to_string(),
                r.display_name.clone(),
                r.handle.clone(),
                r.bytes_of_code.to_string(),
                r.github_followers.to_string(),
                format!("{}%", r.mentions_percent),
                r.twitter_followers.to_string(),
                format!("{} {}", r.microblog_profile_url, r.codehost_profile_url),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        cells.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
    };
    writeln!(out, "{}", line(&header.map(String::from)))?;
    for row in &rows {
        writeln!(out, "{}", line(row))?;
    }
    if rows.is_empty() {
        writeln!(out, "no experts found for {}", response.language)?;
    }
    Ok(())
}

fn dump(config: &CliConfig, out: &Path, counts: Counts) -> Result<(), Failure> {
    check_counts(counts)?;
    let finder = config.finder()?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut failed = Vec::new();
    for entry in finder.languages().entries() {
        let params = expertquest::SearchParams::new(entry.clone())
            .with_counts(counts.search_count, counts.timeline_count)
            .with_vector_size(config.vector_size);
        match finder.find_experts(&params) {
            Ok(found) => {
                let path = out.join(format!("{}.json", encode_file_stem(&entry.display_name)));
                let mut body = serde_json::to_string_pretty(&found).context("serializing candidates")?;
                body.push('\n');
                std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
            }
            Err(e) => {
                tracing::warn!(language = %entry.display_name, "search failed: {e}");
                failed.push(entry.display_name.clone());
            }
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(anyhow!("searches failed for: {}", failed.join(", ")).into())
    }
}

fn evaluate(config: &CliConfig, runs: &[RunConfig], out: &Path) -> Result<(), Failure> {
    let finder: ExpertFinder = config.finder()?;
    let summaries: Vec<_> = eval::run_sweep(&finder, runs, config.vector_size).into_iter().map(|r| r.summary).collect();
    report(&summaries, out)
}

fn replay_runs(languages: &LanguageList, runs: &[RunConfig], replay: &[PathBuf], out: &Path) -> Result<(), Failure> {
    if replay.len() != runs.len() {
        return Err(Failure::Usage(format!(
            "{} replay files but {} run configs; pass one --runs entry per --replay file",
            replay.len(),
            runs.len()
        )));
    }
    let mut summaries = Vec::new();
    for (path, run) in replay.iter().zip(runs) {
        let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let rows = eval::read_count_rows(file).with_context(|| format!("reading {}", path.display()))?;
        let summary = eval::replay_run(languages, &rows, run.search_count, run.timeline_count)
            .with_context(|| format!("replaying {}", path.display()))?;
        summaries.push(summary);
    }
    report(&summaries, out)
}

fn report(summaries: &[RunSummary], out: &Path) -> Result<(), Failure> {
    let mut stdout = std::io::stdout().lock();
    for summary in summaries {
        let (csv, json) = eval::write_reports(out, summary).context("writing reports")?;
        writeln!(
            stdout,
            "run {}x{}: avg_precision={:.9} avg_recall={:.9} avg_cosine={:.9} ({}, {})",
            summary.search_count,
            summary.timeline_count,
            summary.average_precision,
            summary.average_recall,
            summary.average_cosine,
            csv.display(),
            json.display()
        )
        .context("writing summary")?;
    }
    Ok(())
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(Failure::Runtime)
}

fn pipeline(size: usize) -> Result<TextPipeline, Failure> {
    TextPipeline::new(size).map_err(|e| Failure::Usage(e.to_string()))
}

fn vectorize(file: &Path, size: usize) -> Result<(), Failure> {
    let pipeline = pipeline(size)?;
    let text = read_text(file)?;
    let started = Instant::now();
    let vector = pipeline.vectorize(&text);
    let elapsed = started.elapsed();
    let counts: Vec<String> = vector.counts().iter().map(u32::to_string).collect();
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "size: {}", vector.size())
        .and_then(|_| writeln!(stdout, "tokens: {}", vector.total()))
        .and_then(|_| writeln!(stdout, "elapsed_ms: {:.3}", elapsed.as_secs_f64() * 1000.0))
        .and_then(|_| writeln!(stdout, "vector: {}", counts.join(" ")))
        .context("writing vector")?;
    Ok(())
}

fn cosine(a: &str, b: &str, inline: bool, size: usize) -> Result<(), Failure> {
    let pipeline = pipeline(size)?;
    let (text_a, text_b) =
        if inline { (a.to_string(), b.to_string()) } else { (read_text(Path::new(a))?, read_text(Path::new(b))?) };
    let va = pipeline.vectorize(&text_a);
    let vb = pipeline.vectorize(&text_b);
    let sim = cosine_similarity(&va, &vb).map_err(|e| Failure::Runtime(e.into()))?;
    println!("{:.6}", sim.value());
    Ok(())
}

fn serve(config: &CliConfig, bind: &str, cors_origin: Option<String>, timeout_secs: u64) -> Result<(), Failure> {
    let finder = Arc::new(config.finder()?);
    let service_config =
        ServiceConfig { vector_size: config.vector_size, timeout: Duration::from_secs(timeout_secs), cors_origin };
    let runtime = tokio::runtime::Runtime::new().context("starting runtime")?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(bind).await.with_context(|| format!("cannot bind {bind}"))?;
        let addr = listener.local_addr().context("reading bound address")?;
        eprintln!("listening on http://{addr} ({} backend)", config.backend);
        axum::serve(listener, service::router(finder, service_config))
            .with_graceful_shutdown(shutdown_signal())
            .await
            .context("server error")?;
        Ok::<_, anyhow::Error>(())
    })?;
    Ok(())
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}
