//! Offline backend reading a recorded corpus directory.
//!
//! Layout (all files UTF-8 JSON):
//!
//! ```text
//! searches/<percent-encoded query>.json      array of Post
//! timelines/<handle>.json                    array of Post, newest first
//! users/<handle>.json                        CodeHostUser
//! repos/<handle>.json                        array of {language: bytes}
//! abstracts/<percent-encoded resource>.json  Abstract
//! ```
//!
//! Handles in file names are lowercase. A query with no search file returns
//! no posts; a user with no repos file has no repositories.

use super::{
    check_count, Abstract, CodeHostSource, CodeHostUser, EncyclopediaSource, MicroblogSource, Post, RepoLanguageStats,
    SourceError, SourceResult,
};
use percent_encoding::percent_decode_str;
use serde::de::DeserializeOwned;
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("fixture directory {0} does not exist")]
    MissingDir(PathBuf),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid fixture {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("invalid fixture {path}: {reason}")]
    Invalid { path: PathBuf, reason: String },
}

/// Number of calls made against each operation.
#[derive(Debug, Default)]
pub struct CallCounts {
    pub search: AtomicUsize,
    pub timeline: AtomicUsize,
    pub user: AtomicUsize,
    pub repos: AtomicUsize,
    pub abstracts: AtomicUsize,
}

impl CallCounts {
    pub fn total(&self) -> usize {
        [&self.search, &self.timeline, &self.user, &self.repos, &self.abstracts]
            .iter()
            .map(|c| c.load(Ordering::SeqCst))
            .sum()
    }
}

/// An in-memory corpus. Read-only after [`FixtureCorpus::open`].
#[derive(Debug, Default)]
pub struct FixtureCorpus {
    searches: HashMap<String, Vec<Post>>,
    timelines: HashMap<String, Vec<Post>>,
    users: HashMap<String, CodeHostUser>,
    repos: HashMap<String, Vec<RepoLanguageStats>>,
    abstracts: HashMap<String, Abstract>,
    calls: CallCounts,
}

impl FixtureCorpus {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn open(dir: &Path) -> Result<Self, FixtureError> {
        if !dir.is_dir() {
            return Err(FixtureError::MissingDir(dir.to_path_buf()));
        }
        let mut corpus = FixtureCorpus::empty();
        for (stem, path) in json_files(&dir.join("searches"))? {
            let posts: Vec<Post> = read_json(&path)?;
            validate_posts(&path, &posts)?;
            corpus.searches.insert(decode(&stem), posts);
        }
        for (stem, path) in json_files(&dir.join("timelines"))? {
            let posts: Vec<Post> = read_json(&path)?;
            validate_posts(&path, &posts)?;
            corpus.timelines.insert(stem.to_lowercase(), posts);
        }
        for (stem, path) in json_files(&dir.join("users"))? {
            let user: CodeHostUser = read_json(&path)?;
            if user.handle.is_empty() {
                return Err(FixtureError::Invalid { path, reason: "empty handle".into() });
            }
            corpus.users.insert(stem.to_lowercase(), user);
        }
        for (stem, path) in json_files(&dir.join("repos"))? {
            corpus.repos.insert(stem.to_lowercase(), read_json(&path)?);
        }
        for (stem, path) in json_files(&dir.join("abstracts"))? {
            corpus.abstracts.insert(decode(&stem), read_json(&path)?);
        }
        Ok(corpus)
    }

    pub fn calls(&self) -> &CallCounts {
        &self.calls
    }
}

impl MicroblogSource for FixtureCorpus {
    fn search_posts(&self, query: &str, count: usize) -> SourceResult<Vec<Post>> {
        self.calls.search.fetch_add(1, Ordering::SeqCst);
        check_count(count)?;
        Ok(self.searches.get(query).map(|posts| posts.iter().take(count).cloned().collect()).unwrap_or_default())
    }

    fn get_timeline(&self, handle: &str, count: usize) -> SourceResult<Vec<Post>> {
        self.calls.timeline.fetch_add(1, Ordering::SeqCst);
        check_count(count)?;
        self.timelines
            .get(&handle.to_lowercase())
            .map(|posts| posts.iter().take(count).cloned().collect())
            .ok_or_else(|| SourceError::UserNotFound(handle.to_string()))
    }
}

impl CodeHostSource for FixtureCorpus {
    fn get_code_user(&self, handle: &str) -> SourceResult<Option<CodeHostUser>> {
        self.calls.user.fetch_add(1, Ordering::SeqCst);
        Ok(self.users.get(&handle.to_lowercase()).cloned())
    }

    fn get_repo_language_bytes(&self, handle: &str, language: &str) -> SourceResult<u64> {
        self.calls.repos.fetch_add(1, Ordering::SeqCst);
        let key = handle.to_lowercase();
        if !self.users.contains_key(&key) {
            return Err(SourceError::UserNotFound(handle.to_string()));
        }
        Ok(self.repos.get(&key).map(|repos| repos.iter().map(|r| r.bytes_for(language)).sum()).unwrap_or(0))
    }
}

impl EncyclopediaSource for FixtureCorpus {
    fn get_abstract(&self, resource_id: &str) -> SourceResult<Abstract> {
        self.calls.abstracts.fetch_add(1, Ordering::SeqCst);
        self.abstracts.get(resource_id).cloned().ok_or_else(|| SourceError::ResourceNotFound(resource_id.to_string()))
    }
}

fn decode(stem: &str) -> String {
    percent_decode_str(stem).decode_utf8_lossy().into_owned()
}

/// `(file stem, path)` for every `*.json` in `dir`, sorted by path. A missing
/// directory yields nothing.
fn json_files(dir: &Path) -> Result<Vec<(String, PathBuf)>, FixtureError> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let entries = std::fs::read_dir(dir).map_err(|source| FixtureError::Io { path: dir.to_path_buf(), source })?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|source| FixtureError::Io { path: dir.to_path_buf(), source })?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            files.push((stem.to_string(), path.clone()));
        }
    }
    files.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(files)
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, FixtureError> {
    let raw = std::fs::read_to_string(path).map_err(|source| FixtureError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&raw).map_err(|source| FixtureError::Parse { path: path.to_path_buf(), source })
}

fn validate_posts(path: &Path, posts: &[Post]) -> Result<(), FixtureError> {
    if posts.iter().any(|p| p.author_handle.is_empty()) {
        return Err(FixtureError::Invalid { path: path.to_path_buf(), reason: "post with empty author_handle".into() });
    }
    Ok(())
}
