//! Clients for the three external data sources.
//!
//! Each source is a trait so the orchestrator can run against either the live
//! HTTP backends ([`live`]) or a recorded fixture corpus ([`fixture`]). Both
//! backends share one error taxonomy, [`SourceError`].

pub mod clock;
pub mod credentials;
pub mod fixture;
pub mod live;

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use std::time::Duration;

pub use clock::{Clock, FakeClock, SystemClock};
pub use credentials::Credentials;
pub use fixture::FixtureCorpus;
pub use live::{LiveConfig, LiveSources};

/// One microblog post with the author fields the ranking needs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Post {
    pub author_handle: String,
    pub author_display_name: String,
    pub author_follower_count: u64,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeHostUser {
    pub handle: String,
    pub follower_count: u64,
    pub profile_url: String,
}

/// Bytes of code per language for one repository. Missing languages count as zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RepoLanguageStats(pub BTreeMap<String, u64>);

impl RepoLanguageStats {
    /// Bytes attributed to `language`, compared case-insensitively.
    pub fn bytes_for(&self, language: &str) -> u64 {
        self.0.iter().filter(|(name, _)| name.eq_ignore_ascii_case(language)).map(|(_, bytes)| *bytes).sum()
    }
}

/// Encyclopedia abstract. `text` is empty when the resource exists but has no abstract.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Abstract {
    pub resource_id: String,
    pub text: String,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum SourceError {
    #[error("backend unreachable: {0}")]
    Unreachable(String),
    #[error("rate limited{}", .retry_after.map(|d| format!(" (retry after {}s)", d.as_secs())).unwrap_or_default())]
    RateLimited { retry_after: Option<Duration> },
    #[error("authentication failed: {0}")]
    AuthFailure(String),
    #[error("user not found: {0}")]
    UserNotFound(String),
    #[error("resource not found: {0}")]
    ResourceNotFound(String),
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl SourceError {
    pub fn is_rate_limited(&self) -> bool {
        matches!(self, SourceError::RateLimited { .. })
    }
}

pub type SourceResult<T> = Result<T, SourceError>;

/// Microblog search and user timelines.
pub trait MicroblogSource: Send + Sync {
    /// At most `count` posts matching `query`, in backend order.
    fn search_posts(&self, query: &str, count: usize) -> SourceResult<Vec<Post>>;
    /// At most `count` of the user's posts, newest first.
    fn get_timeline(&self, handle: &str, count: usize) -> SourceResult<Vec<Post>>;
}

/// Code-host accounts and per-language repository statistics.
pub trait CodeHostSource: Send + Sync {
    /// `Ok(None)` when the account does not exist.
    fn get_code_user(&self, handle: &str) -> SourceResult<Option<CodeHostUser>>;
    /// Sum of bytes in `language` over all the user's repositories.
    fn get_repo_language_bytes(&self, handle: &str, language: &str) -> SourceResult<u64>;
}

/// Linked-Data encyclopedia abstracts.
pub trait EncyclopediaSource: Send + Sync {
    fn get_abstract(&self, resource_id: &str) -> SourceResult<Abstract>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Live,
    Fixture,
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackendKind::Live => "live",
            BackendKind::Fixture => "fixture",
        })
    }
}

/// The three sources the orchestrator talks to.
#[derive(Clone)]
pub struct Sources {
    pub microblog: Arc<dyn MicroblogSource>,
    pub code_host: Arc<dyn CodeHostSource>,
    pub encyclopedia: Arc<dyn EncyclopediaSource>,
    pub kind: BackendKind,
}

impl Sources {
    pub fn from_fixture(corpus: Arc<FixtureCorpus>) -> Self {
        Sources {
            microblog: corpus.clone(),
            code_host: corpus.clone(),
            encyclopedia: corpus,
            kind: BackendKind::Fixture,
        }
    }

    pub fn from_live(live: LiveSources) -> Self {
        Sources {
            microblog: Arc::new(live.twitter()),
            code_host: Arc::new(live.github()),
            encyclopedia: Arc::new(live.dbpedia()),
            kind: BackendKind::Live,
        }
    }
}

impl fmt::Debug for Sources {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Sources").field("kind", &self.kind).finish_non_exhaustive()
    }
}

/// Characters left alone when turning a query or resource into a file name:
/// the URL "unreserved" set.
const FILE_NAME_SAFE: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~');

/// Percent-encode a query or resource id for use as a fixture file stem.
pub fn encode_file_stem(raw: &str) -> String {
    utf8_percent_encode(raw, FILE_NAME_SAFE).to_string()
}

pub(crate) fn check_count(count: usize) -> SourceResult<()> {
    if count == 0 {
        Err(SourceError::InvalidArgument("count must be at least 1".into()))
    } else {
        Ok(())
    }
}
