//! The search workflow: query the microblog, keep authors who also have a
//! code-host account, compare each candidate's recent posts against the
//! language's encyclopedia abstract, and rank.

mod languages;

pub use languages::{LanguageConfigError, LanguageEntry, LanguageList, DEFAULT_LANGUAGES_JSON};

use crate::sources::{Abstract, CodeHostSource, CodeHostUser, Post, SourceError, Sources};
use crate::textpipe::{Similarity, TextPipeline, DEFAULT_VECTOR_SIZE};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::{Arc, Mutex};

pub const DEFAULT_SEARCH_COUNT: usize = 50;
pub const DEFAULT_TIMELINE_COUNT: usize = 25;
pub const DEFAULT_PARALLELISM: usize = 4;

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("search failed during {stage}: {source}")]
    SearchFailed { stage: &'static str, source: SourceError },
    #[error("candidate {handle}: {source}")]
    Candidate { handle: String, source: SourceError },
}

impl SearchError {
    /// The upstream error, if this failure came from a data source.
    pub fn source_error(&self) -> Option<&SourceError> {
        match self {
            SearchError::InvalidArgument(_) => None,
            SearchError::SearchFailed { source, .. } | SearchError::Candidate { source, .. } => Some(source),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchParams {
    pub language: LanguageEntry,
    /// Number of microblog search results to load.
    pub search_count: usize,
    /// Number of posts loaded from each candidate's timeline.
    pub timeline_count: usize,
    pub vector_size: usize,
}

impl SearchParams {
    pub fn new(language: LanguageEntry) -> Self {
        SearchParams {
            language,
            search_count: DEFAULT_SEARCH_COUNT,
            timeline_count: DEFAULT_TIMELINE_COUNT,
            vector_size: DEFAULT_VECTOR_SIZE,
        }
    }

    pub fn with_counts(mut self, search_count: usize, timeline_count: usize) -> Self {
        self.search_count = search_count;
        self.timeline_count = timeline_count;
        self
    }

    pub fn with_vector_size(mut self, vector_size: usize) -> Self {
        self.vector_size = vector_size;
        self
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.search_count == 0 || self.timeline_count == 0 {
            return Err(SearchError::InvalidArgument("search and timeline counts must be at least 1".into()));
        }
        if self.vector_size == 0 {
            return Err(SearchError::InvalidArgument("vector size must be at least 1".into()));
        }
        Ok(())
    }
}

/// One ranked expert candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateProfile {
    pub handle: String,
    pub display_name: String,
    pub twitter_followers: u64,
    pub github_followers: u64,
    /// Bytes of code in the queried language across all repositories.
    pub bytes_of_code: u64,
    /// Similarity between recent posts and the language abstract ("Twitter Mentions").
    pub cosine: Similarity,
    pub microblog_profile_url: String,
    pub codehost_profile_url: String,
}

impl CandidateProfile {
    pub fn mentions_percent(&self) -> u8 {
        self.cosine.percent()
    }
}

/// A search-result author who also has a code-host account.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchedCandidate {
    /// First post seen from this author in the search results.
    pub post: Post,
    pub code_user: CodeHostUser,
}

impl MatchedCandidate {
    pub fn handle(&self) -> &str {
        &self.code_user.handle
    }
}

/// `"<language> github"`; the suffix steers the search away from homonyms.
pub fn build_query(language: &LanguageEntry) -> String {
    format!("{} github", language.display_name)
}

/// Deduplicate authors case-insensitively (first seen wins) and keep those
/// with a code-host account.
pub fn match_handles(code_host: &dyn CodeHostSource, posts: &[Post]) -> Result<Vec<MatchedCandidate>, SearchError> {
    let mut seen = HashSet::new();
    let mut matched = Vec::new();
    for post in posts {
        if !seen.insert(post.author_handle.to_lowercase()) {
            continue;
        }
        let user = code_host
            .get_code_user(&post.author_handle)
            .map_err(|source| SearchError::SearchFailed { stage: "account matching", source })?;
        if let Some(code_user) = user {
            if code_user.handle.eq_ignore_ascii_case(&post.author_handle) {
                matched.push(MatchedCandidate { post: post.clone(), code_user });
            }
        }
    }
    Ok(matched)
}

/// Build the profile for one matched candidate against an already fetched abstract.
pub fn score_candidate(
    sources: &Sources,
    candidate: &MatchedCandidate,
    params: &SearchParams,
    abstract_: &Abstract,
) -> Result<CandidateProfile, SearchError> {
    let pipeline = TextPipeline::new(params.vector_size).map_err(|e| SearchError::InvalidArgument(e.to_string()))?;
    let microblog_handle = &candidate.post.author_handle;
    let fail = |source| SearchError::Candidate { handle: candidate.handle().to_string(), source };

    let timeline = sources.microblog.get_timeline(microblog_handle, params.timeline_count).map_err(fail)?;
    let bytes_of_code =
        sources.code_host.get_repo_language_bytes(candidate.handle(), &params.language.display_name).map_err(fail)?;

    let concatenated = timeline.iter().map(|p| p.text.as_str()).collect::<Vec<_>>().join(" ");
    let cosine = pipeline.similarity(&concatenated, &abstract_.text);

    Ok(CandidateProfile {
        handle: candidate.handle().to_string(),
        display_name: candidate.post.author_display_name.clone(),
        twitter_followers: candidate.post.author_follower_count,
        github_followers: candidate.code_user.follower_count,
        bytes_of_code,
        cosine,
        microblog_profile_url: format!("https://twitter.com/{microblog_handle}"),
        codehost_profile_url: candidate.code_user.profile_url.clone(),
    })
}

/// Best-first ordering: bytes of code, code-host followers, cosine, microblog
/// followers, all descending; then handle ascending.
pub fn rank_order(a: &CandidateProfile, b: &CandidateProfile) -> Ordering {
    b.bytes_of_code
        .cmp(&a.bytes_of_code)
        .then(b.github_followers.cmp(&a.github_followers))
        .then(b.cosine.value().total_cmp(&a.cosine.value()))
        .then(b.twitter_followers.cmp(&a.twitter_followers))
        .then_with(|| a.handle.cmp(&b.handle))
        .then_with(|| a.display_name.cmp(&b.display_name))
        .then_with(|| a.microblog_profile_url.cmp(&b.microblog_profile_url))
        .then_with(|| a.codehost_profile_url.cmp(&b.codehost_profile_url))
}

pub fn rank(mut candidates: Vec<CandidateProfile>) -> Vec<CandidateProfile> {
    candidates.sort_by(rank_order);
    candidates
}

/// Runs searches against a set of sources and a configured language list.
#[derive(Debug, Clone)]
pub struct ExpertFinder {
    sources: Sources,
    languages: Arc<LanguageList>,
    parallelism: usize,
}

impl ExpertFinder {
    pub fn new(sources: Sources, languages: LanguageList) -> Self {
        ExpertFinder { sources, languages: Arc::new(languages), parallelism: DEFAULT_PARALLELISM }
    }

    /// Maximum number of candidates scored concurrently (at least 1).
    pub fn with_parallelism(mut self, parallelism: usize) -> Self {
        self.parallelism = parallelism.max(1);
        self
    }

    pub fn languages(&self) -> &LanguageList {
        &self.languages
    }

    pub fn sources(&self) -> &Sources {
        &self.sources
    }

    pub fn parallelism(&self) -> usize {
        self.parallelism
    }

    /// Parameters for a configured language, by display name.
    pub fn params_for(&self, language: &str) -> Result<SearchParams, SearchError> {
        self.languages
            .find(language)
            .cloned()
            .map(SearchParams::new)
            .ok_or_else(|| SearchError::InvalidArgument(format!("unknown language {language:?}")))
    }

    pub fn find_experts(&self, params: &SearchParams) -> Result<Vec<CandidateProfile>, SearchError> {
        params.validate()?;
        if !self.languages.contains(&params.language) {
            return Err(SearchError::InvalidArgument(format!("unknown language {:?}", params.language.display_name)));
        }

        let posts = self
            .sources
            .microblog
            .search_posts(&build_query(&params.language), params.search_count)
            .map_err(|source| SearchError::SearchFailed { stage: "microblog search", source })?;
        let matched = match_handles(self.sources.code_host.as_ref(), &posts)?;
        if matched.is_empty() {
            return Ok(Vec::new());
        }

        let abstract_ = self
            .sources
            .encyclopedia
            .get_abstract(&params.language.resource_id)
            .map_err(|source| SearchError::SearchFailed { stage: "abstract fetch", source })?;

        let scored = self.score_all(&matched, params, &abstract_);
        let profiles = scored
            .into_iter()
            .filter_map(|r| match r {
                Ok(p) => Some(p),
                Err(e) => {
                    tracing::warn!("dropping candidate: {e}");
                    None
                }
            })
            .collect();
        Ok(rank(profiles))
    }

    fn score_all(
        &self,
        matched: &[MatchedCandidate],
        params: &SearchParams,
        abstract_: &Abstract,
    ) -> Vec<Result<CandidateProfile, SearchError>> {
        let workers = self.parallelism.min(matched.len());
        if workers <= 1 {
            return matched.iter().map(|c| score_candidate(&self.sources, c, params, abstract_)).collect();
        }
        let next = AtomicUsize::new(0);
        let results: Mutex<Vec<Option<Result<CandidateProfile, SearchError>>>> =
            Mutex::new((0..matched.len()).map(|_| None).collect());
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, AtomicOrdering::SeqCst);
                    let Some(candidate) = matched.get(i) else { break };
                    let r = score_candidate(&self.sources, candidate, params, abstract_);
                    results.lock().unwrap()[i] = Some(r);
                });
            }
        });
        results.into_inner().unwrap().into_iter().map(|r| r.expect("every candidate scored")).collect()
    }
}
