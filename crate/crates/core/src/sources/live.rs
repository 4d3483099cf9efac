//! HTTPS+JSON clients for the microblog, code-host and Linked-Data services.
//!
//! All three share one [`HttpTransport`], which owns the retry policy and the
//! per-host rate-limit state. Time is read through a [`Clock`] so backoff and
//! rate-limit waits can be checked with a fake clock.

use super::credentials::Credentials;
use super::{
    check_count, Abstract, Clock, CodeHostSource, CodeHostUser, EncyclopediaSource, MicroblogSource, Post,
    RepoLanguageStats, SourceError, SourceResult,
};
use base64::Engine;
use reqwest::blocking::{Client, RequestBuilder};
use reqwest::header::{HeaderMap, RETRY_AFTER};
use serde::Deserialize;
use serde_json::Value;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Duration;
use url::Url;

pub const DEFAULT_TWITTER_URL: &str = "https://api.twitter.com";
pub const DEFAULT_GITHUB_URL: &str = "https://api.github.com";
pub const DEFAULT_DBPEDIA_URL: &str = "https://dbpedia.org";

const USER_AGENT: &str = concat!("expertquest/", env!("CARGO_PKG_VERSION"));
const ABSTRACT_PREDICATE: &str = "http://dbpedia.org/ontology/abstract";

#[derive(Debug, Clone)]
pub struct LiveConfig {
    pub twitter_url: Url,
    pub github_url: Url,
    pub dbpedia_url: Url,
    pub twitter_bearer: Option<String>,
    pub twitter_consumer: Option<(String, String)>,
    pub github_token: Option<String>,
    /// Per-request timeout.
    pub timeout: Duration,
    /// Retries after the first attempt.
    pub max_retries: u32,
    /// First backoff delay; doubled on each retry.
    pub backoff: Duration,
    /// Rate-limit waits longer than this fail immediately instead of sleeping.
    pub max_rate_limit_wait: Duration,
}

impl Default for LiveConfig {
    fn default() -> Self {
        LiveConfig {
            twitter_url: Url::parse(DEFAULT_TWITTER_URL).unwrap(),
            github_url: Url::parse(DEFAULT_GITHUB_URL).unwrap(),
            dbpedia_url: Url::parse(DEFAULT_DBPEDIA_URL).unwrap(),
            twitter_bearer: None,
            twitter_consumer: None,
            github_token: None,
            timeout: Duration::from_secs(30),
            max_retries: 3,
            backoff: Duration::from_secs(1),
            max_rate_limit_wait: Duration::from_secs(60),
        }
    }
}

impl LiveConfig {
    pub fn from_credentials(creds: &Credentials) -> Result<Self, SourceError> {
        let parse = |raw: &Option<String>, default: &str| {
            Url::parse(raw.as_deref().unwrap_or(default))
                .map_err(|e| SourceError::InvalidArgument(format!("bad base url: {e}")))
        };
        let t = &creds.twitter;
        Ok(LiveConfig {
            twitter_url: parse(&t.base_url, DEFAULT_TWITTER_URL)?,
            github_url: parse(&creds.github.base_url, DEFAULT_GITHUB_URL)?,
            dbpedia_url: parse(&creds.dbpedia.base_url, DEFAULT_DBPEDIA_URL)?,
            twitter_bearer: t.bearer_token.clone(),
            twitter_consumer: t.consumer_key.clone().zip(t.consumer_secret.clone()),
            github_token: creds.github.token.clone(),
            ..LiveConfig::default()
        })
    }
}

struct Response {
    status: u16,
    body: String,
}

impl Response {
    fn json<T: for<'de> Deserialize<'de>>(&self) -> SourceResult<T> {
        serde_json::from_str(&self.body).map_err(|e| SourceError::MalformedDocument(e.to_string()))
    }
}

/// Blocking HTTP client with retries and per-host rate-limit discipline.
pub struct HttpTransport {
    client: Client,
    clock: Arc<dyn Clock>,
    max_retries: u32,
    backoff: Duration,
    max_rate_limit_wait: Duration,
    /// host -> clock time before which no request may be sent.
    blocked_until: Mutex<HashMap<String, Duration>>,
}

impl HttpTransport {
    pub fn new(config: &LiveConfig, clock: Arc<dyn Clock>) -> SourceResult<Self> {
        let client = Client::builder()
            .timeout(config.timeout)
            .user_agent(USER_AGENT)
            .build()
            .map_err(|e| SourceError::Unreachable(e.to_string()))?;
        Ok(HttpTransport {
            client,
            clock,
            max_retries: config.max_retries,
            backoff: config.backoff,
            max_rate_limit_wait: config.max_rate_limit_wait,
            blocked_until: Mutex::new(HashMap::new()),
        })
    }

    fn host_key(url: &Url) -> String {
        format!("{}:{}", url.host_str().unwrap_or(""), url.port_or_known_default().unwrap_or(0))
    }

    fn backoff_for(&self, attempt: u32) -> Duration {
        self.backoff * 2u32.saturating_pow(attempt)
    }

    /// Sleep until the host may be contacted again, or fail if that is too far off.
    fn wait_for_host(&self, host: &str) -> SourceResult<()> {
        let until = self.blocked_until.lock().unwrap().get(host).copied();
        if let Some(until) = until {
            let now = self.clock.now();
            if until > now {
                let wait = until - now;
                if wait > self.max_rate_limit_wait {
                    return Err(SourceError::RateLimited { retry_after: Some(wait) });
                }
                self.clock.sleep(wait);
            }
        }
        Ok(())
    }

    fn block_host(&self, host: &str, wait: Duration) {
        let until = self.clock.now() + wait;
        let mut blocked = self.blocked_until.lock().unwrap();
        let entry = blocked.entry(host.to_string()).or_insert(until);
        if *entry < until {
            *entry = until;
        }
    }

    /// Send the request built by `build`, retrying transport failures, 5xx
    /// responses and rate limits. 401 is returned as [`SourceError::AuthFailure`];
    /// every other status is handed back to the caller.
    fn send(&self, url: &Url, build: impl Fn(&Client) -> RequestBuilder) -> SourceResult<Response> {
        let host = Self::host_key(url);
        let mut attempt = 0;
        loop {
            self.wait_for_host(&host)?;
            let retries_left = attempt < self.max_retries;
            match build(&self.client).send() {
                Err(err) => {
                    if !retries_left {
                        return Err(SourceError::Unreachable(err.to_string()));
                    }
                    tracing::debug!(%url, attempt, "transport error, retrying: {err}");
                    self.clock.sleep(self.backoff_for(attempt));
                }
                Ok(resp) => {
                    let status = resp.status().as_u16();
                    let headers = resp.headers().clone();
                    if is_rate_limited(status, &headers) {
                        let retry_after = retry_after(&headers);
                        self.block_host(&host, retry_after.unwrap_or_else(|| self.backoff_for(attempt)));
                        if !retries_left {
                            return Err(SourceError::RateLimited { retry_after });
                        }
                        tracing::debug!(%url, attempt, ?retry_after, "rate limited, waiting");
                    } else if status == 401 {
                        return Err(SourceError::AuthFailure(format!("HTTP 401 from {host}")));
                    } else if (500..600).contains(&status) {
                        if !retries_left {
                            return Err(SourceError::Unreachable(format!("HTTP {status} from {host}")));
                        }
                        self.clock.sleep(self.backoff_for(attempt));
                    } else {
                        let body = resp.text().map_err(|e| SourceError::Unreachable(e.to_string()))?;
                        return Ok(Response { status, body });
                    }
                }
            }
            attempt += 1;
        }
    }

    fn get(&self, url: Url, auth: Option<&str>, extra: &[(&str, &str)]) -> SourceResult<Response> {
        self.send(&url, |client| {
            let mut req = client.get(url.clone());
            if let Some(token) = auth {
                req = req.bearer_auth(token);
            }
            for (k, v) in extra {
                req = req.header(*k, *v);
            }
            req
        })
    }
}

fn is_rate_limited(status: u16, headers: &HeaderMap) -> bool {
    status == 429 || (status == 403 && headers.get("x-ratelimit-remaining").and_then(|v| v.to_str().ok()) == Some("0"))
}

fn retry_after(headers: &HeaderMap) -> Option<Duration> {
    headers
        .get(RETRY_AFTER)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.trim().parse::<u64>().ok())
        .map(Duration::from_secs)
}

fn unexpected(resp: &Response, what: &str) -> SourceError {
    SourceError::Unreachable(format!("unexpected HTTP {} for {what}", resp.status))
}

fn endpoint(base: &Url, segments: &[&str]) -> Url {
    let mut url = base.clone();
    url.path_segments_mut().expect("base url cannot be a base").pop_if_empty().extend(segments);
    url
}

/// Shared state behind the three live clients.
pub struct LiveSources {
    config: LiveConfig,
    http: Arc<HttpTransport>,
    twitter_token: Arc<Mutex<Option<String>>>,
}

impl LiveSources {
    pub fn new(config: LiveConfig, clock: Arc<dyn Clock>) -> SourceResult<Self> {
        let http = Arc::new(HttpTransport::new(&config, clock)?);
        let twitter_token = Arc::new(Mutex::new(config.twitter_bearer.clone()));
        Ok(LiveSources { config, http, twitter_token })
    }

    pub fn twitter(&self) -> TwitterClient {
        TwitterClient {
            base: self.config.twitter_url.clone(),
            consumer: self.config.twitter_consumer.clone(),
            token: self.twitter_token.clone(),
            http: self.http.clone(),
        }
    }

    pub fn github(&self) -> GithubClient {
        GithubClient {
            base: self.config.github_url.clone(),
            token: self.config.github_token.clone(),
            http: self.http.clone(),
        }
    }

    pub fn dbpedia(&self) -> DbpediaClient {
        DbpediaClient { base: self.config.dbpedia_url.clone(), http: self.http.clone() }
    }
}

// ---------------------------------------------------------------------------
// Microblog

pub struct TwitterClient {
    base: Url,
    consumer: Option<(String, String)>,
    token: Arc<Mutex<Option<String>>>,
    http: Arc<HttpTransport>,
}

#[derive(Deserialize)]
struct Tweet {
    #[serde(alias = "full_text")]
    text: String,
    user: TweetUser,
}

#[derive(Deserialize)]
struct TweetUser {
    screen_name: String,
    #[serde(default)]
    name: String,
    #[serde(default)]
    followers_count: u64,
}

#[derive(Deserialize)]
struct SearchEnvelope {
    statuses: Vec<Tweet>,
}

#[derive(Deserialize)]
struct TokenResponse {
    access_token: String,
}

impl From<Tweet> for Post {
    fn from(t: Tweet) -> Self {
        Post {
            author_handle: t.user.screen_name,
            author_display_name: t.user.name,
            author_follower_count: t.user.followers_count,
            text: t.text,
        }
    }
}

impl TwitterClient {
    /// Static bearer token, or an application token obtained once from the
    /// consumer key and secret.
    fn bearer(&self) -> SourceResult<String> {
        let mut token = self.token.lock().unwrap();
        if let Some(t) = token.as_ref() {
            return Ok(t.clone());
        }
        let (key, secret) = self
            .consumer
            .as_ref()
            .ok_or_else(|| SourceError::AuthFailure("no twitter credentials configured".into()))?;
        let basic = base64::engine::general_purpose::STANDARD.encode(format!("{key}:{secret}"));
        let url = endpoint(&self.base, &["oauth2", "token"]);
        let resp = self.http.send(&url, |client| {
            client
                .post(url.clone())
                .header("Authorization", format!("Basic {basic}"))
                .header("Content-Type", "application/x-www-form-urlencoded;charset=UTF-8")
                .body("grant_type=client_credentials")
        })?;
        if resp.status != 200 {
            return Err(SourceError::AuthFailure(format!("token exchange returned HTTP {}", resp.status)));
        }
        let parsed: TokenResponse = resp.json()?;
        *token = Some(parsed.access_token.clone());
        Ok(parsed.access_token)
    }

    fn validate(posts: &[Post]) -> SourceResult<()> {
        if posts.iter().any(|p| p.author_handle.is_empty()) {
            return Err(SourceError::MalformedDocument("post without author handle".into()));
        }
        Ok(())
    }
}

impl MicroblogSource for TwitterClient {
    fn search_posts(&self, query: &str, count: usize) -> SourceResult<Vec<Post>> {
        check_count(count)?;
        let mut url = endpoint(&self.base, &["1.1", "search", "tweets.json"]);
        url.query_pairs_mut()
            .append_pair("q", query)
            .append_pair("count", &count.to_string())
            .append_pair("result_type", "recent");
        let token = self.bearer()?;
        let resp = self.http.get(url, Some(&token), &[])?;
        if resp.status != 200 {
            return Err(unexpected(&resp, "search"));
        }
        let env: SearchEnvelope = resp.json()?;
        let posts: Vec<Post> = env.statuses.into_iter().take(count).map(Post::from).collect();
        Self::validate(&posts)?;
        Ok(posts)
    }

    fn get_timeline(&self, handle: &str, count: usize) -> SourceResult<Vec<Post>> {
        check_count(count)?;
        let mut url = endpoint(&self.base, &["1.1", "statuses", "user_timeline.json"]);
        url.query_pairs_mut().append_pair("screen_name", handle).append_pair("count", &count.to_string());
        let token = self.bearer()?;
        let resp = self.http.get(url, Some(&token), &[])?;
        match resp.status {
            200 => {
                let tweets: Vec<Tweet> = resp.json()?;
                let posts: Vec<Post> = tweets.into_iter().take(count).map(Post::from).collect();
                Self::validate(&posts)?;
                Ok(posts)
            }
            404 => Err(SourceError::UserNotFound(handle.to_string())),
            _ => Err(unexpected(&resp, "timeline")),
        }
    }
}

// ---------------------------------------------------------------------------
// Code host

pub struct GithubClient {
    base: Url,
    token: Option<String>,
    http: Arc<HttpTransport>,
}

#[derive(Deserialize)]
struct GithubUser {
    login: String,
    #[serde(default)]
    followers: u64,
    #[serde(default)]
    html_url: String,
}

#[derive(Deserialize)]
struct GithubRepo {
    full_name: String,
}

const GITHUB_ACCEPT: (&str, &str) = ("Accept", "application/vnd.github+json");

impl GithubClient {
    fn get(&self, url: Url) -> SourceResult<Response> {
        self.http.get(url, self.token.as_deref(), &[GITHUB_ACCEPT])
    }
}

impl CodeHostSource for GithubClient {
    fn get_code_user(&self, handle: &str) -> SourceResult<Option<CodeHostUser>> {
        if handle.is_empty() {
            return Err(SourceError::InvalidArgument("empty handle".into()));
        }
        let resp = self.get(endpoint(&self.base, &["users", handle]))?;
        match resp.status {
            200 => {
                let user: GithubUser = resp.json()?;
                let profile_url =
                    if user.html_url.is_empty() { format!("https://github.com/{}", user.login) } else { user.html_url };
                Ok(Some(CodeHostUser { handle: user.login, follower_count: user.followers, profile_url }))
            }
            404 => Ok(None),
            403 => Err(SourceError::AuthFailure("HTTP 403 from code host".into())),
            _ => Err(unexpected(&resp, "user")),
        }
    }

    fn get_repo_language_bytes(&self, handle: &str, language: &str) -> SourceResult<u64> {
        let mut url = endpoint(&self.base, &["users", handle, "repos"]);
        url.query_pairs_mut().append_pair("per_page", "100");
        let resp = self.get(url)?;
        let repos: Vec<GithubRepo> = match resp.status {
            200 => resp.json()?,
            404 => return Err(SourceError::UserNotFound(handle.to_string())),
            _ => return Err(unexpected(&resp, "repositories")),
        };
        let mut total = 0u64;
        for repo in repos {
            let mut segments = vec!["repos"];
            segments.extend(repo.full_name.split('/'));
            segments.push("languages");
            let resp = self.get(endpoint(&self.base, &segments))?;
            if resp.status != 200 {
                return Err(unexpected(&resp, "repository languages"));
            }
            let stats: RepoLanguageStats = resp.json()?;
            total += stats.bytes_for(language);
        }
        Ok(total)
    }
}

// ---------------------------------------------------------------------------
// Linked Data

pub struct DbpediaClient {
    base: Url,
    http: Arc<HttpTransport>,
}

/// `"Java (programming language)"` -> `"Java_(programming_language)"`.
pub fn resource_name(resource_id: &str) -> String {
    resource_id.trim().replace(' ', "_")
}

/// Pull the English abstract for `resource_id` out of a Linked-Data JSON document.
pub fn extract_abstract(resource_id: &str, doc: &Value) -> SourceResult<Abstract> {
    let subjects =
        doc.as_object().ok_or_else(|| SourceError::MalformedDocument("document is not a JSON object".into()))?;
    let suffix = format!("/resource/{}", resource_name(resource_id));
    let subject = subjects
        .iter()
        .find(|(iri, _)| iri.ends_with(&suffix))
        .map(|(_, v)| v)
        .ok_or_else(|| SourceError::ResourceNotFound(resource_id.to_string()))?;
    let literals = match subject.get(ABSTRACT_PREDICATE) {
        None => Vec::new(),
        Some(Value::Array(values)) => values.clone(),
        Some(_) => return Err(SourceError::MalformedDocument("abstract is not an array".into())),
    };
    let text = literals
        .iter()
        .find(|lit| lit.get("lang").and_then(Value::as_str) == Some("en"))
        .and_then(|lit| lit.get("value").and_then(Value::as_str))
        .unwrap_or_default()
        .to_string();
    Ok(Abstract { resource_id: resource_id.to_string(), text })
}

impl EncyclopediaSource for DbpediaClient {
    fn get_abstract(&self, resource_id: &str) -> SourceResult<Abstract> {
        if resource_id.trim().is_empty() {
            return Err(SourceError::InvalidArgument("empty resource id".into()));
        }
        let file = format!("{}.json", resource_name(resource_id));
        let resp = self.http.get(endpoint(&self.base, &["data", &file]), None, &[("Accept", "application/json")])?;
        match resp.status {
            200 => {
                let doc: Value = resp.json()?;
                extract_abstract(resource_id, &doc)
            }
            404 => Err(SourceError::ResourceNotFound(resource_id.to_string())),
            _ => Err(unexpected(&resp, "abstract")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn abstract_extraction() {
        let doc = json!({
            "http://dbpedia.org/resource/Java_(programming_language)": {
                "http://dbpedia.org/ontology/abstract": [
                    {"type": "literal", "lang": "de", "value": "Java ist"},
                    {"type": "literal", "lang": "en", "value": "Java is a language"}
                ]
            }
        });
        let a = extract_abstract("Java (programming language)", &doc).unwrap();
        assert_eq!(a.text, "Java is a language");

        let no_abstract = json!({"http://dbpedia.org/resource/Blank": {}});
        assert_eq!(extract_abstract("Blank", &no_abstract).unwrap().text, "");

        assert!(matches!(extract_abstract("Missing", &json!({})), Err(SourceError::ResourceNotFound(_))));
        assert!(matches!(extract_abstract("X", &json!([1, 2])), Err(SourceError::MalformedDocument(_))));
    }

    #[test]
    fn endpoints_keep_base_path() {
        let base = Url::parse("http://127.0.0.1:9000/stub/").unwrap();
        assert_eq!(endpoint(&base, &["users", "bob"]).as_str(), "http://127.0.0.1:9000/stub/users/bob");
        let base = Url::parse("https://dbpedia.org").unwrap();
        assert_eq!(endpoint(&base, &["data", "C++.json"]).as_str(), "https://dbpedia.org/data/C++.json");
    }
}
