//! Deployment configuration shared by the CLI subcommands.
//!
//! Values are resolved flags first, then environment (both handled by the
//! argument parser), then the optional JSON config file, then built-in
//! defaults.

use crate::search::{ExpertFinder, LanguageConfigError, LanguageList, DEFAULT_PARALLELISM};
use crate::sources::credentials::CredentialsError;
use crate::sources::fixture::FixtureError;
use crate::sources::{
    BackendKind, Credentials, FixtureCorpus, LiveConfig, LiveSources, SourceError, Sources, SystemClock,
};
use crate::textpipe::DEFAULT_VECTOR_SIZE;
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("the fixture backend needs a fixture directory (--fixtures)")]
    MissingFixtures,
    #[error("the live backend needs a credentials file (--credentials)")]
    MissingCredentials,
    #[error("{0} must be at least 1")]
    NotPositive(&'static str),
    #[error("cannot read config file {path}: {reason}")]
    File { path: PathBuf, reason: String },
    #[error(transparent)]
    Languages(#[from] LanguageConfigError),
    #[error(transparent)]
    Fixtures(#[from] FixtureError),
    #[error(transparent)]
    Credentials(#[from] CredentialsError),
    #[error(transparent)]
    Source(#[from] SourceError),
}

/// Optional settings, as read from flags/environment or from a config file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub backend: Option<BackendKind>,
    pub fixtures: Option<PathBuf>,
    pub credentials: Option<PathBuf>,
    pub languages: Option<PathBuf>,
    pub vector_size: Option<usize>,
    pub parallelism: Option<usize>,
}

impl PartialConfig {
    /// Load a JSON config file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let err = |reason: String| ConfigError::File { path: path.to_path_buf(), reason };
        let raw = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        let mut cfg: PartialConfig = serde_json::from_str(&raw).map_err(|e| err(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.fixtures, &mut cfg.credentials, &mut cfg.languages].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Fill every unset field from `fallback`.
    pub fn or(self, fallback: PartialConfig) -> PartialConfig {
        PartialConfig {
            backend: self.backend.or(fallback.backend),
            fixtures: self.fixtures.or(fallback.fixtures),
            credentials: self.credentials.or(fallback.credentials),
            languages: self.languages.or(fallback.languages),
            vector_size: self.vector_size.or(fallback.vector_size),
            parallelism: self.parallelism.or(fallback.parallelism),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliConfig {
    pub backend: BackendKind,
    pub fixtures: Option<PathBuf>,
    pub credentials: Option<PathBuf>,
    /// Language list file; the shipped list when `None`.
    pub languages: Option<PathBuf>,
    pub vector_size: usize,
    pub parallelism: usize,
}

impl CliConfig {
    pub fn resolve(overrides: PartialConfig, file: PartialConfig) -> Result<Self, ConfigError> {
        let merged = overrides.or(file);
        let backend =
            merged.backend.unwrap_or(if merged.fixtures.is_some() { BackendKind::Fixture } else { BackendKind::Live });
        match backend {
            BackendKind::Fixture if merged.fixtures.is_none() => return Err(ConfigError::MissingFixtures),
            BackendKind::Live if merged.credentials.is_none() => return Err(ConfigError::MissingCredentials),
            _ => {}
        }
        let vector_size = merged.vector_size.unwrap_or(DEFAULT_VECTOR_SIZE);
        if vector_size == 0 {
            return Err(ConfigError::NotPositive("vector size"));
        }
        let parallelism = merged.parallelism.unwrap_or(DEFAULT_PARALLELISM);
        if parallelism == 0 {
            return Err(ConfigError::NotPositive("parallelism"));
        }
        Ok(CliConfig {
            backend,
            fixtures: merged.fixtures,
            credentials: merged.credentials,
            languages: merged.languages,
            vector_size,
            parallelism,
        })
    }

    pub fn language_list(&self) -> Result<LanguageList, ConfigError> {
        Ok(match &self.languages {
            Some(path) => LanguageList::load(path)?,
            None => LanguageList::builtin(),
        })
    }

    /// Open the configured backend. The fixture backend never touches the network.
    pub fn sources(&self) -> Result<Sources, ConfigError> {
        match self.backend {
            BackendKind::Fixture => {
                let dir = self.fixtures.as_ref().ok_or(ConfigError::MissingFixtures)?;
                Ok(Sources::from_fixture(Arc::new(FixtureCorpus::open(dir)?)))
            }
            BackendKind::Live => {
                let path = self.credentials.as_ref().ok_or(ConfigError::MissingCredentials)?;
                let creds = Credentials::load(path)?;
                creds.validate()?;
                let live = LiveSources::new(LiveConfig::from_credentials(&creds)?, Arc::new(SystemClock::new()))?;
                Ok(Sources::from_live(live))
            }
        }
    }

    pub fn finder(&self) -> Result<ExpertFinder, ConfigError> {
        Ok(ExpertFinder::new(self.sources()?, self.language_list()?).with_parallelism(self.parallelism))
    }
}
