//! Per-service credential file.
//!
//! ```json
//! {
//!   "twitter": { "bearer_token": "...", "consumer_key": "...", "consumer_secret": "..." },
//!   "github": { "token": "..." },
//!   "dbpedia": { "base_url": "https://dbpedia.org" }
//! }
//! ```
//!
//! Every service section also accepts a `base_url` override.

use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Credentials {
    #[serde(default)]
    pub twitter: TwitterCredentials,
    #[serde(default)]
    pub github: GithubCredentials,
    #[serde(default)]
    pub dbpedia: DbpediaSettings,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwitterCredentials {
    pub bearer_token: Option<String>,
    pub consumer_key: Option<String>,
    pub consumer_secret: Option<String>,
    pub access_token: Option<String>,
    pub access_token_secret: Option<String>,
    pub base_url: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GithubCredentials {
    pub token: Option<String>,
    pub base_url: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DbpediaSettings {
    pub base_url: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CredentialsError {
    #[error("cannot read credentials file {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid credentials file {path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("twitter credentials need either bearer_token or consumer_key + consumer_secret")]
    MissingTwitter,
}

impl Credentials {
    pub fn load(path: &Path) -> Result<Self, CredentialsError> {
        let raw = std::fs::read_to_string(path)
            .map_err(|source| CredentialsError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&raw).map_err(|source| CredentialsError::Parse { path: path.display().to_string(), source })
    }

    pub fn from_json(raw: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(raw)
    }

    pub fn validate(&self) -> Result<(), CredentialsError> {
        let t = &self.twitter;
        if t.bearer_token.is_none() && (t.consumer_key.is_none() || t.consumer_secret.is_none()) {
            return Err(CredentialsError::MissingTwitter);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates() {
        let c =
            Credentials::from_json(r#"{"twitter":{"consumer_key":"k","consumer_secret":"s"},"github":{"token":"t"}}"#)
                .unwrap();
        assert!(c.validate().is_ok());
        assert_eq!(c.github.token.as_deref(), Some("t"));

        let c = Credentials::from_json(r#"{"github":{}}"#).unwrap();
        assert!(matches!(c.validate(), Err(CredentialsError::MissingTwitter)));

        assert!(Credentials::from_json(r#"{"twiter":{}}"#).is_err());
    }
}
