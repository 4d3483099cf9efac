use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::Path;

/// The shipped language list: 53 languages with disambiguated encyclopedia resources.
pub const DEFAULT_LANGUAGES_JSON: &str = include_str!("../../data/languages.json");

/// A searchable language and the encyclopedia resource describing it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LanguageEntry {
    #[serde(rename = "display")]
    pub display_name: String,
    #[serde(rename = "resource")]
    pub resource_id: String,
}

impl LanguageEntry {
    pub fn new(display_name: impl Into<String>, resource_id: impl Into<String>) -> Self {
        LanguageEntry { display_name: display_name.into(), resource_id: resource_id.into() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LanguageConfigError {
    #[error("cannot read language config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid language config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("language config entry {0} has an empty display name or resource")]
    EmptyField(usize),
    #[error("language {0:?} is listed twice")]
    Duplicate(String),
}

/// Ordered, validated list of [`LanguageEntry`]. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageList {
    entries: Vec<LanguageEntry>,
}

impl LanguageList {
    pub fn new(entries: Vec<LanguageEntry>) -> Result<Self, LanguageConfigError> {
        let mut seen = HashSet::new();
        for (i, e) in entries.iter().enumerate() {
            if e.display_name.trim().is_empty() || e.resource_id.trim().is_empty() {
                return Err(LanguageConfigError::EmptyField(i));
            }
            if !seen.insert(e.display_name.as_str()) {
                return Err(LanguageConfigError::Duplicate(e.display_name.clone()));
            }
        }
        Ok(LanguageList { entries })
    }

    pub fn from_json(raw: &str) -> Result<Self, LanguageConfigError> {
        Self::new(serde_json::from_str(raw)?)
    }

    pub fn load(path: &Path) -> Result<Self, LanguageConfigError> {
        let raw = std::fs::read_to_string(path)
            .map_err(|source| LanguageConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&raw)
    }

    pub fn builtin() -> Self {
        Self::from_json(DEFAULT_LANGUAGES_JSON).expect("shipped language list is valid")
    }

    /// Exact display-name match, falling back to a case-insensitive one.
    pub fn find(&self, display_name: &str) -> Option<&LanguageEntry> {
        self.entries
            .iter()
            .find(|e| e.display_name == display_name)
            .or_else(|| self.entries.iter().find(|e| e.display_name.eq_ignore_ascii_case(display_name)))
    }

    pub fn contains(&self, entry: &LanguageEntry) -> bool {
        self.entries.iter().any(|e| e == entry)
    }

    pub fn entries(&self) -> &[LanguageEntry] {
        &self.entries
    }

    pub fn display_names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.display_name.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
