//! Evaluation harness: expert classification, per-language precision and
//! recall, run-level averages over every configured language, and sweeps over
//! several search-constant settings.

mod report;

pub use report::{read_count_rows, replay_run, summary_json, write_reports, write_rows_csv, CountRow};

use crate::search::{CandidateProfile, ExpertFinder, LanguageList, SearchError};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("{language}: {experts} experts exceed {candidates} candidates")]
    ExpertsExceedCandidates { language: String, candidates: usize, experts: usize },
    #[error("search count must be at least 1")]
    ZeroSearchCount,
    #[error("language {0:?} is not in the configured list")]
    UnknownLanguage(String),
    #[error("invalid run config {0:?}, expected SEARCHxTIMELINE such as 50x25")]
    BadRunConfig(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// A candidate counts as an expert when they hold code in the queried language.
pub fn is_expert(candidate: &CandidateProfile) -> bool {
    candidate.bytes_of_code > 0
}

/// Per-language result. Ratios are kept at full precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub language: String,
    pub candidates_found: usize,
    pub experts_found: usize,
    pub precision: f64,
    pub recall: f64,
}

impl EvalRow {
    pub fn from_counts(
        language: impl Into<String>,
        candidates_found: usize,
        experts_found: usize,
        search_count: usize,
    ) -> Result<Self, EvalError> {
        let language = language.into();
        if search_count == 0 {
            return Err(EvalError::ZeroSearchCount);
        }
        if experts_found > candidates_found {
            return Err(EvalError::ExpertsExceedCandidates {
                language,
                candidates: candidates_found,
                experts: experts_found,
            });
        }
        let precision = if candidates_found == 0 { 0.0 } else { experts_found as f64 / candidates_found as f64 };
        let recall = experts_found as f64 / search_count as f64;
        Ok(EvalRow { language, candidates_found, experts_found, precision, recall })
    }

    pub fn zero(language: impl Into<String>) -> Self {
        EvalRow { language: language.into(), candidates_found: 0, experts_found: 0, precision: 0.0, recall: 0.0 }
    }
}

pub fn evaluate_language(
    language: &str,
    candidates: &[CandidateProfile],
    search_count: usize,
) -> Result<EvalRow, EvalError> {
    let experts = candidates.iter().filter(|c| is_expert(c)).count();
    EvalRow::from_counts(language, candidates.len(), experts, search_count)
}

/// Averages for one test run, taken over every configured language.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub search_count: usize,
    pub timeline_count: usize,
    pub rows: Vec<EvalRow>,
    pub average_precision: f64,
    pub average_recall: f64,
    /// Mean cosine over every candidate returned in the run.
    pub average_cosine: f64,
}

/// Arithmetic means over `rows`; languages with no candidates contribute zeros.
pub fn summarize_run(search_count: usize, timeline_count: usize, rows: Vec<EvalRow>, cosines: &[f64]) -> RunSummary {
    let mean = |values: &mut dyn Iterator<Item = f64>, n: usize| {
        if n == 0 {
            0.0
        } else {
            values.sum::<f64>() / n as f64
        }
    };
    let n = rows.len();
    let average_precision = mean(&mut rows.iter().map(|r| r.precision), n);
    let average_recall = mean(&mut rows.iter().map(|r| r.recall), n);
    let average_cosine = mean(&mut cosines.iter().copied(), cosines.len());
    RunSummary { search_count, timeline_count, rows, average_precision, average_recall, average_cosine }
}

/// Search constants for one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub search_count: usize,
    pub timeline_count: usize,
}

impl RunConfig {
    pub const fn new(search_count: usize, timeline_count: usize) -> Self {
        RunConfig { search_count, timeline_count }
    }

    /// The three settings used for the published test runs.
    pub const STANDARD: [RunConfig; 3] = [RunConfig::new(10, 5), RunConfig::new(30, 15), RunConfig::new(50, 25)];
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.search_count, self.timeline_count)
    }
}

impl FromStr for RunConfig {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || EvalError::BadRunConfig(s.to_string());
        let (a, b) = s.trim().split_once(['x', 'X', ':']).ok_or_else(bad)?;
        let search_count: usize = a.trim().parse().map_err(|_| bad())?;
        let timeline_count: usize = b.trim().parse().map_err(|_| bad())?;
        if search_count == 0 || timeline_count == 0 {
            return Err(bad());
        }
        Ok(RunConfig { search_count, timeline_count })
    }
}

/// One run's summary plus the ranked candidates behind it, per language.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub summary: RunSummary,
    pub results: Vec<(String, Vec<CandidateProfile>)>,
}

/// Run every configured language once per config. A language whose search
/// fails contributes a zero row and a warning.
pub fn run_sweep(finder: &ExpertFinder, configs: &[RunConfig], vector_size: usize) -> Vec<RunReport> {
    configs.iter().map(|cfg| run_once(finder, *cfg, vector_size)).collect()
}

fn run_once(finder: &ExpertFinder, cfg: RunConfig, vector_size: usize) -> RunReport {
    let languages: &LanguageList = finder.languages();
    let mut rows = Vec::with_capacity(languages.len());
    let mut cosines = Vec::new();
    let mut results = Vec::with_capacity(languages.len());
    for entry in languages.entries() {
        let params = crate::search::SearchParams::new(entry.clone())
            .with_counts(cfg.search_count, cfg.timeline_count)
            .with_vector_size(vector_size);
        let found = match finder.find_experts(&params) {
            Ok(found) => found,
            Err(e) => {
                warn_failed(&entry.display_name, &e);
                Vec::new()
            }
        };
        cosines.extend(found.iter().map(|c| c.cosine.value()));
        let row = evaluate_language(&entry.display_name, &found, cfg.search_count)
            .unwrap_or_else(|_| EvalRow::zero(&entry.display_name));
        rows.push(row);
        results.push((entry.display_name.clone(), found));
    }
    RunReport { summary: summarize_run(cfg.search_count, cfg.timeline_count, rows, &cosines), results }
}

fn warn_failed(language: &str, e: &SearchError) {
    tracing::warn!(language, "search failed, recording zero row: {e}");
}
