use super::{summarize_run, EvalError, EvalRow, RunSummary};
use crate::search::LanguageList;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

#[derive(Serialize)]
struct CsvRow<'a> {
    language: &'a str,
    candidates: usize,
    experts: usize,
    precision: f64,
    recall: f64,
    precision_3dp: String,
    recall_3dp: String,
}

/// `language,candidates,experts,precision,recall` at full precision, plus
/// three-decimal display columns.
pub fn write_rows_csv<W: Write>(rows: &[EvalRow], out: W) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(CsvRow {
            language: &r.language,
            candidates: r.candidates_found,
            experts: r.experts_found,
            precision: r.precision,
            recall: r.recall,
            precision_3dp: format!("{:.3}", r.precision),
            recall_3dp: format!("{:.3}", r.recall),
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn summary_json(summary: &RunSummary) -> serde_json::Value {
    json!({
        "search_count": summary.search_count,
        "timeline_count": summary.timeline_count,
        "avg_precision": summary.average_precision,
        "avg_recall": summary.average_recall,
        "avg_cosine": summary.average_cosine,
    })
}

/// Write `run_<S>x<T>.csv` and `run_<S>x<T>.json` into `dir`; returns both paths.
pub fn write_reports(dir: &Path, summary: &RunSummary) -> Result<(PathBuf, PathBuf), EvalError> {
    std::fs::create_dir_all(dir)?;
    let stem = format!("run_{}x{}", summary.search_count, summary.timeline_count);
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    write_rows_csv(&summary.rows, std::fs::File::create(&csv_path)?)?;
    let mut body = serde_json::to_string_pretty(&summary_json(summary))?;
    body.push('\n');
    std::fs::write(&json_path, body)?;
    Ok((csv_path, json_path))
}

/// Recorded per-language counts, as in a published results table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRow {
    pub language: String,
    pub candidates: usize,
    pub experts: usize,
}

/// Read `language,candidates,experts` rows (extra columns are ignored).
pub fn read_count_rows<R: Read>(input: R) -> Result<Vec<CountRow>, EvalError> {
    let mut reader = csv::Reader::from_reader(input);
    reader.deserialize().map(|r| r.map_err(EvalError::from)).collect()
}

/// Rebuild a run summary from recorded counts. Languages in `languages` that
/// have no recorded row get a zero row, so the means cover the whole list.
pub fn replay_run(
    languages: &LanguageList,
    recorded: &[CountRow],
    search_count: usize,
    timeline_count: usize,
) -> Result<RunSummary, EvalError> {
    let mut by_language: HashMap<&str, &CountRow> = HashMap::new();
    for row in recorded {
        let entry = languages.find(&row.language).ok_or_else(|| EvalError::UnknownLanguage(row.language.clone()))?;
        by_language.insert(entry.display_name.as_str(), row);
    }
    let rows = languages
        .entries()
        .iter()
        .map(|e| match by_language.get(e.display_name.as_str()) {
            Some(r) => EvalRow::from_counts(&e.display_name, r.candidates, r.experts, search_count),
            None if search_count == 0 => Err(EvalError::ZeroSearchCount),
            None => Ok(EvalRow::zero(&e.display_name)),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(summarize_run(search_count, timeline_count, rows, &[]))
}
