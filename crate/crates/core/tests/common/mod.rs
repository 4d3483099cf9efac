#![allow(dead_code)]

pub mod stub;

use expertquest::sources::{FixtureCorpus, Sources};
use expertquest::{CandidateProfile, ExpertFinder, LanguageList, Similarity};
use rand::Rng;
use std::cmp::Reverse;
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub fn demo_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/demo")
}

pub fn demo_corpus() -> Arc<FixtureCorpus> {
    Arc::new(FixtureCorpus::open(&demo_dir()).expect("demo corpus"))
}

pub fn finder(corpus: Arc<FixtureCorpus>, parallelism: usize) -> ExpertFinder {
    ExpertFinder::new(Sources::from_fixture(corpus), LanguageList::builtin()).with_parallelism(parallelism)
}

pub fn expected(language: &str) -> String {
    std::fs::read_to_string(demo_dir().join("expected").join(format!("{language}.json"))).unwrap()
}

/// The serialized form written by `dump`.
pub fn render(found: &[CandidateProfile]) -> String {
    let mut body = serde_json::to_string_pretty(found).unwrap();
    body.push('\n');
    body
}

/// Copy a corpus directory so a test can edit it.
pub fn copy_dir(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for entry in std::fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_dir(&entry.path(), &target);
        } else {
            std::fs::copy(entry.path(), target).unwrap();
        }
    }
}

/// Random candidates drawn from narrow ranges so that every ranking key ties often.
pub fn random_candidates<R: Rng>(rng: &mut R, n: usize) -> Vec<CandidateProfile> {
    (0..n)
        .map(|_| {
            let handle = format!("user{}", rng.gen_range(0..40));
            CandidateProfile {
                display_name: handle.to_uppercase(),
                microblog_profile_url: format!("https://twitter.com/{handle}"),
                codehost_profile_url: format!("https://github.com/{handle}"),
                handle,
                twitter_followers: rng.gen_range(0..4),
                github_followers: rng.gen_range(0..4),
                bytes_of_code: [0, 0, 100, 5000][rng.gen_range(0..4)],
                cosine: Similarity::new([0.0, 0.25, 0.5, 1.0][rng.gen_range(0..4)]),
            }
        })
        .collect()
}

type Key = (Reverse<u64>, Reverse<u64>, Reverse<u64>, Reverse<u64>, String, String, String, String);

fn key(c: &CandidateProfile) -> Key {
    (
        Reverse(c.bytes_of_code),
        Reverse(c.github_followers),
        // Non-negative floats order the same as their bit patterns.
        Reverse(c.cosine.value().to_bits()),
        Reverse(c.twitter_followers),
        c.handle.clone(),
        c.display_name.clone(),
        c.microblog_profile_url.clone(),
        c.codehost_profile_url.clone(),
    )
}

/// Brute-force ranking: repeatedly pull out the best remaining candidate.
pub fn oracle_rank(candidates: &[CandidateProfile]) -> Vec<CandidateProfile> {
    let mut pool: Vec<CandidateProfile> = candidates.to_vec();
    let mut out = Vec::with_capacity(pool.len());
    while !pool.is_empty() {
        let best = (0..pool.len()).min_by_key(|&i| key(&pool[i])).unwrap();
        out.push(pool.remove(best));
    }
    out
}
