mod common;

use common::*;
use expertquest::search::{match_handles, rank, rank_order, score_candidate, MatchedCandidate};
use expertquest::sources::{
    Abstract, BackendKind, CodeHostSource, CodeHostUser, EncyclopediaSource, FixtureCorpus, MicroblogSource, Post,
    SourceError, SourceResult, Sources,
};
use expertquest::{SearchError, SearchParams};
use rand::SeedableRng;
use std::collections::HashMap;
use std::sync::atomic::Ordering;
use std::sync::Arc;

fn post(handle: &str, text: &str) -> Post {
    Post {
        author_handle: handle.into(),
        author_display_name: handle.to_uppercase(),
        author_follower_count: 10,
        text: text.into(),
    }
}

/// Minimal in-memory sources for single-candidate checks.
#[derive(Default)]
struct Fake {
    users: HashMap<String, u64>,
    timelines: HashMap<String, Vec<Post>>,
    bytes: HashMap<String, u64>,
}

impl MicroblogSource for Fake {
    fn search_posts(&self, _: &str, _: usize) -> SourceResult<Vec<Post>> {
        Ok(Vec::new())
    }
    fn get_timeline(&self, handle: &str, count: usize) -> SourceResult<Vec<Post>> {
        let posts = self.timelines.get(handle).ok_or_else(|| SourceError::UserNotFound(handle.into()))?;
        Ok(posts.iter().take(count).cloned().collect())
    }
}

impl CodeHostSource for Fake {
    fn get_code_user(&self, handle: &str) -> SourceResult<Option<CodeHostUser>> {
        Ok(self.users.get(&handle.to_lowercase()).map(|&follower_count| CodeHostUser {
            handle: handle.to_lowercase(),
            follower_count,
            profile_url: format!("https://github.com/{}", handle.to_lowercase()),
        }))
    }
    fn get_repo_language_bytes(&self, handle: &str, _: &str) -> SourceResult<u64> {
        Ok(self.bytes.get(handle).copied().unwrap_or(0))
    }
}

impl EncyclopediaSource for Fake {
    fn get_abstract(&self, resource_id: &str) -> SourceResult<Abstract> {
        Err(SourceError::ResourceNotFound(resource_id.into()))
    }
}

fn fake_sources(fake: Fake) -> Sources {
    let fake = Arc::new(fake);
    Sources { microblog: fake.clone(), code_host: fake.clone(), encyclopedia: fake, kind: BackendKind::Fixture }
}

fn clojure_params() -> SearchParams {
    SearchParams::new(expertquest::LanguageEntry::new("Clojure", "Clojure"))
}

#[test]
fn duplicate_authors_are_matched_once() {
    let fake = Fake { users: [("alice".to_string(), 5), ("bob".to_string(), 7)].into(), ..Default::default() };
    let posts = [post("alice", "a"), post("bob", "b"), post("ALICE", "c"), post("carol", "d")];
    let matched = match_handles(&fake, &posts).unwrap();
    let handles: Vec<_> = matched.iter().map(MatchedCandidate::handle).collect();
    assert_eq!(handles, ["alice", "bob"]);
    assert_eq!(matched[0].post.text, "a");
    assert!(match_handles(&fake, &[]).unwrap().is_empty());
}

#[test]
fn timeline_identical_to_abstract_scores_one() {
    let text = "Clojure is a dialect of the Lisp programming language on the Java platform";
    let fake = Fake {
        users: [("alice".to_string(), 5)].into(),
        timelines: [("alice".to_string(), vec![post("alice", text)]), ("quiet".to_string(), vec![])].into(),
        bytes: [("alice".to_string(), 1234)].into(),
    };
    let abstract_ = Abstract { resource_id: "Clojure".into(), text: text.into() };
    let matched = match_handles(&fake, &[post("alice", "x")]).unwrap();
    let sources = fake_sources(fake);
    let params = clojure_params();

    let profile = score_candidate(&sources, &matched[0], &params, &abstract_).unwrap();
    assert!((profile.cosine.value() - 1.0).abs() < 1e-9);
    assert_eq!(profile.bytes_of_code, 1234);
    assert_eq!(profile.github_followers, 5);
    assert_eq!(profile.twitter_followers, 10);
    assert_eq!(profile.mentions_percent(), 100);

    let quiet = MatchedCandidate {
        post: post("quiet", "x"),
        code_user: CodeHostUser { handle: "quiet".into(), follower_count: 0, profile_url: String::new() },
    };
    let profile = score_candidate(&sources, &quiet, &params, &abstract_).unwrap();
    assert_eq!(profile.cosine.value(), 0.0);

    let ghost = MatchedCandidate { post: post("ghost", "x"), code_user: quiet.code_user.clone() };
    let err = score_candidate(&sources, &ghost, &params, &abstract_).unwrap_err();
    assert!(matches!(err, SearchError::Candidate { .. }));
}

#[test]
fn demo_corpus_matches_expected_serial_and_parallel() {
    for parallelism in [1, 4] {
        let finder = finder(demo_corpus(), parallelism);
        for language in ["Clojure", "Scala", "Python"] {
            let params = finder.params_for(language).unwrap();
            let found = finder.find_experts(&params).unwrap();
            assert_eq!(render(&found), expected(language), "{language} at parallelism {parallelism}");
        }
    }
}

#[test]
fn clojure_ranking_at_default_counts() {
    let finder = finder(demo_corpus(), 4);
    let found = finder.find_experts(&finder.params_for("Clojure").unwrap()).unwrap();
    let handles: Vec<_> = found.iter().map(|c| c.handle.as_str()).collect();
    assert_eq!(
        handles,
        ["richhickey", "stuarthalloway", "technomancy", "bbatsov", "weavejester", "swannodette", "ldnclj", "cljnoob"]
    );
    assert_eq!(found[0].bytes_of_code, 935_000);
    assert_eq!(found[6].mentions_percent(), 63);
    assert_eq!(found[7].mentions_percent(), 14);
}

#[test]
fn scala_tie_is_broken_by_cosine() {
    let finder = finder(demo_corpus(), 1);
    let found = finder.find_experts(&finder.params_for("Scala").unwrap()).unwrap();
    assert_eq!(found.len(), 2);
    assert_eq!(
        (found[0].bytes_of_code, found[0].github_followers),
        (found[1].bytes_of_code, found[1].github_followers)
    );
    assert_eq!(found[0].handle, "expertA");
    assert!(found[0].cosine.value() > found[1].cosine.value());
}

#[test]
fn small_counts_match_truncated_corpus() {
    let dir = tempfile::tempdir().unwrap();
    copy_dir(&demo_dir(), dir.path());
    let search_file = dir.path().join("searches/Clojure%20github.json");
    let posts: Vec<Post> = serde_json::from_str(&std::fs::read_to_string(&search_file).unwrap()).unwrap();
    std::fs::write(&search_file, serde_json::to_string(&posts[..10]).unwrap()).unwrap();

    let full = finder(demo_corpus(), 4);
    let truncated = finder(Arc::new(FixtureCorpus::open(dir.path()).unwrap()), 4);
    let params = full.params_for("Clojure").unwrap().with_counts(10, 5);
    let a = full.find_experts(&params).unwrap();
    let b = truncated.find_experts(&params).unwrap();
    assert_eq!(a, b);
    let handles: Vec<_> = a.iter().map(|c| c.handle.as_str()).collect();
    assert_eq!(handles, ["richhickey", "stuarthalloway", "bbatsov", "weavejester", "swannodette", "ldnclj"]);
}

#[test]
fn call_budget_and_single_abstract_fetch() {
    for (s, t) in [(10, 5), (30, 15), (50, 25)] {
        let corpus = demo_corpus();
        let finder = finder(corpus.clone(), 4);
        let found = finder.find_experts(&finder.params_for("Clojure").unwrap().with_counts(s, t)).unwrap();
        let calls = corpus.calls();
        assert_eq!(calls.search.load(Ordering::SeqCst), 1);
        assert_eq!(calls.abstracts.load(Ordering::SeqCst), 1);
        assert!(found.len() <= s);
        assert!(calls.total() <= 2 + 3 * s, "{} calls for search count {s}", calls.total());
    }
}

#[test]
fn repeated_searches_are_identical() {
    let finder = finder(demo_corpus(), 4);
    let params = finder.params_for("Clojure").unwrap();
    let first = finder.find_experts(&params).unwrap();
    for _ in 0..5 {
        assert_eq!(finder.find_experts(&params).unwrap(), first);
    }
}

#[test]
fn language_without_posts_returns_nothing() {
    let corpus = demo_corpus();
    let finder = finder(corpus.clone(), 4);
    assert!(finder.find_experts(&finder.params_for("Haskell").unwrap()).unwrap().is_empty());
    assert_eq!(corpus.calls().abstracts.load(Ordering::SeqCst), 0);

    let empty = common::finder(Arc::new(FixtureCorpus::empty()), 4);
    for entry in empty.languages().entries() {
        assert!(empty.find_experts(&SearchParams::new(entry.clone())).unwrap().is_empty());
    }
}

#[test]
fn invalid_requests_are_rejected() {
    let finder = finder(demo_corpus(), 4);
    assert!(matches!(finder.params_for("Klingon"), Err(SearchError::InvalidArgument(_))));
    let unknown = SearchParams::new(expertquest::LanguageEntry::new("Klingon", "Klingon"));
    assert!(matches!(finder.find_experts(&unknown), Err(SearchError::InvalidArgument(_))));
    let zero = finder.params_for("Clojure").unwrap().with_counts(0, 5);
    assert!(matches!(finder.find_experts(&zero), Err(SearchError::InvalidArgument(_))));
    let zero = finder.params_for("Clojure").unwrap().with_vector_size(0);
    assert!(matches!(finder.find_experts(&zero), Err(SearchError::InvalidArgument(_))));
}

#[test]
fn missing_abstract_fails_the_search() {
    let dir = tempfile::tempdir().unwrap();
    copy_dir(&demo_dir(), dir.path());
    std::fs::remove_file(dir.path().join("abstracts/Clojure.json")).unwrap();
    let finder = finder(Arc::new(FixtureCorpus::open(dir.path()).unwrap()), 4);
    let err = finder.find_experts(&finder.params_for("Clojure").unwrap()).unwrap_err();
    assert!(matches!(err.source_error(), Some(SourceError::ResourceNotFound(_))));
}

#[test]
fn rank_agrees_with_brute_force() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for n in 0..12 {
        for _ in 0..50 {
            let candidates = random_candidates(&mut rng, n);
            let ranked = rank(candidates.clone());
            assert_eq!(ranked, oracle_rank(&candidates));
            for pair in ranked.windows(2) {
                assert_ne!(rank_order(&pair[0], &pair[1]), std::cmp::Ordering::Greater);
            }
        }
    }
}

#[test]
fn rank_is_independent_of_input_order() {
    use rand::seq::SliceRandom;
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for _ in 0..200 {
        let candidates = random_candidates(&mut rng, 10);
        let reference = rank(candidates.clone());
        let mut shuffled = candidates;
        shuffled.shuffle(&mut rng);
        assert_eq!(rank(shuffled), reference);
    }
}
